#include <ostream>

#include "lowcoll/error.hpp"
#include "lowcoll/format.hpp"
#include "lowcoll/sim/simulation.hpp"

namespace lowcoll::sim {

using json = nlohmann::json;

namespace {

Money money_field(const json& value) {
  if (value.is_string()) return Money::parse(value.get<std::string>());
  if (value.is_number_integer()) return Money::from_usd(value.get<std::int64_t>());
  if (value.is_number()) return Money::parse(format_double(value.get<double>()));
  throw ValidationError("expected a USD amount");
}

GammaDistribution gamma_from_json(const json& doc) {
  GammaDistribution dist;
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "fixed") {
    dist.kind = GammaDistribution::Kind::Fixed;
    dist.amount = money_field(doc.at("amount_usd"));
  } else if (kind == "log_uniform") {
    dist.kind = GammaDistribution::Kind::LogUniform;
    dist.min = money_field(doc.at("min_usd"));
    dist.max = money_field(doc.at("max_usd"));
  } else {
    throw ValidationError("unknown gamma_distribution kind '" + kind + "'");
  }
  return dist;
}

ReductionPolicy policy_from_json(const json& doc) {
  ReductionPolicy policy;
  const std::string kind = doc.is_string() ? doc.get<std::string>() : doc.at("kind").get<std::string>();
  if (kind == "max_allowed") {
    policy.kind = ReductionPolicy::Kind::MaxAllowed;
  } else if (kind == "zero") {
    policy.kind = ReductionPolicy::Kind::Zero;
  } else if (kind == "fixed") {
    policy.kind = ReductionPolicy::Kind::Fixed;
    policy.fixed = doc.at("delta_coll").get<double>();
  } else {
    throw ValidationError("unknown reduction_policy '" + kind + "'");
  }
  return policy;
}

}  // namespace

SimConfig sim_config_from_json(const json& doc) {
  try {
    if (!doc.is_object()) throw ValidationError("simulation config must be a JSON object");
    SimConfig config;
    config.seed = doc.value("seed", config.seed);
    config.n_borrowers = doc.value("n_borrowers", config.n_borrowers);
    config.loans_per_borrower = doc.value("loans_per_borrower", config.loans_per_borrower);
    config.true_beta = doc.value("true_beta", config.true_beta);
    if (doc.contains("quoted_beta") && !doc.at("quoted_beta").is_null()) {
      config.quoted_beta = doc.at("quoted_beta").get<double>();
    }
    config.rho = doc.value("rho", config.rho);
    if (doc.contains("alpha_schedule")) {
      const json& alphas = doc.at("alpha_schedule");
      config.alpha_schedule = alphas.is_array() ? alphas.get<std::vector<double>>()
                                                : std::vector<double>{alphas.get<double>()};
    }
    if (doc.contains("gamma_distribution")) config.gamma = gamma_from_json(doc.at("gamma_distribution"));
    config.base_threshold = doc.value("base_threshold", config.base_threshold);
    if (doc.contains("reduction_policy")) config.reduction_policy = policy_from_json(doc.at("reduction_policy"));
    if (doc.contains("initial_lending_gains_usd")) {
      config.initial_lending_gains = money_field(doc.at("initial_lending_gains_usd"));
    }
    if (doc.contains("initial_bank_gains_usd")) {
      config.initial_bank_gains = money_field(doc.at("initial_bank_gains_usd"));
    }
    config.punishment_fraction = doc.value("punishment_fraction", config.punishment_fraction);
    config.record_trace = doc.value("record_trace", config.record_trace);
    config.record_trajectories = doc.value("record_trajectories", config.record_trajectories);
    config.validate();
    return config;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid simulation config: ") + e.what());
  }
}

json to_json(const SimConfig& config) {
  json gamma;
  if (config.gamma.kind == GammaDistribution::Kind::Fixed) {
    gamma = {{"kind", "fixed"}, {"amount_usd", config.gamma.amount.to_string()}};
  } else {
    gamma = {{"kind", "log_uniform"},
             {"min_usd", config.gamma.min.to_string()},
             {"max_usd", config.gamma.max.to_string()}};
  }
  json policy;
  switch (config.reduction_policy.kind) {
    case ReductionPolicy::Kind::MaxAllowed: policy = "max_allowed"; break;
    case ReductionPolicy::Kind::Zero: policy = "zero"; break;
    case ReductionPolicy::Kind::Fixed:
      policy = {{"kind", "fixed"}, {"delta_coll", config.reduction_policy.fixed}};
      break;
  }
  return {{"seed", config.seed},
          {"n_borrowers", config.n_borrowers},
          {"loans_per_borrower", config.loans_per_borrower},
          {"true_beta", config.true_beta},
          {"quoted_beta", config.quoted_beta ? json(*config.quoted_beta) : json(nullptr)},
          {"rho", config.rho},
          {"alpha_schedule", config.alpha_schedule},
          {"gamma_distribution", gamma},
          {"base_threshold", config.base_threshold},
          {"reduction_policy", policy},
          {"initial_lending_gains_usd", config.initial_lending_gains.to_string()},
          {"initial_bank_gains_usd", config.initial_bank_gains.to_string()},
          {"punishment_fraction", config.punishment_fraction},
          {"record_trace", config.record_trace},
          {"record_trajectories", config.record_trajectories}};
}

json to_json(const SimResult& result) {
  return {{"total_lender_pnl_usd", result.total_lender_pnl.to_string()},
          {"bank_baseline_pnl_usd", result.bank_baseline_pnl.to_string()},
          {"sum_bank_totals_usd", result.sum_bank_totals.to_string()},
          {"sum_lending_totals_usd", result.sum_lending_totals.to_string()},
          {"realized_default_rate", result.realized_default_rate},
          {"n_borrowers", result.n_borrowers},
          {"loans_quoted", result.loans_quoted},
          {"loans_defaulted", result.loans_defaulted},
          {"loans_skipped", result.loans_skipped},
          {"mean_borrower_pnl_usd", result.mean_borrower_pnl_usd},
          {"borrower_pnl_std_usd", result.borrower_pnl_std_usd},
          {"total_pnl_std_error_usd", result.total_pnl_std_error_usd()},
          {"worst_single_borrower_pnl_usd", result.worst_single_borrower_pnl.to_string()},
          {"principal_safety_violations", result.principal_safety_violations},
          {"risk_cap_violations", result.risk_cap_violations}};
}

void write_trace_csv(const SimResult& result, std::ostream& out) {
  out << "borrower,loan_idx,gamma,delta_n,delta_coll,outcome,pnl\n";
  for (const TraceRow& row : result.trace) {
    out << row.borrower << ',' << row.loan_idx << ',' << row.gamma.to_string() << ','
        << format_double(row.delta_n) << ',' << format_double(row.delta_coll) << ',' << row.outcome << ','
        << row.pnl.to_string() << '\n';
  }
}

}  // namespace lowcoll::sim
