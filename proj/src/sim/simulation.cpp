#include "lowcoll/sim/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "lowcoll/error.hpp"
#include "lowcoll/protocol/loan.hpp"
#include "lowcoll/rng.hpp"

namespace lowcoll::sim {

using protocol::BorrowerHistory;

double SimConfig::alpha_for(std::int64_t loan_index) const {
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(loan_index), alpha_schedule.size() - 1);
  return alpha_schedule[i];
}

void SimConfig::validate() const {
  if (n_borrowers < 1 || loans_per_borrower < 1) {
    throw ValidationError("n_borrowers and loans_per_borrower must be at least 1");
  }
  if (!(true_beta >= 0.0 && true_beta < 1.0)) throw ValidationError("true_beta must lie in [0, 1)");
  const double pricing = pricing_beta();
  if (!(pricing >= 0.0 && pricing < 1.0)) throw ValidationError("quoted_beta must lie in [0, 1)");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw ValidationError("rho must be a non-negative number");
  if (alpha_schedule.empty()) throw ValidationError("alpha_schedule must not be empty");
  for (double alpha : alpha_schedule) {
    if (!(alpha >= 0.0 && alpha <= protocol::kMaxRate)) throw ValidationError("bank rates must lie in [0, 10]");
  }
  if (gamma.kind == GammaDistribution::Kind::Fixed) {
    if (gamma.amount <= Money{}) throw ValidationError("gamma amount must be positive");
  } else if (gamma.min <= Money{} || gamma.max < gamma.min) {
    throw ValidationError("gamma range must satisfy 0 < min <= max");
  }
  if (!(base_threshold > 1.0)) throw ValidationError("base_threshold must exceed 1.0");
  if (reduction_policy.kind == ReductionPolicy::Kind::Fixed &&
      !(reduction_policy.fixed >= 0.0 && reduction_policy.fixed <= 1.0)) {
    throw ValidationError("fixed delta_coll must lie in [0, 1]");
  }
  if (initial_lending_gains.is_negative() || initial_bank_gains.is_negative()) {
    throw ValidationError("initial gains must be non-negative");
  }
  if (!(punishment_fraction >= 0.0 && punishment_fraction <= 1.0)) {
    throw ValidationError("punishment_fraction must lie in [0, 1]");
  }
}

namespace {

Money draw_gamma(const GammaDistribution& dist, CounterRng& rng) {
  if (dist.kind == GammaDistribution::Kind::Fixed) return dist.amount;
  const double lo = std::log(static_cast<double>(dist.min.micros()));
  const double hi = std::log(static_cast<double>(dist.max.micros()));
  const auto micros = static_cast<std::int64_t>(std::llround(std::exp(rng.uniform(lo, hi))));
  return Money::from_micros(std::clamp(micros, dist.min.micros(), dist.max.micros()));
}

double policy_reduction(const SimConfig& config, const BorrowerHistory& history, Money gamma) {
  // Keep the reduced ratio strictly above par.
  const double ceiling = (config.base_threshold - 1.0) * (1.0 - 1e-9);
  const double allowed = std::min(protocol::max_collateral_reduction(history, gamma), ceiling);
  switch (config.reduction_policy.kind) {
    case ReductionPolicy::Kind::MaxAllowed: return allowed;
    case ReductionPolicy::Kind::Fixed: return std::min(config.reduction_policy.fixed, allowed);
    case ReductionPolicy::Kind::Zero: return 0.0;
  }
  return 0.0;
}

}  // namespace

SimResult run_simulation(const SimConfig& config) {
  config.validate();
  SimResult result;
  result.n_borrowers = config.n_borrowers;
  result.worst_single_borrower_pnl = Money::from_micros(INT64_MAX);
  if (config.record_trajectories) result.trajectories.resize(static_cast<std::size_t>(config.n_borrowers));
  result.borrower_defaulted.assign(static_cast<std::size_t>(config.n_borrowers), false);

  std::vector<std::int64_t> borrower_pnl(static_cast<std::size_t>(config.n_borrowers));
  for (std::int64_t b = 0; b < config.n_borrowers; ++b) {
    BorrowerHistory history = BorrowerHistory::from_totals(config.initial_lending_gains, config.initial_bank_gains);
    Money pnl;
    Money interest_earned = config.initial_lending_gains;
    for (std::int64_t k = 0; k < config.loans_per_borrower; ++k) {
      CounterRng rng(config.seed, static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(k));
      const Money gamma = draw_gamma(config.gamma, rng);
      const double alpha = config.alpha_for(k);
      protocol::QuoteParams params{gamma, config.pricing_beta(), config.rho, alpha, config.base_threshold};
      const double reduction = policy_reduction(config, history, gamma);

      protocol::LoanQuote quote;
      try {
        quote = protocol::quote_for_reduction(history, params, reduction);
      } catch (const QuoteInfeasible&) {
        ++result.loans_skipped;
        if (config.record_trace) result.trace.push_back({b, k, gamma, 0.0, reduction, "skipped", Money{}});
        continue;
      }
      ++result.loans_quoted;
      if (quote.risked_amount() > protocol::risk_cap(history, gamma)) ++result.risk_cap_violations;

      const Money bank_gain = mul_rate(gamma, alpha);
      result.bank_baseline_pnl += bank_gain;
      result.sum_bank_totals += history.past_bank_gains() + bank_gain;
      result.sum_lending_totals += history.past_lending_gains();

      const Money collateral = mul_rate(gamma, quote.required_collateral_ratio) + Money::from_micros(1);
      protocol::ActiveLoan loan(quote, collateral);
      const bool defaulted = rng.bernoulli(config.true_beta);
      const Money loan_pnl =
          settle_loan(loan, defaulted ? protocol::LoanOutcome::Default : protocol::LoanOutcome::RepaidInFull);
      pnl += loan_pnl;
      if (defaulted) {
        ++result.loans_defaulted;
        result.borrower_defaulted[static_cast<std::size_t>(b)] = true;
        history.forfeit(config.punishment_fraction);
      } else {
        interest_earned += loan_pnl;
        history.add_loan({gamma, quote.interest, alpha});
      }
      if (pnl < -interest_earned) ++result.principal_safety_violations;
      if (config.record_trajectories) {
        result.trajectories[static_cast<std::size_t>(b)].push_back(quote.required_collateral_ratio);
      }
      if (config.record_trace) {
        result.trace.push_back({b, k, gamma, quote.interest, quote.collateral_reduction,
                                defaulted ? "default" : "repaid", loan_pnl});
      }
    }
    borrower_pnl[static_cast<std::size_t>(b)] = pnl.micros();
    result.total_lender_pnl += pnl;
    result.worst_single_borrower_pnl = min(result.worst_single_borrower_pnl, pnl);
  }

  result.realized_default_rate =
      result.loans_quoted == 0 ? 0.0 : static_cast<double>(result.loans_defaulted) / result.loans_quoted;
  const double n = static_cast<double>(config.n_borrowers);
  double mean = 0.0;
  for (std::int64_t v : borrower_pnl) mean += static_cast<double>(v);
  mean /= n;
  double ss = 0.0;
  for (std::int64_t v : borrower_pnl) ss += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
  result.mean_borrower_pnl_usd = mean / 1e6;
  result.borrower_pnl_std_usd = config.n_borrowers > 1 ? std::sqrt(ss / (n - 1.0)) / 1e6 : 0.0;
  return result;
}

double SimResult::total_pnl_std_error_usd() const {
  return std::sqrt(static_cast<double>(n_borrowers)) * borrower_pnl_std_usd;
}

bool verify_profit_bound(const SimResult& result, double rho) {
  const Money target = mul_rate(result.sum_bank_totals, 1.0 + rho) - result.sum_lending_totals;
  const auto slack = static_cast<std::int64_t>(std::ceil(4.0 * result.total_pnl_std_error_usd() * 1e6)) +
                     result.loans_quoted;
  return result.total_lender_pnl >= target - Money::from_micros(slack);
}

}  // namespace lowcoll::sim
