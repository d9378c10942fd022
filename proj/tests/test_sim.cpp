#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lowcoll/error.hpp"
#include "lowcoll/protocol/economics.hpp"
#include "lowcoll/rng.hpp"
#include "lowcoll/sim/simulation.hpp"

using namespace lowcoll;
using namespace lowcoll::sim;

namespace {

SimConfig seeded_config() {
  SimConfig c;
  c.n_borrowers = 2000;
  c.initial_lending_gains = Money::from_usd(1000);
  c.initial_bank_gains = Money::from_usd(1000);
  return c;
}

}  // namespace

TEST(Simulation, NoDefaultsEarnsTheQuotedInterest) {
  SimConfig c;
  c.n_borrowers = 300;
  c.loans_per_borrower = 4;
  c.true_beta = 0.0;
  c.alpha_schedule = {0.05, 0.04};
  c.gamma = {GammaDistribution::Kind::LogUniform, {}, Money::from_usd(10), Money::from_usd(5000)};
  c.record_trace = true;
  const SimResult r = run_simulation(c);
  EXPECT_EQ(r.loans_defaulted, 0);
  EXPECT_EQ(r.loans_quoted, 1200);
  Money expected;
  for (const TraceRow& row : r.trace) {
    ASSERT_EQ(row.outcome, "repaid");
    ASSERT_EQ(row.pnl, mul_rate(row.gamma, row.delta_n));
    expected += row.pnl;
  }
  EXPECT_EQ(r.total_lender_pnl, expected);
  EXPECT_EQ(r.realized_default_rate, 0.0);
}

TEST(Simulation, ZeroReductionNeverLoses) {
  SimConfig c = seeded_config();
  c.true_beta = 0.6;
  c.quoted_beta = 0.1;
  c.loans_per_borrower = 3;
  c.reduction_policy.kind = ReductionPolicy::Kind::Zero;
  const SimResult r = run_simulation(c);
  EXPECT_GT(r.loans_defaulted, 0);
  EXPECT_GE(r.worst_single_borrower_pnl, Money{});
}

TEST(Simulation, SameSeedSameResult) {
  SimConfig c = seeded_config();
  c.loans_per_borrower = 3;
  c.gamma = {GammaDistribution::Kind::LogUniform, {}, Money::from_usd(10), Money::from_usd(1000)};
  const auto a = to_json(run_simulation(c));
  const auto b = to_json(run_simulation(c));
  EXPECT_EQ(a.dump(), b.dump());
  c.seed = 43;
  EXPECT_NE(to_json(run_simulation(c)).dump(), a.dump());
}

TEST(Simulation, SafetyInvariantsOverRandomConfigs) {
  CounterRng rng(99, 0, 0);
  for (int trial = 0; trial < 30; ++trial) {
    SimConfig c;
    c.seed = trial;
    c.n_borrowers = 200;
    c.loans_per_borrower = 1 + static_cast<std::int64_t>(rng.below(5));
    c.true_beta = rng.uniform(0.0, 0.5);
    c.rho = rng.uniform(0.0, 0.1);
    c.alpha_schedule = {rng.uniform(0.0, 0.1)};
    c.gamma = {GammaDistribution::Kind::LogUniform, {}, Money::from_usd(10), Money::from_usd(10000)};
    c.initial_lending_gains = Money::from_usd(static_cast<std::int64_t>(rng.below(2000)));
    c.initial_bank_gains = Money::from_usd(static_cast<std::int64_t>(rng.below(2000)));
    if (rng.below(2) == 0) {
      c.reduction_policy = {ReductionPolicy::Kind::Fixed, rng.uniform(0.0, 0.3)};
    }
    const SimResult r = run_simulation(c);
    ASSERT_EQ(r.risk_cap_violations, 0) << trial;
    ASSERT_EQ(r.principal_safety_violations, 0) << trial;
    ASSERT_EQ(r.loans_quoted + r.loans_skipped, c.n_borrowers * c.loans_per_borrower);
  }
}

TEST(Simulation, SoftPunishmentCanEatPrincipal) {
  SimConfig c = seeded_config();
  c.n_borrowers = 200;
  c.loans_per_borrower = 10;
  c.true_beta = 0.5;
  c.quoted_beta = 0.05;
  c.punishment_fraction = 0.0;
  c.gamma.amount = Money::from_usd(10000);
  const SimResult r = run_simulation(c);
  EXPECT_EQ(r.risk_cap_violations, 0);
  EXPECT_GT(r.principal_safety_violations, 0);
}

TEST(Simulation, RequiredRatioFallsWithoutDefaults) {
  SimConfig c;
  c.n_borrowers = 20;
  c.loans_per_borrower = 12;
  c.true_beta = 0.0;
  c.quoted_beta = 0.1;
  c.record_trajectories = true;
  const SimResult r = run_simulation(c);
  ASSERT_EQ(r.trajectories.size(), 20u);
  for (const auto& path : r.trajectories) {
    ASSERT_EQ(path.size(), 12u);
    for (std::size_t k = 1; k < path.size(); ++k) ASSERT_LE(path[k], path[k - 1]);
    EXPECT_LT(path.back(), path.front());
    EXPECT_GT(path.back(), 1.0);
  }
}

TEST(Simulation, MeanPnlMatchesPricingTarget) {
  SimConfig c = seeded_config();
  c.n_borrowers = 20000;
  const SimResult r = run_simulation(c);
  EXPECT_TRUE(verify_profit_bound(r, c.rho));
  const double se = r.borrower_pnl_std_usd / std::sqrt(static_cast<double>(r.n_borrowers));
  EXPECT_NEAR(r.mean_borrower_pnl_usd, 35.15, 4.0 * se);
  EXPECT_EQ(r.bank_baseline_pnl, Money::from_usd(100000));
  EXPECT_NEAR(r.realized_default_rate, 0.2, 0.02);
}

TEST(Simulation, MispricedRiskBreaksTheBound) {
  SimConfig c = seeded_config();
  c.n_borrowers = 20000;
  c.quoted_beta = 0.05;
  c.true_beta = 0.4;
  const SimResult r = run_simulation(c);
  EXPECT_FALSE(verify_profit_bound(r, c.rho));
}

TEST(SimConfigIo, JsonRoundTripAndValidation) {
  SimConfig c = seeded_config();
  c.quoted_beta = 0.1;
  c.alpha_schedule = {0.05, 0.03};
  c.gamma = {GammaDistribution::Kind::LogUniform, {}, Money::from_usd(10), Money::from_usd(500)};
  c.reduction_policy = {ReductionPolicy::Kind::Fixed, 0.1};
  const SimConfig back = sim_config_from_json(nlohmann::json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.alpha_for(0), 0.05);
  EXPECT_EQ(back.alpha_for(7), 0.03);

  SimConfig bad = c;
  bad.true_beta = 1.0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = c;
  bad.n_borrowers = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = c;
  bad.base_threshold = 0.9;
  EXPECT_THROW(bad.validate(), ValidationError);
  EXPECT_THROW(sim_config_from_json(nlohmann::json::parse(R"({"reduction_policy": "sometimes"})")), ValidationError);
}

TEST(SimTrace, CsvHeaderAndRows) {
  SimConfig c;
  c.n_borrowers = 3;
  c.loans_per_borrower = 2;
  c.record_trace = true;
  std::ostringstream out;
  write_trace_csv(run_simulation(c), out);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "borrower,loan_idx,gamma,delta_n,delta_coll,outcome,pnl");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
}
