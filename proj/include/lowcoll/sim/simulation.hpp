#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lowcoll/money.hpp"

namespace lowcoll::sim {

struct GammaDistribution {
  enum class Kind { Fixed, LogUniform };
  Kind kind = Kind::Fixed;
  Money amount = Money::from_usd(100);  // Fixed
  Money min = Money::from_usd(10);      // LogUniform
  Money max = Money::from_usd(1000);
};

struct ReductionPolicy {
  enum class Kind { MaxAllowed, Fixed, Zero };
  Kind kind = Kind::MaxAllowed;
  double fixed = 0.0;  // used by Fixed, clipped to the risk cap
};

struct SimConfig {
  std::uint64_t seed = 42;
  std::int64_t n_borrowers = 1000;
  std::int64_t loans_per_borrower = 1;
  double true_beta = 0.2;
  /// Default probability used for pricing; the true one when unset.
  std::optional<double> quoted_beta;
  double rho = 0.03;
  /// Bank rate per loan index; the last entry repeats.
  std::vector<double> alpha_schedule{0.05};
  GammaDistribution gamma;
  double base_threshold = 1.2195;
  ReductionPolicy reduction_policy;
  Money initial_lending_gains;
  Money initial_bank_gains;
  /// Fraction of past gains forfeited on default.
  double punishment_fraction = 1.0;
  bool record_trace = false;
  bool record_trajectories = false;

  double pricing_beta() const { return quoted_beta.value_or(true_beta); }
  double alpha_for(std::int64_t loan_index) const;
  /// Throws ValidationError.
  void validate() const;
};

struct TraceRow {
  std::int64_t borrower = 0;
  std::int64_t loan_idx = 0;
  Money gamma;
  double delta_n = 0.0;
  double delta_coll = 0.0;
  std::string outcome;  // repaid | default | skipped
  Money pnl;
};

struct SimResult {
  Money total_lender_pnl;
  Money bank_baseline_pnl;  // sum of alpha_n * gamma_n over quoted loans
  /// Sums over quoted loans of the bank-side total B_n (past plus current) and
  /// lending-side total L_n; the expected PnL is B(1+rho) - L.
  Money sum_bank_totals;
  Money sum_lending_totals;
  double realized_default_rate = 0.0;
  std::int64_t n_borrowers = 0;
  std::int64_t loans_quoted = 0;
  std::int64_t loans_defaulted = 0;
  std::int64_t loans_skipped = 0;
  double mean_borrower_pnl_usd = 0.0;
  double borrower_pnl_std_usd = 0.0;  // sample std across borrowers
  Money worst_single_borrower_pnl;
  std::int64_t principal_safety_violations = 0;
  std::int64_t risk_cap_violations = 0;
  /// Required collateral ratio per quoted loan, per borrower.
  std::vector<std::vector<double>> trajectories;
  std::vector<bool> borrower_defaulted;
  std::vector<TraceRow> trace;

  /// Estimated standard error of total_lender_pnl, in USD.
  double total_pnl_std_error_usd() const;
};

SimResult run_simulation(const SimConfig& config);

/// total PnL >= sum(B_n)(1+rho) - sum(L_n) - 4 * standard error, with one
/// micro-USD of rounding slack per quoted loan.
bool verify_profit_bound(const SimResult& result, double rho);

SimConfig sim_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const SimConfig& config);
/// Trajectories and trace are left out; they go to CSV.
nlohmann::json to_json(const SimResult& result);
void write_trace_csv(const SimResult& result, std::ostream& out);

}  // namespace lowcoll::sim
