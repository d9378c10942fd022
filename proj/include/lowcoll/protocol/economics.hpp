#pragma once

#include <span>
#include <vector>

#include "lowcoll/money.hpp"

namespace lowcoll::protocol {

/// Rates are dimensionless fractions per loan period.
inline constexpr double kMaxRate = 10.0;

enum class Collateralization { Healthy, Liquidate };

/// Liquidate iff collateral_value <= threshold * loan_value (inclusive
/// boundary), evaluated exactly. Requires loan_value > 0 and threshold > 1.
Collateralization check_collateralization(Money collateral_value, Money loan_value, double threshold);

/// Single-loan lending incentive: bank_rate < (1 - default_prob) * lender_rate.
bool incentive_holds_single(double bank_rate, double default_prob, double lender_rate);

struct PastLoan {
  Money principal;     // gamma_i
  double lender_rate;  // delta_i
  double bank_rate;    // alpha_i
};

/// A borrower's repaid loans and the gains they produced for the lender and
/// for the bank alternative. Gains are kept in sync on every mutation.
class BorrowerHistory {
 public:
  BorrowerHistory() = default;
  explicit BorrowerHistory(std::vector<PastLoan> loans);

  /// History known only through its aggregate gains.
  static BorrowerHistory from_totals(Money lending_gains, Money bank_gains);

  void add_loan(const PastLoan& loan);

  /// Cancels `fraction` of the accumulated gains (1.0 = treat as a new user).
  void forfeit(double fraction);

  std::span<const PastLoan> past_loans() const { return loans_; }
  Money past_lending_gains() const { return lending_gains_; }
  Money past_bank_gains() const { return bank_gains_; }
  /// Portion of the gains not attributed to any listed loan.
  Money carried_lending_gains() const { return carried_lending_; }
  Money carried_bank_gains() const { return carried_bank_; }

 private:
  void recompute();

  std::vector<PastLoan> loans_;
  Money carried_lending_;
  Money carried_bank_;
  Money lending_gains_;
  Money bank_gains_;
};

/// Multi-loan condition with risked collateral, optionally with a margin:
///   (bank gains + alpha_n*gamma_n) * (1 + rho)
///     < lending gains + (1 - beta)*gamma_n*delta_n - beta*delta_coll*gamma_n
/// Each rate product is rounded half-even to micro-USD. rho = 0 gives the
/// plain profitability check.
bool incentive_holds_history(const BorrowerHistory& history, Money gamma_n, double delta_n,
                             double beta, double delta_coll, double alpha_n, double rho = 0.0);

/// Right side minus left side of the margin-calibrated equality, in micro-USD.
/// Zero (within rounding) for any quote produced by quote_interest.
Money margin_residual(const BorrowerHistory& history, Money gamma_n, double delta_n, double beta,
                      double delta_coll, double alpha_n, double rho);

/// Largest amount a new loan may put at risk: min(gamma_n, 0.5 * lending gains).
Money risk_cap(const BorrowerHistory& history, Money gamma_n);

/// Largest collateral-reduction fraction whose risked amount stays within risk_cap.
double max_collateral_reduction(const BorrowerHistory& history, Money gamma_n);

/// Interest rate that makes expected lending gains exceed the bank by margin rho:
///   delta_n = [(B + alpha_n*gamma_n)(1+rho) - L + beta*delta_coll*gamma_n] / ((1-beta)*gamma_n)
/// Throws ValidationError for beta >= 1 or a reduction beyond the risk cap,
/// QuoteInfeasible when the rate falls outside (0, 10].
double quote_interest(const BorrowerHistory& history, Money gamma_n, double beta, double rho,
                      double delta_coll, double alpha_n);

struct ReductionSolution {
  double delta_coll = 0.0;
  bool clamped = false;
};

/// Inverse of quote_interest for a given rate, clamped to
/// [0, max_collateral_reduction]. Throws ValidationError for beta == 0.
ReductionSolution quote_collateral_reduction(const BorrowerHistory& history, Money gamma_n,
                                             double beta, double rho, double delta_n, double alpha_n);

}  // namespace lowcoll::protocol
