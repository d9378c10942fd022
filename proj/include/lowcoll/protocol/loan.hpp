#pragma once

#include <optional>
#include <vector>

#include "lowcoll/money.hpp"
#include "lowcoll/protocol/economics.hpp"

namespace lowcoll::protocol {

/// A priced loan offer.
struct LoanQuote {
  Money principal;                   // gamma_n
  double interest = 0.0;             // delta_n
  double collateral_reduction = 0.0; // delta_coll, fraction of principal
  double base_threshold = 0.0;
  double required_collateral_ratio = 0.0;  // base_threshold - delta_coll
  double margin = 0.0;               // rho
  double bank_rate = 0.0;            // alpha_n
  double default_probability = 0.0;  // beta
  bool clamped = false;

  /// Amount the lender stands to lose on default: delta_coll * gamma_n.
  Money risked_amount() const { return mul_rate(principal, collateral_reduction); }
};

struct QuoteParams {
  Money principal;
  double default_probability = 0.0;
  double margin = 0.0;
  double bank_rate = 0.0;
  double base_threshold = 0.0;
};

/// Quote for a chosen collateral reduction. Throws QuoteInfeasible when the
/// reduced collateral ratio would not stay above 1.
LoanQuote quote_for_reduction(const BorrowerHistory& history, const QuoteParams& params,
                              double delta_coll);

/// Quote for a chosen interest rate; the reduction is solved and clamped.
LoanQuote quote_for_rate(const BorrowerHistory& history, const QuoteParams& params, double delta_n);

struct CurvePoint {
  double delta_coll = 0.0;
  double delta_n = 0.0;
};

/// Required rate across `steps + 1` evenly spaced reductions in [0, cap].
std::vector<CurvePoint> quote_curve(const BorrowerHistory& history, const QuoteParams& params, int steps);

enum class LoanState { Open, Repaid, Defaulted, LiquidatedByPrice };
enum class LoanOutcome { RepaidInFull, Default };

/// An originated loan. Open loans move once to a terminal state.
class ActiveLoan {
 public:
  /// Throws ValidationError when collateral_posted < required ratio * principal.
  ActiveLoan(LoanQuote quote, Money collateral_posted);

  const LoanQuote& quote() const { return quote_; }
  Money collateral_posted() const { return collateral_posted_; }
  LoanState state() const { return state_; }

  friend Money settle_loan(ActiveLoan& loan, LoanOutcome outcome);
  friend std::optional<Money> mark_to_market(ActiveLoan& loan, Money collateral_value);

 private:
  LoanQuote quote_;
  Money collateral_posted_;
  LoanState state_ = LoanState::Open;
};

/// Lender PnL of closing an open loan: +gamma*delta when repaid,
/// -delta_coll*gamma on default. Throws ValidationError for a closed loan.
Money settle_loan(ActiveLoan& loan, LoanOutcome outcome);

/// Revalues the collateral; at or below the loan's required ratio the loan is
/// liquidated and the default loss returned. Healthy loans return nullopt.
std::optional<Money> mark_to_market(ActiveLoan& loan, Money collateral_value);

}  // namespace lowcoll::protocol
