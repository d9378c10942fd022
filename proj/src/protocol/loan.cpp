#include "lowcoll/protocol/loan.hpp"

#include "lowcoll/error.hpp"

namespace lowcoll::protocol {

namespace {

void finish_quote(LoanQuote& quote) {
  quote.required_collateral_ratio = quote.base_threshold - quote.collateral_reduction;
  if (!(quote.required_collateral_ratio > 1.0)) {
    throw QuoteInfeasible("collateral reduction leaves the loan at or below par collateral");
  }
}

LoanQuote base_quote(const QuoteParams& params) {
  if (!(params.base_threshold > 1.0)) throw ValidationError("base threshold must exceed 1.0");
  LoanQuote quote;
  quote.principal = params.principal;
  quote.base_threshold = params.base_threshold;
  quote.margin = params.margin;
  quote.bank_rate = params.bank_rate;
  quote.default_probability = params.default_probability;
  return quote;
}

}  // namespace

LoanQuote quote_for_reduction(const BorrowerHistory& history, const QuoteParams& params,
                              double delta_coll) {
  LoanQuote quote = base_quote(params);
  quote.collateral_reduction = delta_coll;
  quote.interest = quote_interest(history, params.principal, params.default_probability,
                                  params.margin, delta_coll, params.bank_rate);
  finish_quote(quote);
  return quote;
}

LoanQuote quote_for_rate(const BorrowerHistory& history, const QuoteParams& params, double delta_n) {
  LoanQuote quote = base_quote(params);
  const ReductionSolution solution = quote_collateral_reduction(
      history, params.principal, params.default_probability, params.margin, delta_n, params.bank_rate);
  quote.interest = delta_n;
  quote.collateral_reduction = solution.delta_coll;
  quote.clamped = solution.clamped;
  finish_quote(quote);
  return quote;
}

std::vector<CurvePoint> quote_curve(const BorrowerHistory& history, const QuoteParams& params, int steps) {
  if (steps < 1) throw ValidationError("sweep needs at least one step");
  const double upper = max_collateral_reduction(history, params.principal);
  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    const double delta_coll = i == steps ? upper : upper * i / steps;
    curve.push_back({delta_coll, quote_interest(history, params.principal, params.default_probability,
                                                params.margin, delta_coll, params.bank_rate)});
  }
  return curve;
}

ActiveLoan::ActiveLoan(LoanQuote quote, Money collateral_posted)
    : quote_(quote), collateral_posted_(collateral_posted) {
  if (quote_.principal <= Money{}) throw ValidationError("loan principal must be positive");
  if (collateral_posted_ < mul_rate(quote_.principal, quote_.required_collateral_ratio)) {
    throw ValidationError("posted collateral below the required ratio");
  }
}

Money settle_loan(ActiveLoan& loan, LoanOutcome outcome) {
  if (loan.state_ != LoanState::Open) throw ValidationError("loan is already settled");
  if (outcome == LoanOutcome::RepaidInFull) {
    loan.state_ = LoanState::Repaid;
    return mul_rate(loan.quote_.principal, loan.quote_.interest);
  }
  loan.state_ = LoanState::Defaulted;
  return -loan.quote_.risked_amount();
}

std::optional<Money> mark_to_market(ActiveLoan& loan, Money collateral_value) {
  if (loan.state_ != LoanState::Open) throw ValidationError("loan is already settled");
  if (check_collateralization(collateral_value, loan.quote_.principal,
                              loan.quote_.required_collateral_ratio) == Collateralization::Healthy) {
    return std::nullopt;
  }
  loan.state_ = LoanState::LiquidatedByPrice;
  return -loan.quote_.risked_amount();
}

}  // namespace lowcoll::protocol
