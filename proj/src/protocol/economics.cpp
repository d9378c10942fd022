#include "lowcoll/protocol/economics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lowcoll/error.hpp"

namespace lowcoll::protocol {

namespace {

void check_rate(double rate, const char* what) {
  if (!(rate >= 0.0 && rate <= kMaxRate)) {
    throw ValidationError(std::string(what) + " must lie in [0, 10], got " + std::to_string(rate));
  }
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError("default probability must lie in [0, 1], got " + std::to_string(p));
  }
}

void check_principal(Money gamma_n) {
  if (gamma_n <= Money{}) throw ValidationError("loan principal must be positive");
}

// Bank-side total including the new loan: sum(alpha_i * gamma_i), i <= n.
Money bank_total(const BorrowerHistory& history, Money gamma_n, double alpha_n) {
  return history.past_bank_gains() + mul_rate(gamma_n, alpha_n);
}

}  // namespace

Collateralization check_collateralization(Money collateral_value, Money loan_value, double threshold) {
  if (loan_value <= Money{}) throw ValidationError("no loan to evaluate");
  if (!(threshold > 1.0) || !std::isfinite(threshold)) {
    throw ValidationError("liquidation threshold must exceed 1.0");
  }
  if (collateral_value.is_negative()) throw ValidationError("collateral value must be non-negative");
  // The boundary is threshold * loan at micro-USD resolution, so a decimal
  // threshold like 1.333 behaves as written rather than as its binary value.
  return collateral_value <= mul_rate(loan_value, threshold) ? Collateralization::Liquidate
                                                             : Collateralization::Healthy;
}

bool incentive_holds_single(double bank_rate, double default_prob, double lender_rate) {
  check_probability(default_prob);
  return bank_rate < (1.0 - default_prob) * lender_rate;
}

BorrowerHistory::BorrowerHistory(std::vector<PastLoan> loans) : loans_(std::move(loans)) {
  for (const PastLoan& loan : loans_) {
    if (loan.principal.is_negative()) throw ValidationError("past loan principal must be non-negative");
    check_rate(loan.lender_rate, "lender rate");
    check_rate(loan.bank_rate, "bank rate");
  }
  recompute();
}

BorrowerHistory BorrowerHistory::from_totals(Money lending_gains, Money bank_gains) {
  if (lending_gains.is_negative() || bank_gains.is_negative()) {
    throw ValidationError("past gains must be non-negative");
  }
  BorrowerHistory history;
  history.carried_lending_ = lending_gains;
  history.carried_bank_ = bank_gains;
  history.recompute();
  return history;
}

void BorrowerHistory::add_loan(const PastLoan& loan) {
  if (loan.principal.is_negative()) throw ValidationError("past loan principal must be non-negative");
  check_rate(loan.lender_rate, "lender rate");
  check_rate(loan.bank_rate, "bank rate");
  loans_.push_back(loan);
  lending_gains_ += mul_rate(loan.principal, loan.lender_rate);
  bank_gains_ += mul_rate(loan.principal, loan.bank_rate);
}

void BorrowerHistory::forfeit(double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ValidationError("forfeit fraction must lie in [0, 1]");
  const Money lending = lending_gains_;
  const Money bank = bank_gains_;
  loans_.clear();
  carried_lending_ = lending - mul_rate(lending, fraction);
  carried_bank_ = bank - mul_rate(bank, fraction);
  recompute();
}

void BorrowerHistory::recompute() {
  lending_gains_ = carried_lending_;
  bank_gains_ = carried_bank_;
  for (const PastLoan& loan : loans_) {
    lending_gains_ += mul_rate(loan.principal, loan.lender_rate);
    bank_gains_ += mul_rate(loan.principal, loan.bank_rate);
  }
}

Money margin_residual(const BorrowerHistory& history, Money gamma_n, double delta_n, double beta,
                      double delta_coll, double alpha_n, double rho) {
  check_probability(beta);
  check_principal(gamma_n);
  const Money lhs = mul_rate(bank_total(history, gamma_n, alpha_n), 1.0 + rho);
  const Money rhs = history.past_lending_gains() + mul_rate(gamma_n, (1.0 - beta) * delta_n) -
                    mul_rate(gamma_n, beta * delta_coll);
  return rhs - lhs;
}

bool incentive_holds_history(const BorrowerHistory& history, Money gamma_n, double delta_n,
                             double beta, double delta_coll, double alpha_n, double rho) {
  return margin_residual(history, gamma_n, delta_n, beta, delta_coll, alpha_n, rho) > Money{};
}

Money risk_cap(const BorrowerHistory& history, Money gamma_n) {
  if (gamma_n.is_negative()) throw ValidationError("loan principal must be non-negative");
  return min(gamma_n, div_round_even(history.past_lending_gains(), 2));
}

double max_collateral_reduction(const BorrowerHistory& history, Money gamma_n) {
  check_principal(gamma_n);
  const Money cap = risk_cap(history, gamma_n);
  double fraction = static_cast<double>(cap.micros()) / static_cast<double>(gamma_n.micros());
  while (fraction > 0.0 && mul_rate(gamma_n, fraction) > cap) {
    fraction = std::nextafter(fraction, 0.0);
  }
  return fraction;
}

double quote_interest(const BorrowerHistory& history, Money gamma_n, double beta, double rho,
                      double delta_coll, double alpha_n) {
  check_probability(beta);
  check_principal(gamma_n);
  check_rate(alpha_n, "bank rate");
  if (beta >= 1.0) throw ValidationError("default probability 1 cannot be priced");
  if (!(rho > -1.0) || !std::isfinite(rho)) throw ValidationError("margin must exceed -1");
  if (!(delta_coll >= 0.0)) throw ValidationError("collateral reduction must be non-negative");
  if (mul_rate(gamma_n, delta_coll) > risk_cap(history, gamma_n)) {
    throw ValidationError("collateral reduction exceeds the risk cap");
  }

  const double gamma = static_cast<double>(gamma_n.micros());
  const double bank = static_cast<double>(bank_total(history, gamma_n, alpha_n).micros());
  const double lending = static_cast<double>(history.past_lending_gains().micros());
  const double delta_n = (bank * (1.0 + rho) - lending + beta * delta_coll * gamma) / ((1.0 - beta) * gamma);
  if (!(delta_n > 0.0 && delta_n <= kMaxRate)) {
    throw QuoteInfeasible("required interest rate " + std::to_string(delta_n) + " outside (0, 10]");
  }
  return delta_n;
}

ReductionSolution quote_collateral_reduction(const BorrowerHistory& history, Money gamma_n,
                                             double beta, double rho, double delta_n, double alpha_n) {
  check_probability(beta);
  check_principal(gamma_n);
  check_rate(alpha_n, "bank rate");
  if (beta == 0.0) {
    throw ValidationError("collateral reduction is unconstrained when default probability is 0");
  }
  const double gamma = static_cast<double>(gamma_n.micros());
  const double bank = static_cast<double>(bank_total(history, gamma_n, alpha_n).micros());
  const double lending = static_cast<double>(history.past_lending_gains().micros());
  const double raw = ((1.0 - beta) * gamma * delta_n - (bank * (1.0 + rho) - lending)) / (beta * gamma);

  // Floating-point noise at the boundaries is not a clamp.
  constexpr double kSlack = 1e-12;
  const double upper = max_collateral_reduction(history, gamma_n);
  if (raw < 0.0) return {0.0, raw < -kSlack};
  if (raw > upper) return {upper, raw > upper + kSlack};
  return {raw, false};
}

}  // namespace lowcoll::protocol
