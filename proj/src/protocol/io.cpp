#include "lowcoll/protocol/io.hpp"

#include "lowcoll/error.hpp"

namespace lowcoll::protocol {

using json = nlohmann::json;

BorrowerHistory history_from_json(const json& doc) {
  try {
    std::vector<PastLoan> loans;
    if (doc.contains("past_loans")) {
      for (const json& row : doc.at("past_loans")) {
        loans.push_back({Money::parse(row.at("gamma_usd").get<std::string>()),
                         row.at("delta").get<double>(), row.at("alpha").get<double>()});
      }
    }
    const Money lending = doc.contains("past_lending_gains_usd")
                              ? Money::parse(doc.at("past_lending_gains_usd").get<std::string>())
                              : Money{};
    const Money bank = doc.contains("past_bank_gains_usd")
                           ? Money::parse(doc.at("past_bank_gains_usd").get<std::string>())
                           : Money{};
    BorrowerHistory history = BorrowerHistory::from_totals(lending, bank);
    for (const PastLoan& loan : loans) history.add_loan(loan);
    return history;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid borrower history: ") + e.what());
  }
}

json to_json(const BorrowerHistory& history) {
  json loans = json::array();
  for (const PastLoan& loan : history.past_loans()) {
    loans.push_back({{"gamma_usd", loan.principal.to_string()},
                     {"delta", loan.lender_rate},
                     {"alpha", loan.bank_rate}});
  }
  return {{"past_loans", loans},
          {"past_lending_gains_usd", history.carried_lending_gains().to_string()},
          {"past_bank_gains_usd", history.carried_bank_gains().to_string()}};
}

json to_json(const LoanQuote& quote) {
  return {{"gamma_n_usd", quote.principal.to_string()},
          {"beta", quote.default_probability},
          {"rho", quote.margin},
          {"alpha_n", quote.bank_rate},
          {"delta_coll", quote.collateral_reduction},
          {"delta_n", quote.interest},
          {"required_ratio", quote.required_collateral_ratio},
          {"clamped", quote.clamped}};
}

QuoteRequest quote_request_from_json(const json& doc, double default_threshold) {
  try {
    QuoteRequest request;
    request.params.principal = Money::parse(doc.at("gamma_n_usd").get<std::string>());
    request.params.default_probability = doc.at("beta").get<double>();
    request.params.margin = doc.value("rho", 0.0);
    request.params.bank_rate = doc.at("alpha_n").get<double>();
    request.params.base_threshold = doc.value("base_threshold", default_threshold);
    if (doc.contains("delta_coll") && !doc.at("delta_coll").is_null()) {
      request.delta_coll = doc.at("delta_coll").get<double>();
    }
    if (doc.contains("delta_n") && !doc.at("delta_n").is_null()) {
      request.delta_n = doc.at("delta_n").get<double>();
    }
    if (request.delta_coll && request.delta_n) {
      throw ValidationError("quote request may fix delta_coll or delta_n, not both");
    }
    return request;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid quote request: ") + e.what());
  }
}

}  // namespace lowcoll::protocol
