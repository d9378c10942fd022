#pragma once

#include <optional>

#include <nlohmann/json.hpp>

#include "lowcoll/protocol/economics.hpp"
#include "lowcoll/protocol/loan.hpp"

namespace lowcoll::protocol {

/// {"past_loans": [{"gamma_usd": "...", "delta": .., "alpha": ..}, ...],
///  "past_lending_gains_usd": "...", "past_bank_gains_usd": "..."}
/// Both parts are optional; aggregate gains add to the per-loan sums.
BorrowerHistory history_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const BorrowerHistory& history);

/// {"gamma_n_usd", "beta", "rho", "alpha_n", "delta_coll", "delta_n",
///  "required_ratio", "clamped"}
nlohmann::json to_json(const LoanQuote& quote);

/// A quote request: the quote fields minus the solved ones. Exactly one of
/// delta_coll / delta_n may be given; neither means a reduction of 0.
struct QuoteRequest {
  QuoteParams params;
  std::optional<double> delta_coll;
  std::optional<double> delta_n;
};

QuoteRequest quote_request_from_json(const nlohmann::json& doc, double default_threshold);

}  // namespace lowcoll::protocol
