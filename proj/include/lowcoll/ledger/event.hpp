#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lowcoll/money.hpp"

namespace lowcoll::ledger {

/// The four protocol interactions of a single-base (USDC) lending market.
enum class EventKind { SupplyCollateral, SupplyUsdc, WithdrawUsdc, WithdrawCollateral };

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

constexpr bool is_usdc_event(EventKind kind) {
  return kind == EventKind::SupplyUsdc || kind == EventKind::WithdrawUsdc;
}

inline constexpr std::string_view kBaseAsset = "USDC";

/// Maximum fractional digits accepted for a token symbol (USDC 6, WBTC 8, others 18).
int asset_decimals(std::string_view asset);

/// Non-negative token quantity kept as an exact scaled integer. The scale is
/// the number of fractional digits written in the source, so rendering
/// reproduces the input text.
struct TokenAmount {
  __int128 units = 0;
  int scale = 0;

  static TokenAmount parse(std::string_view text, int max_scale);
  std::string to_string() const;

  friend bool operator==(const TokenAmount&, const TokenAmount&) = default;
};

struct EventRecord {
  std::int64_t timestamp = 0;  // unix seconds
  std::string account;         // lowercase 0x-hex
  EventKind kind = EventKind::SupplyUsdc;
  std::string asset;
  TokenAmount token_amount;
  Money usd_value;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

enum class LogFormat { Jsonl, Csv };

LogFormat parse_log_format(std::string_view text);

/// Reads every record of an event log in file order. Blank lines and lines
/// starting with '#' are skipped; any other malformed line raises ParseError
/// carrying its line number.
std::vector<EventRecord> parse_event_log(std::istream& source, LogFormat format);
std::vector<EventRecord> parse_event_log(std::string_view text, LogFormat format);

void write_event_log(std::ostream& out, std::span<const EventRecord> events, LogFormat format);
std::string write_event_log(std::span<const EventRecord> events, LogFormat format);

/// Stable sort by timestamp; ties keep input order.
std::vector<EventRecord> sort_events(std::vector<EventRecord> events);

}  // namespace lowcoll::ledger
