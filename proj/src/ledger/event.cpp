#include "lowcoll/ledger/event.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lowcoll/error.hpp"

namespace lowcoll::ledger {

namespace {

using json = nlohmann::json;

constexpr std::string_view kCsvHeader = "ts,account,kind,asset,amount,usd";

std::string normalize_account(std::string_view raw) {
  std::string account(raw);
  std::transform(account.begin(), account.end(), account.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (account.size() < 3 || account.compare(0, 2, "0x") != 0) {
    throw ValidationError("account must be a 0x-prefixed hex string: '" + std::string(raw) + "'");
  }
  for (std::size_t i = 2; i < account.size(); ++i) {
    const char c = account[i];
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      throw ValidationError("account must be a 0x-prefixed hex string: '" + std::string(raw) + "'");
    }
  }
  return account;
}

std::string validate_asset(std::string_view raw) {
  if (raw.empty()) throw ValidationError("empty asset symbol");
  for (const char c : raw) {
    if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) {
      throw ValidationError("invalid asset symbol '" + std::string(raw) + "'");
    }
  }
  return std::string(raw);
}

std::int64_t parse_timestamp(std::string_view text) {
  std::int64_t value = 0;
  if (text.empty()) throw ValidationError("empty timestamp");
  for (const char c : text) {
    if (c < '0' || c > '9') throw ValidationError("invalid timestamp '" + std::string(text) + "'");
    if (value > (INT64_MAX - 9) / 10) throw ValidationError("timestamp out of range");
    value = value * 10 + (c - '0');
  }
  return value;
}

EventRecord make_record(std::int64_t ts, std::string_view account, std::string_view kind,
                        std::string_view asset, std::string_view amount, std::string_view usd) {
  EventRecord record;
  if (ts <= 0) throw ValidationError("timestamp must be positive");
  record.timestamp = ts;
  record.account = normalize_account(account);
  record.kind = parse_event_kind(kind);
  record.asset = validate_asset(asset);
  if (is_usdc_event(record.kind) != (record.asset == kBaseAsset)) {
    throw ValidationError(is_usdc_event(record.kind)
                              ? "USDC events must carry asset USDC"
                              : "collateral events cannot use the base asset USDC");
  }
  if (!amount.empty() && amount.front() == '-') throw ValidationError("negative token amount");
  if (!usd.empty() && usd.front() == '-') throw ValidationError("negative usd value");
  record.token_amount = TokenAmount::parse(amount, asset_decimals(record.asset));
  record.usd_value = Money::parse(usd);
  return record;
}

std::string_view trim_line(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
    line.remove_suffix(1);
  }
  while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
  return line;
}

const json& require(const json& object, const char* key) {
  const auto it = object.find(key);
  if (it == object.end()) throw ValidationError(std::string("missing field '") + key + "'");
  return *it;
}

const std::string& require_string(const json& object, const char* key) {
  const json& value = require(object, key);
  if (!value.is_string()) throw ValidationError(std::string("field '") + key + "' must be a string");
  return value.get_ref<const std::string&>();
}

EventRecord parse_jsonl_line(std::string_view line) {
  json object;
  try {
    object = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
  if (!object.is_object()) throw ValidationError("expected a JSON object");
  const json& ts = require(object, "ts");
  if (!ts.is_number_integer()) throw ValidationError("field 'ts' must be an integer");
  return make_record(ts.get<std::int64_t>(), require_string(object, "account"),
                     require_string(object, "kind"), require_string(object, "asset"),
                     require_string(object, "amount"), require_string(object, "usd"));
}

EventRecord parse_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim_line(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (fields.size() != 6) {
    throw ValidationError("expected 6 fields, found " + std::to_string(fields.size()));
  }
  return make_record(parse_timestamp(fields[0]), fields[1], fields[2], fields[3], fields[4], fields[5]);
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::SupplyCollateral: return "supply_collateral";
    case EventKind::SupplyUsdc: return "supply_usdc";
    case EventKind::WithdrawUsdc: return "withdraw_usdc";
    case EventKind::WithdrawCollateral: return "withdraw_collateral";
  }
  return "unknown";
}

EventKind parse_event_kind(std::string_view text) {
  if (text == "supply_collateral") return EventKind::SupplyCollateral;
  if (text == "supply_usdc") return EventKind::SupplyUsdc;
  if (text == "withdraw_usdc") return EventKind::WithdrawUsdc;
  if (text == "withdraw_collateral") return EventKind::WithdrawCollateral;
  throw ValidationError("unknown event kind '" + std::string(text) + "'");
}

int asset_decimals(std::string_view asset) {
  if (asset == "USDC") return 6;
  if (asset == "WBTC") return 8;
  return 18;
}

TokenAmount TokenAmount::parse(std::string_view text, int max_scale) {
  if (text.empty()) throw ValidationError("empty token amount");
  TokenAmount amount;
  bool seen_point = false;
  bool seen_digit = false;
  for (const char c : text) {
    if (c == '.') {
      if (seen_point) throw ValidationError("invalid token amount '" + std::string(text) + "'");
      seen_point = true;
      continue;
    }
    if (c < '0' || c > '9') throw ValidationError("invalid token amount '" + std::string(text) + "'");
    seen_digit = true;
    if (seen_point && ++amount.scale > max_scale) {
      throw ValidationError("token amount '" + std::string(text) + "' exceeds " +
                            std::to_string(max_scale) + " decimals");
    }
    if (amount.units > (static_cast<__int128>(1) << 120)) {
      throw ValidationError("token amount out of range");
    }
    amount.units = amount.units * 10 + (c - '0');
  }
  if (!seen_digit) throw ValidationError("invalid token amount '" + std::string(text) + "'");
  return amount;
}

std::string TokenAmount::to_string() const {
  std::string digits;
  __int128 value = units;
  do {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  } while (value > 0);
  while (static_cast<int>(digits.size()) <= scale) digits.push_back('0');
  std::reverse(digits.begin(), digits.end());
  if (scale > 0) digits.insert(digits.size() - static_cast<std::size_t>(scale), ".");
  return digits;
}

LogFormat parse_log_format(std::string_view text) {
  if (text == "jsonl") return LogFormat::Jsonl;
  if (text == "csv") return LogFormat::Csv;
  throw ValidationError("unknown log format '" + std::string(text) + "'");
}

std::vector<EventRecord> parse_event_log(std::istream& source, LogFormat format) {
  std::vector<EventRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = format != LogFormat::Csv;
  while (std::getline(source, raw)) {
    ++line_no;
    const std::string_view line = trim_line(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kCsvHeader) {
        throw ParseError(line_no, "expected CSV header '" + std::string(kCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    try {
      records.push_back(format == LogFormat::Jsonl ? parse_jsonl_line(line) : parse_csv_line(line));
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return records;
}

std::vector<EventRecord> parse_event_log(std::string_view text, LogFormat format) {
  std::istringstream stream{std::string(text)};
  return parse_event_log(stream, format);
}

void write_event_log(std::ostream& out, std::span<const EventRecord> events, LogFormat format) {
  if (format == LogFormat::Csv) out << kCsvHeader << '\n';
  for (const EventRecord& e : events) {
    if (format == LogFormat::Jsonl) {
      out << "{\"ts\": " << e.timestamp << ", \"account\": " << json(e.account).dump()
          << ", \"kind\": \"" << to_string(e.kind) << "\", \"asset\": " << json(e.asset).dump()
          << ", \"amount\": \"" << e.token_amount.to_string() << "\", \"usd\": \""
          << e.usd_value.to_string() << "\"}\n";
    } else {
      out << e.timestamp << ',' << e.account << ',' << to_string(e.kind) << ',' << e.asset << ','
          << e.token_amount.to_string() << ',' << e.usd_value.to_string() << '\n';
    }
  }
}

std::string write_event_log(std::span<const EventRecord> events, LogFormat format) {
  std::ostringstream out;
  write_event_log(out, events, format);
  return out.str();
}

std::vector<EventRecord> sort_events(std::vector<EventRecord> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
  return events;
}

}  // namespace lowcoll::ledger
