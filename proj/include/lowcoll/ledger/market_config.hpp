#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace lowcoll::ledger {

struct BankRate {
  std::int64_t effective_from = 0;
  double alpha = 0.0;  // per loan period
};

/// Liquidation thresholds per collateral asset and the risk-free bank rate.
struct MarketConfig {
  std::string platform;
  std::map<std::string, double, std::less<>> liquidation_thresholds;
  std::vector<BankRate> bank_rate_schedule;

  /// Throws ValidationError for a threshold <= 1 or an unsorted schedule.
  void validate() const;

  double threshold(std::string_view asset) const;
  double bank_rate_at(std::int64_t timestamp) const;
};

/// Reads one platform from a market file. An empty `platform` selects the
/// file's "default_platform".
MarketConfig market_config_from_json(const nlohmann::json& doc, std::string_view platform = {});
MarketConfig load_market_config(const std::filesystem::path& path, std::string_view platform = {});

}  // namespace lowcoll::ledger
