#include "lowcoll/ledger/market_config.hpp"

#include <fstream>

#include "lowcoll/error.hpp"

namespace lowcoll::ledger {

void MarketConfig::validate() const {
  for (const auto& [asset, ratio] : liquidation_thresholds) {
    if (!(ratio > 1.0)) {
      throw ValidationError("liquidation threshold for " + asset + " must exceed 1.0");
    }
  }
  for (std::size_t i = 0; i < bank_rate_schedule.size(); ++i) {
    const BankRate& r = bank_rate_schedule[i];
    if (!(r.alpha >= 0.0)) throw ValidationError("bank rate must be non-negative");
    if (i > 0 && r.effective_from <= bank_rate_schedule[i - 1].effective_from) {
      throw ValidationError("bank rate schedule must be strictly increasing in effective_from");
    }
  }
}

double MarketConfig::threshold(std::string_view asset) const {
  const auto it = liquidation_thresholds.find(asset);
  if (it == liquidation_thresholds.end()) {
    throw ValidationError("no liquidation threshold for asset '" + std::string(asset) + "'");
  }
  return it->second;
}

double MarketConfig::bank_rate_at(std::int64_t timestamp) const {
  if (bank_rate_schedule.empty() || timestamp < bank_rate_schedule.front().effective_from) {
    throw ValidationError("no bank rate in effect at " + std::to_string(timestamp));
  }
  double alpha = bank_rate_schedule.front().alpha;
  for (const BankRate& r : bank_rate_schedule) {
    if (r.effective_from > timestamp) break;
    alpha = r.alpha;
  }
  return alpha;
}

MarketConfig market_config_from_json(const nlohmann::json& doc, std::string_view platform) {
  try {
    MarketConfig config;
    config.platform = platform.empty() ? doc.at("default_platform").get<std::string>()
                                       : std::string(platform);
    const auto& platforms = doc.at("platforms");
    if (!platforms.contains(config.platform)) {
      throw ValidationError("unknown platform '" + config.platform + "'");
    }
    for (const auto& [asset, ratio] : platforms.at(config.platform).items()) {
      config.liquidation_thresholds.emplace(asset, ratio.get<double>());
    }
    if (doc.contains("bank_rate_schedule")) {
      for (const auto& row : doc.at("bank_rate_schedule")) {
        config.bank_rate_schedule.push_back(
            {row.at("effective_from").get<std::int64_t>(), row.at("alpha").get<double>()});
      }
    }
    config.validate();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid market config: ") + e.what());
  }
}

MarketConfig load_market_config(const std::filesystem::path& path, std::string_view platform) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open market config " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("invalid market config " + path.string() + ": " + e.what());
  }
  return market_config_from_json(doc, platform);
}

}  // namespace lowcoll::ledger
