#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lowcoll/ledger/timeline.hpp"

namespace lowcoll::ledger {

/// Per-account activity summary. Loan-derived fields are empty for accounts
/// that never borrowed.
struct AccountStats {
  std::string account;
  int loan_count = 0;
  int payment_count = 0;
  int tx_count = 0;
  int withdraw_collateral_count = 0;
  Money total_loaned;
  Money total_collateral;
  std::optional<Money> max_debt;
  std::optional<double> collateral_to_debt_at_max_debt;
  std::optional<double> avg_daily_collateral_to_debt;
  std::optional<double> hours_to_first_payment;
  std::optional<double> hours_to_last_payment;
};

struct CdfPoint {
  double value = 0.0;
  double cum_fraction = 0.0;
};

/// Bucketed interaction counts: how many accounts fall in each count range.
struct HistogramRow {
  std::string bucket;
  int loans = 0;
  int payments = 0;
  int transactions = 0;
};

struct DatasetTotals {
  int accounts = 0;
  int borrowers = 0;
  int loans = 0;
  int payments = 0;
  int withdraw_collateral = 0;
  int transactions = 0;
  Money total_loaned;
  Money total_collateral;
  std::int64_t first_event_time = 0;
  std::int64_t last_event_time = 0;
};

struct AccountStatsReport {
  std::vector<AccountStats> accounts;  // sorted by account id
  /// Metric name -> empirical CDF over accounts where the metric is defined.
  std::map<std::string, std::vector<CdfPoint>> cdfs;
  std::vector<HistogramRow> histogram;
  DatasetTotals totals;
};

/// Names of all metrics that receive a CDF, in output order.
const std::vector<std::string>& stats_metric_names();

/// Per-account statistics and dataset-level CDFs. Daily averages are sampled
/// backwards from the dataset's last event time. Throws ValidationError on an
/// empty map.
AccountStatsReport compute_account_stats(const TimelineMap& timelines);

/// Empirical CDF: distinct sorted values with the fraction of samples <= value.
std::vector<CdfPoint> empirical_cdf(std::vector<double> values);

nlohmann::json to_json(const AccountStatsReport& report);

/// Writes stats.json, accounts.csv, interactions_histogram.csv and one
/// cdf_<metric>.csv per metric into `dir`. Returns the written file names.
std::vector<std::string> write_stats_files(const AccountStatsReport& report,
                                           const std::filesystem::path& dir);

}  // namespace lowcoll::ledger
