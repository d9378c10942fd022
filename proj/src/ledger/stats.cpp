#include "lowcoll/ledger/stats.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "lowcoll/error.hpp"
#include "lowcoll/format.hpp"

namespace lowcoll::ledger {

namespace {

using json = nlohmann::json;

struct Bucket {
  const char* label;
  int lo;
  int hi;
};

constexpr std::array<Bucket, 11> kBuckets{{{"0", 0, 0},
                                           {"1", 1, 1},
                                           {"2", 2, 2},
                                           {"3-5", 3, 5},
                                           {"6-10", 6, 10},
                                           {"11-20", 11, 20},
                                           {"21-40", 21, 40},
                                           {"41-100", 41, 100},
                                           {"101-200", 101, 200},
                                           {"201-300", 201, 300},
                                           {"301+", 301, INT32_MAX}}};

std::size_t bucket_index(int count) {
  for (std::size_t i = 0; i < kBuckets.size(); ++i) {
    if (count >= kBuckets[i].lo && count <= kBuckets[i].hi) return i;
  }
  return kBuckets.size() - 1;
}

AccountStats stats_for(const AccountTimeline& timeline, std::int64_t dataset_end) {
  AccountStats s;
  s.account = timeline.account();
  std::optional<std::int64_t> first_loan;
  std::optional<std::int64_t> first_payment;
  std::optional<std::int64_t> last_payment;
  for (const TimelineEntry& entry : timeline.entries()) {
    ++s.tx_count;
    const std::int64_t t = entry.event.timestamp;
    if (entry.is_loan()) {
      ++s.loan_count;
      s.total_loaned += entry.loan_portion;
      if (!first_loan) first_loan = t;
    }
    if (entry.is_payment()) {
      ++s.payment_count;
      if (!first_payment) first_payment = t;
      last_payment = t;
    }
    if (entry.event.kind == EventKind::SupplyCollateral) s.total_collateral += entry.event.usd_value;
    if (entry.event.kind == EventKind::WithdrawCollateral) ++s.withdraw_collateral_count;
  }
  if (s.loan_count == 0) return s;

  Money max_debt;
  std::int64_t max_debt_time = 0;
  for (const StepPoint& p : timeline.balance_series()) {
    const Money debt = p.value.is_negative() ? -p.value : Money{};
    if (debt > max_debt) {
      max_debt = debt;
      max_debt_time = p.time;
    }
  }
  if (max_debt > Money{}) {
    s.max_debt = max_debt;
    s.collateral_to_debt_at_max_debt =
        capped_collateral_to_debt(timeline.collateral_at(max_debt_time), max_debt);
  }
  s.avg_daily_collateral_to_debt = average_daily_collateral_to_debt(timeline, dataset_end);
  if (first_payment) {
    s.hours_to_first_payment =
        static_cast<double>(*first_payment - *first_loan) / static_cast<double>(kSecondsPerHour);
    s.hours_to_last_payment =
        static_cast<double>(*last_payment - *first_loan) / static_cast<double>(kSecondsPerHour);
  }
  return s;
}

using Extractor = std::optional<double> (*)(const AccountStats&);

struct Metric {
  const char* name;
  Extractor extract;
};

std::optional<double> usd(std::optional<Money> m) {
  if (!m) return std::nullopt;
  return m->to_usd();
}

const std::array<Metric, 10> kMetrics{{
    {"loan_count", [](const AccountStats& s) -> std::optional<double> { return s.loan_count; }},
    {"payment_count", [](const AccountStats& s) -> std::optional<double> { return s.payment_count; }},
    {"tx_count", [](const AccountStats& s) -> std::optional<double> { return s.tx_count; }},
    {"total_loaned_usd",
     [](const AccountStats& s) -> std::optional<double> {
       return s.loan_count > 0 ? usd(s.total_loaned) : std::nullopt;
     }},
    {"total_collateral_usd",
     [](const AccountStats& s) -> std::optional<double> {
       return s.loan_count > 0 ? usd(s.total_collateral) : std::nullopt;
     }},
    {"max_debt_usd", [](const AccountStats& s) { return usd(s.max_debt); }},
    {"coll_to_debt_at_max_debt", [](const AccountStats& s) { return s.collateral_to_debt_at_max_debt; }},
    {"avg_daily_coll_to_debt", [](const AccountStats& s) { return s.avg_daily_collateral_to_debt; }},
    {"hours_to_first_payment", [](const AccountStats& s) { return s.hours_to_first_payment; }},
    {"hours_to_last_payment", [](const AccountStats& s) { return s.hours_to_last_payment; }},
}};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_csv(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << content;
}

}  // namespace

const std::vector<std::string>& stats_metric_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const Metric& m : kMetrics) out.emplace_back(m.name);
    return out;
  }();
  return names;
}

std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> cdf;
  const auto n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    cdf.push_back({values[i], static_cast<double>(i + 1) / n});
  }
  return cdf;
}

AccountStatsReport compute_account_stats(const TimelineMap& timelines) {
  if (timelines.empty()) throw ValidationError("no accounts to summarize");
  AccountStatsReport report;
  DatasetTotals& totals = report.totals;
  totals.first_event_time = INT64_MAX;
  for (const auto& [_, timeline] : timelines) {
    totals.first_event_time = std::min(totals.first_event_time, timeline.first_tx_time());
    totals.last_event_time = std::max(totals.last_event_time, timeline.last_tx_time());
  }

  std::vector<std::array<int, 3>> buckets(kBuckets.size(), {0, 0, 0});
  for (const auto& [_, timeline] : timelines) {
    AccountStats s = stats_for(timeline, totals.last_event_time);
    ++totals.accounts;
    if (s.loan_count > 0) ++totals.borrowers;
    totals.loans += s.loan_count;
    totals.payments += s.payment_count;
    totals.withdraw_collateral += s.withdraw_collateral_count;
    totals.transactions += s.tx_count;
    totals.total_loaned += s.total_loaned;
    totals.total_collateral += s.total_collateral;
    ++buckets[bucket_index(s.loan_count)][0];
    ++buckets[bucket_index(s.payment_count)][1];
    ++buckets[bucket_index(s.tx_count)][2];
    report.accounts.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < kBuckets.size(); ++i) {
    report.histogram.push_back({kBuckets[i].label, buckets[i][0], buckets[i][1], buckets[i][2]});
  }
  for (const Metric& metric : kMetrics) {
    std::vector<double> values;
    for (const AccountStats& s : report.accounts) {
      if (const auto v = metric.extract(s)) values.push_back(*v);
    }
    report.cdfs[metric.name] = empirical_cdf(std::move(values));
  }
  return report;
}

json to_json(const AccountStatsReport& report) {
  json accounts = json::array();
  for (const AccountStats& s : report.accounts) {
    accounts.push_back({
        {"account", s.account},
        {"loan_count", s.loan_count},
        {"payment_count", s.payment_count},
        {"tx_count", s.tx_count},
        {"total_loaned_usd", s.total_loaned.to_string()},
        {"total_collateral_usd", s.total_collateral.to_string()},
        {"max_debt_usd", s.max_debt ? json(s.max_debt->to_string()) : json(nullptr)},
        {"coll_to_debt_at_max_debt", optional_json(s.collateral_to_debt_at_max_debt)},
        {"avg_daily_coll_to_debt", optional_json(s.avg_daily_collateral_to_debt)},
        {"hours_to_first_payment", optional_json(s.hours_to_first_payment)},
        {"hours_to_last_payment", optional_json(s.hours_to_last_payment)},
    });
  }
  json cdfs = json::object();
  for (const auto& [name, points] : report.cdfs) {
    json rows = json::array();
    for (const CdfPoint& p : points) rows.push_back({p.value, p.cum_fraction});
    cdfs[name] = rows;
  }
  json histogram = json::array();
  for (const HistogramRow& row : report.histogram) {
    histogram.push_back({{"bucket", row.bucket},
                         {"loans", row.loans},
                         {"payments", row.payments},
                         {"transactions", row.transactions}});
  }
  const DatasetTotals& t = report.totals;
  return {
      {"totals",
       {{"accounts", t.accounts},
        {"borrowers", t.borrowers},
        {"loans", t.loans},
        {"payments", t.payments},
        {"withdraw_collateral", t.withdraw_collateral},
        {"transactions", t.transactions},
        {"total_loaned_usd", t.total_loaned.to_string()},
        {"total_collateral_usd", t.total_collateral.to_string()},
        {"first_event_time", t.first_event_time},
        {"last_event_time", t.last_event_time}}},
      {"accounts", accounts},
      {"histogram", histogram},
      {"cdfs", cdfs},
  };
}

std::vector<std::string> write_stats_files(const AccountStatsReport& report,
                                           const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;

  write_file(dir / "stats.json", to_json(report).dump(2) + "\n");
  written.emplace_back("stats.json");

  std::ostringstream accounts;
  accounts << "account,loans,payments,transactions,total_loaned_usd,total_collateral_usd,"
              "max_debt_usd,coll_to_debt_at_max_debt,avg_daily_coll_to_debt,"
              "hours_to_first_payment,hours_to_last_payment\n";
  for (const AccountStats& s : report.accounts) {
    accounts << s.account << ',' << s.loan_count << ',' << s.payment_count << ',' << s.tx_count
             << ',' << s.total_loaned.to_string() << ',' << s.total_collateral.to_string() << ','
             << (s.max_debt ? s.max_debt->to_string() : "") << ','
             << optional_csv(s.collateral_to_debt_at_max_debt) << ','
             << optional_csv(s.avg_daily_collateral_to_debt) << ','
             << optional_csv(s.hours_to_first_payment) << ','
             << optional_csv(s.hours_to_last_payment) << '\n';
  }
  write_file(dir / "accounts.csv", accounts.str());
  written.emplace_back("accounts.csv");

  std::ostringstream histogram;
  histogram << "bucket,loans,payments,transactions\n";
  for (const HistogramRow& row : report.histogram) {
    histogram << row.bucket << ',' << row.loans << ',' << row.payments << ',' << row.transactions
              << '\n';
  }
  write_file(dir / "interactions_histogram.csv", histogram.str());
  written.emplace_back("interactions_histogram.csv");

  for (const std::string& name : stats_metric_names()) {
    std::ostringstream csv;
    csv << "value,cum_fraction\n";
    for (const CdfPoint& p : report.cdfs.at(name)) {
      csv << format_double(p.value) << ',' << format_double(p.cum_fraction) << '\n';
    }
    const std::string file = "cdf_" + name + ".csv";
    write_file(dir / file, csv.str());
    written.push_back(file);
  }
  return written;
}

}  // namespace lowcoll::ledger
