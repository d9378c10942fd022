#include "lowcoll/credit/features.hpp"

#include <algorithm>
#include <ostream>

#include "lowcoll/error.hpp"
#include "lowcoll/format.hpp"

namespace lowcoll::credit {

FeatureVector extract_features(const ledger::AccountTimeline& timeline, std::int64_t as_of) {
  if (as_of < timeline.first_tx_time()) {
    throw ValidationError("as_of precedes the first event of account " + timeline.account());
  }
  FeatureVector f;
  f.account_age_days = static_cast<double>(as_of - timeline.first_tx_time()) /
                       static_cast<double>(ledger::kSecondsPerDay);
  const std::int64_t window_start = as_of - kWindowSeconds;
  for (const ledger::TimelineEntry& entry : timeline.entries()) {
    const std::int64_t t = entry.event.timestamp;
    if (t <= window_start) continue;
    if (t > as_of) break;
    ++f.tx_count_2w;
    if (entry.is_payment()) ++f.payment_count_2w;
  }
  f.avg_daily_coll_to_debt_2w = ledger::average_daily_collateral_to_debt(timeline, as_of, kWindowDays);
  return f;
}

int non_paydown_label(Money debt, Money repaid) {
  return (repaid + repaid) < debt ? 1 : 0;
}

std::vector<LabeledObservation> build_observations(const ledger::TimelineMap& timelines,
                                                   const ObservationConfig& config) {
  if (config.cadence_seconds <= 0) throw ValidationError("snapshot cadence must be positive");
  if (timelines.empty()) return {};
  std::int64_t start = INT64_MAX;
  std::int64_t end = INT64_MIN;
  for (const auto& [_, timeline] : timelines) {
    start = std::min(start, timeline.first_tx_time());
    end = std::max(end, timeline.last_tx_time());
  }
  if (end - start < 2 * kWindowSeconds) {
    throw ValidationError("observations need at least 28 days of data");
  }

  std::vector<LabeledObservation> observations;
  for (const auto& [account, timeline] : timelines) {
    std::vector<LabeledObservation> own;
    for (std::int64_t as_of = start + config.cadence_seconds; as_of + kWindowSeconds <= end;
         as_of += config.cadence_seconds) {
      const Money debt = timeline.debt_at(as_of);
      if (debt.is_zero()) continue;
      Money repaid;
      for (const ledger::TimelineEntry& entry : timeline.entries()) {
        const std::int64_t t = entry.event.timestamp;
        if (t > as_of && t <= as_of + kWindowSeconds) repaid += entry.repayment_portion;
      }
      own.push_back({account, as_of, extract_features(timeline, as_of), non_paydown_label(debt, repaid), debt});
    }
    if (config.dedupe_per_account && own.size() > 1) own.erase(own.begin(), own.end() - 1);
    observations.insert(observations.end(), own.begin(), own.end());
  }
  // Map iteration already yields (account, as_of) order.
  return observations;
}

Eigen::MatrixXd feature_matrix(std::span<const LabeledObservation> observations) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(observations.size()), kFeatureCount);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = observations[i].features.as_vector().transpose();
  }
  return x;
}

Eigen::VectorXd label_vector(std::span<const LabeledObservation> observations) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(observations.size()));
  for (std::size_t i = 0; i < observations.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = observations[i].label;
  }
  return y;
}

void write_observations_csv(std::ostream& out, std::span<const LabeledObservation> observations) {
  out << "account,as_of,age_days,tx_2w,pay_2w,coll_debt_2w,label\n";
  for (const LabeledObservation& o : observations) {
    out << o.account << ',' << o.as_of << ',' << format_double(o.features.account_age_days) << ','
        << o.features.tx_count_2w << ',' << o.features.payment_count_2w << ','
        << format_double(o.features.avg_daily_coll_to_debt_2w) << ',' << o.label << '\n';
  }
}

}  // namespace lowcoll::credit
