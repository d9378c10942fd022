#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lowcoll/ledger/timeline.hpp"

namespace lowcoll::credit {

inline constexpr std::int64_t kWindowSeconds = 14 * ledger::kSecondsPerDay;
inline constexpr int kWindowDays = 14;
inline constexpr int kFeatureCount = 4;

/// Column order of every feature matrix and of persisted models.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "age_days", "tx_2w", "pay_2w", "coll_debt_2w"};

struct FeatureVector {
  double account_age_days = 0.0;
  std::int64_t tx_count_2w = 0;
  std::int64_t payment_count_2w = 0;
  double avg_daily_coll_to_debt_2w = 0.0;

  Eigen::Vector4d as_vector() const {
    return {account_age_days, static_cast<double>(tx_count_2w),
            static_cast<double>(payment_count_2w), avg_daily_coll_to_debt_2w};
  }
};

/// Features of an account as seen at `as_of`, over the window (as_of - 14d, as_of].
/// Throws ValidationError when `as_of` precedes the account's first event.
FeatureVector extract_features(const ledger::AccountTimeline& timeline, std::int64_t as_of);

struct LabeledObservation {
  std::string account;
  std::int64_t as_of = 0;
  FeatureVector features;
  /// 1 when repayments over (as_of, as_of + 14d] cover less than half of the debt.
  int label = 0;
  Money debt_at_as_of;
};

struct ObservationConfig {
  std::int64_t cadence_seconds = kWindowSeconds;
  /// Keep only each account's latest labeled snapshot.
  bool dedupe_per_account = false;
};

/// Snapshots at dataset_start + k * cadence (k >= 1) with a full 14-day
/// lookahead; one observation per account in debt at the snapshot. Sorted by
/// (account, as_of). Throws ValidationError when the data spans under 28 days.
std::vector<LabeledObservation> build_observations(const ledger::TimelineMap& timelines,
                                                   const ObservationConfig& config = {});

/// Label rule on exact integers: paid down at least half <=> 2 * repaid >= debt.
int non_paydown_label(Money debt, Money repaid);

/// n x 4 matrix of raw features in kFeatureNames order.
Eigen::MatrixXd feature_matrix(std::span<const LabeledObservation> observations);
Eigen::VectorXd label_vector(std::span<const LabeledObservation> observations);

/// CSV with header account,as_of,age_days,tx_2w,pay_2w,coll_debt_2w,label
void write_observations_csv(std::ostream& out, std::span<const LabeledObservation> observations);

}  // namespace lowcoll::credit
