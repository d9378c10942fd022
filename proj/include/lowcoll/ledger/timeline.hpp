#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lowcoll/ledger/event.hpp"
#include "lowcoll/money.hpp"

namespace lowcoll::ledger {

inline constexpr std::int64_t kSecondsPerDay = 86'400;
inline constexpr std::int64_t kSecondsPerHour = 3'600;

/// Collateral-to-debt ratios are clipped to this value.
inline constexpr double kCollateralToDebtCap = 20.0;

/// One replayed event with the balance split it induced.
struct TimelineEntry {
  EventRecord event;
  /// WithdrawUSDC: part of the withdrawal that creates or extends debt.
  Money loan_portion;
  /// SupplyUSDC: part of the deposit that pays off existing debt.
  Money repayment_portion;
  Money balance_after;     // signed USDC balance, negative = debt
  Money collateral_after;  // supply-time valuation

  bool is_loan() const { return loan_portion > Money{}; }
  bool is_payment() const { return repayment_portion > Money{}; }
};

/// Value of a step function from `time` onwards (after all events at `time`).
struct StepPoint {
  std::int64_t time = 0;
  Money value;

  friend bool operator==(const StepPoint&, const StepPoint&) = default;
};

/// Immutable replay of one account's events.
class AccountTimeline {
 public:
  const std::string& account() const { return account_; }
  std::span<const TimelineEntry> entries() const { return entries_; }

  /// One point per distinct event timestamp.
  std::span<const StepPoint> balance_series() const { return balance_series_; }
  std::span<const StepPoint> collateral_series() const { return collateral_series_; }

  std::int64_t first_tx_time() const { return entries_.front().event.timestamp; }
  std::int64_t last_tx_time() const { return entries_.back().event.timestamp; }

  /// Balance after every event with timestamp <= t; zero before the first event.
  Money balance_at(std::int64_t t) const;
  Money collateral_at(std::int64_t t) const;
  Money debt_at(std::int64_t t) const;

  Money final_balance() const { return entries_.back().balance_after; }

  friend std::map<std::string, AccountTimeline> build_timelines(std::span<const EventRecord>);

 private:
  std::string account_;
  std::vector<TimelineEntry> entries_;
  std::vector<StepPoint> balance_series_;
  std::vector<StepPoint> collateral_series_;
};

using TimelineMap = std::map<std::string, AccountTimeline>;

/// Replays events per account in timestamp order (stable on ties). Only the
/// part of a USDC withdrawal that drives the balance below zero counts as
/// loan principal; only the part of a USDC deposit that lifts a negative
/// balance counts as repayment. Throws LedgerError on collateral underflow.
TimelineMap build_timelines(std::span<const EventRecord> events);

/// Average of end-of-day collateral/debt ratios (each capped) sampled at
/// `end`, `end - 1d`, ... The sampling stops after `max_days` samples or
/// before the account's first event. Samples with no debt are skipped; when
/// no sample carries debt the cap is returned.
double average_daily_collateral_to_debt(const AccountTimeline& timeline, std::int64_t end,
                                        std::optional<int> max_days = std::nullopt);

/// collateral / debt clipped to [0, cap]; `debt` must be positive.
double capped_collateral_to_debt(Money collateral, Money debt);

}  // namespace lowcoll::ledger
