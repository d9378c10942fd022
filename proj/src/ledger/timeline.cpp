#include "lowcoll/ledger/timeline.hpp"

#include <algorithm>

#include "lowcoll/error.hpp"

namespace lowcoll::ledger {

namespace {

Money value_at(std::span<const StepPoint> series, std::int64_t t) {
  const auto it = std::upper_bound(series.begin(), series.end(), t,
                                   [](std::int64_t time, const StepPoint& p) { return time < p.time; });
  if (it == series.begin()) return Money{};
  return std::prev(it)->value;
}

void push_step(std::vector<StepPoint>& series, std::int64_t time, Money value) {
  if (!series.empty() && series.back().time == time) {
    series.back().value = value;
  } else {
    series.push_back({time, value});
  }
}

}  // namespace

Money AccountTimeline::balance_at(std::int64_t t) const { return value_at(balance_series_, t); }

Money AccountTimeline::collateral_at(std::int64_t t) const { return value_at(collateral_series_, t); }

Money AccountTimeline::debt_at(std::int64_t t) const {
  const Money balance = balance_at(t);
  return balance.is_negative() ? -balance : Money{};
}

TimelineMap build_timelines(std::span<const EventRecord> events) {
  std::vector<const EventRecord*> order;
  order.reserve(events.size());
  for (const EventRecord& e : events) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(), [](const EventRecord* a, const EventRecord* b) {
    return a->timestamp < b->timestamp;
  });

  TimelineMap timelines;
  for (const EventRecord* e : order) {
    auto [it, inserted] = timelines.try_emplace(e->account);
    AccountTimeline& timeline = it->second;
    if (inserted) timeline.account_ = e->account;

    const Money balance = timeline.entries_.empty() ? Money{} : timeline.entries_.back().balance_after;
    const Money collateral =
        timeline.entries_.empty() ? Money{} : timeline.entries_.back().collateral_after;

    TimelineEntry entry{*e, Money{}, Money{}, balance, collateral};
    switch (e->kind) {
      case EventKind::SupplyUsdc: {
        const Money debt = balance.is_negative() ? -balance : Money{};
        entry.repayment_portion = min(e->usd_value, debt);
        entry.balance_after = balance + e->usd_value;
        break;
      }
      case EventKind::WithdrawUsdc: {
        const Money positive = max(balance, Money{});
        entry.loan_portion = e->usd_value - min(e->usd_value, positive);
        entry.balance_after = balance - e->usd_value;
        break;
      }
      case EventKind::SupplyCollateral:
        entry.collateral_after = collateral + e->usd_value;
        break;
      case EventKind::WithdrawCollateral:
        if (e->usd_value > collateral) {
          throw LedgerError("collateral underflow for account " + e->account + " at timestamp " +
                            std::to_string(e->timestamp));
        }
        entry.collateral_after = collateral - e->usd_value;
        break;
    }
    timeline.entries_.push_back(entry);
    push_step(timeline.balance_series_, e->timestamp, entry.balance_after);
    push_step(timeline.collateral_series_, e->timestamp, entry.collateral_after);
  }
  return timelines;
}

double capped_collateral_to_debt(Money collateral, Money debt) {
  if (debt <= Money{}) throw ValidationError("collateral-to-debt needs positive debt");
  const double ratio = static_cast<double>(collateral.micros()) / static_cast<double>(debt.micros());
  return std::clamp(ratio, 0.0, kCollateralToDebtCap);
}

double average_daily_collateral_to_debt(const AccountTimeline& timeline, std::int64_t end,
                                        std::optional<int> max_days) {
  double sum = 0.0;
  int samples = 0;
  const int limit = max_days.value_or(INT32_MAX);
  for (int day = 0; day < limit; ++day) {
    const std::int64_t t = end - static_cast<std::int64_t>(day) * kSecondsPerDay;
    if (t < timeline.first_tx_time()) break;
    const Money debt = timeline.debt_at(t);
    if (debt.is_zero()) continue;
    sum += capped_collateral_to_debt(timeline.collateral_at(t), debt);
    ++samples;
  }
  return samples == 0 ? kCollateralToDebtCap : sum / samples;
}

}  // namespace lowcoll::ledger
