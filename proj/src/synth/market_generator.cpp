#include "lowcoll/synth/market_generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "lowcoll/credit/features.hpp"
#include "lowcoll/credit/normal.hpp"
#include "lowcoll/error.hpp"
#include "lowcoll/format.hpp"
#include "lowcoll/ledger/timeline.hpp"
#include "lowcoll/rng.hpp"

namespace lowcoll::synth {

namespace {

using ledger::EventKind;
using ledger::EventRecord;
using ledger::kSecondsPerDay;
using ledger::kSecondsPerHour;

constexpr std::int64_t kPeriod = credit::kWindowSeconds;

struct CollateralAsset {
  const char* symbol;
  double price_usd;
};
constexpr std::array<CollateralAsset, 5> kAssets{{
    {"WETH", 1600.0}, {"WBTC", 20000.0}, {"UNI", 6.0}, {"LINK", 7.0}, {"COMP", 50.0}}};

// Stream tags for the counter-based generator.
enum Stream : std::uint64_t { kLender = 1, kBorrowerSetup = 2, kBorrowerPeriod = 3 };

std::string account_id(std::uint64_t seed, std::uint64_t index, bool lender) {
  char buf[43];
  std::snprintf(buf, sizeof buf, "0x%016llx%016llx%08llx",
                static_cast<unsigned long long>(splitmix64(seed ^ (lender ? 0x1e0d : 0xb0))),
                static_cast<unsigned long long>(splitmix64(index + (lender ? 1u << 20 : 0))),
                static_cast<unsigned long long>(index));
  return buf;
}

Money usd(double value) {
  return Money::from_micros(static_cast<std::int64_t>(std::llround(value * 1e6)));
}

EventRecord usdc_event(std::int64_t ts, const std::string& account, EventKind kind, Money amount) {
  return {ts, account, kind, std::string(ledger::kBaseAsset),
          ledger::TokenAmount::parse(amount.to_string(), 6), amount};
}

EventRecord collateral_event(std::int64_t ts, const std::string& account, EventKind kind,
                             const CollateralAsset& asset, Money value) {
  const std::string amount = format_fixed(value.to_usd() / asset.price_usd, 6);
  return {ts, account, kind, asset.symbol, ledger::TokenAmount::parse(amount, 18), value};
}

std::int64_t time_in(CounterRng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo)));
}

struct Borrower {
  std::string account;
  const CollateralAsset* asset = nullptr;
  std::int64_t entry_period = 0;
  std::int64_t entry_time = 0;
  Money collateral;
  Money balance;  // signed, negative = debt
  std::vector<EventRecord> events;
};

// Fresh borrowing against existing or newly posted collateral.
void take_loan(Borrower& b, CounterRng& rng, std::int64_t t, std::vector<EventRecord>& out) {
  const Money debt = b.balance.is_negative() ? -b.balance : Money{};
  const double ratio = rng.uniform(1.3, 4.5);
  double room = b.collateral.to_usd() / ratio - debt.to_usd();
  if (room < 50.0) {
    const Money top_up = usd(std::exp(rng.uniform(std::log(200.0), std::log(50000.0))));
    out.push_back(collateral_event(t, b.account, EventKind::SupplyCollateral, *b.asset, top_up));
    b.collateral += top_up;
    t += 1 + static_cast<std::int64_t>(rng.below(2 * kSecondsPerHour));
    room = b.collateral.to_usd() / ratio - debt.to_usd();
  }
  const Money amount = usd(std::max(50.0, room * rng.uniform(0.6, 1.0)));
  out.push_back(usdc_event(t, b.account, EventKind::WithdrawUsdc, amount));
  b.balance -= amount;
}

}  // namespace

GeneratedMarket generate_market(const MarketGeneratorConfig& config) {
  if (config.n_borrowers < 1 || config.n_lenders < 2 || config.periods < 3) {
    throw ValidationError("generator needs >= 1 borrower, >= 2 lenders and >= 3 periods");
  }
  const std::int64_t start = config.start_time;
  const std::int64_t end = start + config.periods * kPeriod;
  const auto& theta = config.model.theta;
  GeneratedMarket market;
  std::vector<EventRecord> events;

  // Lenders supply liquidity; two of them pin the observed time range.
  for (int i = 0; i < config.n_lenders; ++i) {
    CounterRng rng(config.seed, kLender, static_cast<std::uint64_t>(i));
    const std::string account = account_id(config.seed, static_cast<std::uint64_t>(i), true);
    std::int64_t t = i == 0 ? start : time_in(rng, start + 1, end - kPeriod);
    Money balance = usd(std::exp(rng.uniform(std::log(1e4), std::log(1e6))));
    events.push_back(usdc_event(t, account, EventKind::SupplyUsdc, balance));
    const int moves = static_cast<int>(rng.below(4));
    for (int m = 0; m < moves; ++m) {
      t = time_in(rng, t + kSecondsPerHour, std::min(end, t + 30 * kSecondsPerDay));
      if (rng.bernoulli(0.5)) {
        const Money out = usd(balance.to_usd() * rng.uniform(0.1, 0.9));
        events.push_back(usdc_event(t, account, EventKind::WithdrawUsdc, out));
        balance -= out;
      } else {
        const Money in = usd(std::exp(rng.uniform(std::log(1e3), std::log(2e5))));
        events.push_back(usdc_event(t, account, EventKind::SupplyUsdc, in));
        balance += in;
      }
    }
    if (i == 1) events.push_back(usdc_event(end, account, EventKind::SupplyUsdc, usd(5000.0)));
  }

  std::vector<Borrower> borrowers(static_cast<std::size_t>(config.n_borrowers));
  for (int i = 0; i < config.n_borrowers; ++i) {
    CounterRng rng(config.seed, kBorrowerSetup, static_cast<std::uint64_t>(i));
    Borrower& b = borrowers[static_cast<std::size_t>(i)];
    b.account = account_id(config.seed, static_cast<std::uint64_t>(i), false);
    b.asset = &kAssets[rng.below(kAssets.size())];
    b.entry_period = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(config.periods - 1)));
    const std::int64_t lo = start + b.entry_period * kPeriod + kSecondsPerHour;
    b.entry_time = time_in(rng, lo, lo + 11 * kSecondsPerDay);
  }

  for (int p = 0; p < config.periods; ++p) {
    const std::int64_t period_start = start + p * kPeriod;
    for (std::size_t i = 0; i < borrowers.size(); ++i) {
      Borrower& b = borrowers[i];
      if (b.entry_period > p) continue;
      CounterRng rng(config.seed, kBorrowerPeriod, (static_cast<std::uint64_t>(i) << 8) | static_cast<std::uint64_t>(p));
      std::vector<EventRecord> fresh;

      if (b.entry_period == p) {
        std::int64_t t = b.entry_time;
        if (rng.bernoulli(0.15)) {
          const Money deposit = usd(rng.uniform(20.0, 500.0));
          fresh.push_back(usdc_event(t, b.account, EventKind::SupplyUsdc, deposit));
          b.balance += deposit;
          t += 1 + static_cast<std::int64_t>(rng.below(kSecondsPerHour));
        }
        const Money posted = usd(std::exp(rng.uniform(std::log(300.0), std::log(200000.0))));
        fresh.push_back(collateral_event(t, b.account, EventKind::SupplyCollateral, *b.asset, posted));
        b.collateral += posted;
        t += kSecondsPerHour / 2 + static_cast<std::int64_t>(rng.below(48 * kSecondsPerHour));
        take_loan(b, rng, t, fresh);
      } else if (p >= 1) {
        // Snapshot at period_start, decided from the account's own history.
        const Money debt = b.balance.is_negative() ? -b.balance : Money{};
        std::int64_t t = period_start + kSecondsPerHour;
        if (!debt.is_zero()) {
          const ledger::TimelineMap timelines = ledger::build_timelines(b.events);
          const credit::FeatureVector f = credit::extract_features(timelines.begin()->second, period_start);
          const double eta = theta[0] + theta[1] * f.account_age_days + theta[2] * f.tx_count_2w +
                             theta[3] * f.payment_count_2w + theta[4] * f.avg_daily_coll_to_debt_2w;
          const bool defaults = rng.bernoulli(credit::normal_cdf(eta));
          ++market.snapshots;
          if (defaults) ++market.snapshot_positives;

          // Half of the debt, rounded up, is the paydown boundary.
          const Money half = Money::from_micros((debt.micros() + 1) / 2);
          Money target;
          if (defaults) {
            if (rng.bernoulli(0.5)) target = usd(debt.to_usd() * rng.uniform(0.05, 0.45));
            target = min(target, half - Money::from_micros(1));
          } else {
            target = rng.bernoulli(0.35) ? debt : max(half, usd(debt.to_usd() * rng.uniform(0.5, 1.0)));
            target = min(max(target, half), debt);
          }
          const int installments = target.is_zero() ? 0 : 1 + static_cast<int>(rng.below(defaults ? 1 : 3));
          Money remaining = target;
          for (int k = 0; k < installments; ++k) {
            t = time_in(rng, t + 1, t + 3 * kSecondsPerDay);
            const Money part = k + 1 == installments ? remaining : usd(remaining.to_usd() * rng.uniform(0.3, 0.6));
            if (part.is_zero()) continue;
            fresh.push_back(usdc_event(t, b.account, EventKind::SupplyUsdc, part));
            b.balance += part;
            remaining -= part;
          }
          if (rng.bernoulli(0.25)) {
            t = time_in(rng, t + 1, t + kSecondsPerDay);
            const Money top_up = usd(b.collateral.to_usd() * rng.uniform(0.05, 0.5));
            fresh.push_back(collateral_event(t, b.account, EventKind::SupplyCollateral, *b.asset, top_up));
            b.collateral += top_up;
          }
          if (b.balance.is_zero() && rng.bernoulli(0.5)) {
            t = time_in(rng, t + 1, t + kSecondsPerDay);
            const Money out = usd(b.collateral.to_usd() * rng.uniform(0.3, 1.0));
            fresh.push_back(collateral_event(t, b.account, EventKind::WithdrawCollateral, *b.asset, out));
            b.collateral -= out;
          }
          if (rng.bernoulli(defaults ? 0.2 : 0.45)) {
            t = time_in(rng, t + 1, t + kSecondsPerDay);
            take_loan(b, rng, t, fresh);
          }
        } else if (rng.bernoulli(0.35)) {
          t = time_in(rng, t, t + 8 * kSecondsPerDay);
          take_loan(b, rng, t, fresh);
        }
      }
      b.events.insert(b.events.end(), fresh.begin(), fresh.end());
      events.insert(events.end(), fresh.begin(), fresh.end());
    }
  }

  market.events = ledger::sort_events(std::move(events));
  return market;
}

}  // namespace lowcoll::synth
