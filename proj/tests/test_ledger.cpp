#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "lowcoll/error.hpp"
#include "lowcoll/ledger/event.hpp"
#include "lowcoll/ledger/market_config.hpp"
#include "lowcoll/ledger/stats.hpp"
#include "lowcoll/ledger/timeline.hpp"
#include "test_support.hpp"

using namespace lowcoll;
using namespace lowcoll::ledger;
using lowcoll::testing::fixture;
using lowcoll::testing::slurp;

namespace {

constexpr std::int64_t kT0 = 1661990400;
constexpr std::int64_t kDay = kSecondsPerDay;
const std::string kA = "0x" + std::string(40, 'a');
const std::string kB = "0x" + std::string(40, 'b');
const std::string kC = "0x" + std::string(40, 'c');

EventRecord usdc(std::int64_t ts, const std::string& account, EventKind kind, const char* usd) {
  return {ts, account, kind, "USDC", TokenAmount::parse(usd, 6), Money::parse(usd)};
}

EventRecord coll(std::int64_t ts, const std::string& account, EventKind kind, const char* usd) {
  return {ts, account, kind, "WETH", TokenAmount::parse("1", 18), Money::parse(usd)};
}

std::vector<EventRecord> fixture_events() {
  return parse_event_log(slurp(fixture("mini_market.jsonl")), LogFormat::Jsonl);
}

// Random event log that never underflows collateral.
std::vector<EventRecord> random_events(std::uint64_t seed, int n) {
  CounterRng rng(seed, 99, 0);
  std::vector<EventRecord> events;
  std::map<std::string, std::int64_t> collateral;
  std::set<std::int64_t> used;
  for (int i = 0; i < n; ++i) {
    std::int64_t ts;
    do {
      ts = kT0 + static_cast<std::int64_t>(rng.below(60 * kDay));
    } while (!used.insert(ts).second);
    const std::string account = "0x" + std::string(39, 'd') + static_cast<char>('0' + rng.below(5));
    const auto kind = static_cast<EventKind>(rng.below(4));
    const auto micros = static_cast<std::int64_t>(1 + rng.below(5'000'000'000ULL));
    EventRecord e{ts, account, kind, "USDC", TokenAmount::parse("1", 6), Money::from_micros(micros)};
    if (!is_usdc_event(kind)) e.asset = "WETH";
    events.push_back(e);
  }
  // Replace collateral withdrawals that would underflow (in time order) with supplies.
  std::vector<std::size_t> order(events.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return events[x].timestamp < events[y].timestamp; });
  for (std::size_t i : order) {
    EventRecord& e = events[i];
    if (e.kind == EventKind::SupplyCollateral) collateral[e.account] += e.usd_value.micros();
    if (e.kind == EventKind::WithdrawCollateral) {
      if (collateral[e.account] < e.usd_value.micros()) {
        e.kind = EventKind::SupplyCollateral;
        collateral[e.account] += e.usd_value.micros();
      } else {
        collateral[e.account] -= e.usd_value.micros();
      }
    }
  }
  return events;
}

std::string stats_json(const std::vector<EventRecord>& events) {
  return to_json(compute_account_stats(build_timelines(events))).dump(2);
}

}  // namespace

TEST(ParseEventLog, SingleWithdrawLine) {
  const auto events = parse_event_log(
      R"({"ts": 1661990400, "account": "0xAbC1", "kind": "withdraw_usdc", "asset": "USDC", "amount": "100", "usd": "100.00"})",
      LogFormat::Jsonl);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].kind, EventKind::WithdrawUsdc);
  EXPECT_EQ(events[0].usd_value.micros(), 100'000'000);
  EXPECT_EQ(events[0].account, "0xabc1");
}

TEST(ParseEventLog, EmptyAndCommentOnly) {
  EXPECT_TRUE(parse_event_log("", LogFormat::Jsonl).empty());
  EXPECT_TRUE(parse_event_log("# nothing\n\n", LogFormat::Jsonl).empty());
}

TEST(ParseEventLog, FixtureHasTwentyRecordsOverThreeAccounts) {
  const auto events = fixture_events();
  EXPECT_EQ(events.size(), 20u);
  std::set<std::string> accounts;
  for (const auto& e : events) accounts.insert(e.account);
  EXPECT_EQ(accounts.size(), 3u);
}

TEST(ParseEventLog, ErrorsCarryLineNumbers) {
  const std::string good =
      R"({"ts": 1, "account": "0x1", "kind": "supply_usdc", "asset": "USDC", "amount": "1", "usd": "1"})";
  auto line_of = [](const std::string& text) {
    try {
      parse_event_log(text, LogFormat::Jsonl);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of(good + "\n# c\n" + good + "\n{bad json\n"), 4u);
  EXPECT_EQ(line_of(R"({"ts": 1, "account": "0x1", "kind": "borrow", "asset": "USDC", "amount": "1", "usd": "1"})"), 1u);
  EXPECT_EQ(line_of(R"({"ts": 1, "account": "0x1", "kind": "supply_usdc", "asset": "USDC", "amount": "-1", "usd": "1"})"), 1u);
  EXPECT_EQ(line_of(R"({"ts": 1, "account": "0x1", "kind": "supply_usdc", "asset": "USDC", "amount": "1", "usd": "-1"})"), 1u);
  EXPECT_EQ(line_of(R"({"ts": 1, "account": "0x1", "kind": "supply_usdc", "asset": "WETH", "amount": "1", "usd": "1"})"), 1u);
  EXPECT_EQ(line_of(R"({"ts": 0, "account": "0x1", "kind": "supply_usdc", "asset": "USDC", "amount": "1", "usd": "1"})"), 1u);
  EXPECT_EQ(line_of(R"({"ts": 1, "account": "0x1", "kind": "supply_usdc", "asset": "USDC", "amount": "1", "usd": "1.0000001"})"), 1u);
}

TEST(ParseEventLog, CsvMatchesJsonl) {
  const auto events = fixture_events();
  const std::string csv = write_event_log(events, LogFormat::Csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "ts,account,kind,asset,amount,usd");
  EXPECT_EQ(parse_event_log(csv, LogFormat::Csv), events);
  EXPECT_THROW(parse_event_log("ts,account\n", LogFormat::Csv), ParseError);
}

TEST(ParseEventLog, RoundTrip) {
  const auto events = fixture_events();
  const std::string text = write_event_log(events, LogFormat::Jsonl);
  EXPECT_EQ(parse_event_log(text, LogFormat::Jsonl), events);
  EXPECT_EQ(text, slurp(fixture("mini_market.jsonl")));
  const auto random = random_events(5, 200);
  EXPECT_EQ(parse_event_log(write_event_log(random, LogFormat::Jsonl), LogFormat::Jsonl), random);
}

TEST(Timeline, LoanIsOnlyTheNegativeBalancePortion) {
  const auto t = build_timelines(std::vector<EventRecord>{
      usdc(10, kA, EventKind::SupplyUsdc, "50"), usdc(20, kA, EventKind::WithdrawUsdc, "120")});
  const auto& entries = t.at(kA).entries();
  EXPECT_EQ(entries[1].loan_portion, Money::from_usd(70));
  EXPECT_EQ(t.at(kA).final_balance(), Money::from_usd(-70));
}

TEST(Timeline, WithdrawalFromZeroIsAllDebt) {
  const auto t = build_timelines(std::vector<EventRecord>{usdc(10, kA, EventKind::WithdrawUsdc, "100")});
  EXPECT_EQ(t.at(kA).entries()[0].loan_portion, Money::from_usd(100));
  EXPECT_EQ(t.at(kA).final_balance(), Money::from_usd(-100));
}

TEST(Timeline, RepaymentStopsAtZero) {
  const auto t = build_timelines(std::vector<EventRecord>{
      usdc(10, kA, EventKind::WithdrawUsdc, "100"), usdc(20, kA, EventKind::SupplyUsdc, "150")});
  EXPECT_EQ(t.at(kA).entries()[1].repayment_portion, Money::from_usd(100));
  EXPECT_EQ(t.at(kA).final_balance(), Money::from_usd(50));
}

TEST(Timeline, CollateralUnderflowNamesAccountAndTime) {
  try {
    build_timelines(std::vector<EventRecord>{coll(10, kA, EventKind::SupplyCollateral, "10"),
                                             coll(77, kA, EventKind::WithdrawCollateral, "11")});
    FAIL() << "expected LedgerError";
  } catch (const LedgerError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find(kA), std::string::npos);
    EXPECT_NE(what.find("77"), std::string::npos);
  }
}

TEST(Timeline, TiesKeepInputOrder) {
  const auto t = build_timelines(std::vector<EventRecord>{
      usdc(10, kA, EventKind::WithdrawUsdc, "100"), usdc(10, kA, EventKind::SupplyUsdc, "100")});
  EXPECT_EQ(t.at(kA).entries()[0].event.kind, EventKind::WithdrawUsdc);
  EXPECT_EQ(t.at(kA).entries()[1].repayment_portion, Money::from_usd(100));
  ASSERT_EQ(t.at(kA).balance_series().size(), 1u);
  EXPECT_EQ(t.at(kA).balance_series()[0].value, Money{});
}

TEST(Timeline, StepFunctionsQueryByTime) {
  const auto t = build_timelines(fixture_events());
  const AccountTimeline& a = t.at(kA);
  EXPECT_EQ(a.balance_at(kT0 - 1), Money{});
  EXPECT_EQ(a.debt_at(kT0 + 14 * kDay), Money::from_usd(1000));
  EXPECT_EQ(a.collateral_at(kT0 + 22 * kDay), Money::from_usd(1800));
  EXPECT_EQ(a.final_balance(), Money::from_usd(-750));
}

TEST(Timeline, DailyRatioCapWhenNeverInDebt) {
  const auto t = build_timelines(fixture_events());
  EXPECT_DOUBLE_EQ(average_daily_collateral_to_debt(t.at(kC), kT0 + 30 * kDay), kCollateralToDebtCap);
  EXPECT_DOUBLE_EQ(capped_collateral_to_debt(Money::from_usd(100), Money::from_micros(1)), kCollateralToDebtCap);
  // Account B: 6 days at 250/70, 4 days at 2.5.
  EXPECT_NEAR(average_daily_collateral_to_debt(t.at(kB), kT0 + 30 * kDay), 22.0 / 7.0, 1e-12);
}

TEST(Timeline, ConservationAndExhaustiveSplit) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto events = random_events(seed, 150);
    const auto timelines = build_timelines(events);
    for (const auto& [account, timeline] : timelines) {
      std::int64_t supplied = 0, withdrawn = 0, loans = 0, repaid = 0, spent = 0;
      std::int64_t balance = 0;
      for (const auto& entry : timeline.entries()) {
        const std::int64_t v = entry.event.usd_value.micros();
        if (entry.event.kind == EventKind::SupplyUsdc) {
          supplied += v;
          repaid += entry.repayment_portion.micros();
          ASSERT_EQ(entry.repayment_portion.micros(), std::min(v, std::max<std::int64_t>(0, -balance)));
          balance += v;
        } else if (entry.event.kind == EventKind::WithdrawUsdc) {
          withdrawn += v;
          loans += entry.loan_portion.micros();
          spent += std::min(v, std::max<std::int64_t>(0, balance));
          balance -= v;
        }
        ASSERT_EQ(entry.balance_after.micros(), balance);
      }
      EXPECT_EQ(timeline.final_balance().micros(), supplied - withdrawn);
      EXPECT_EQ(loans + spent, withdrawn);
      (void)repaid;
    }
  }
}

TEST(Stats, FixtureMatchesHandComputedTable) {
  const auto expected = nlohmann::json::parse(slurp(fixture("mini_market.expected.json")));
  const auto report = compute_account_stats(build_timelines(fixture_events()));
  EXPECT_EQ(to_json(report), expected);
  const AccountStats& a = report.accounts[0];
  EXPECT_EQ(a.loan_count, 2);
  EXPECT_EQ(a.payment_count, 3);
  EXPECT_EQ(a.tx_count, 8);
  EXPECT_NEAR(*a.collateral_to_debt_at_max_debt, 2000.0 / 1200.0, 1e-15);
  EXPECT_DOUBLE_EQ(*a.hours_to_first_payment, 142.0);
  EXPECT_DOUBLE_EQ(*a.hours_to_last_payment, 562.0);
  EXPECT_FALSE(report.accounts[2].max_debt.has_value());
}

TEST(Stats, SinglePaymentOneHourLater) {
  const auto report = compute_account_stats(build_timelines(std::vector<EventRecord>{
      usdc(1000, kA, EventKind::WithdrawUsdc, "10"), usdc(1000 + kSecondsPerHour, kA, EventKind::SupplyUsdc, "10")}));
  EXPECT_DOUBLE_EQ(*report.accounts[0].hours_to_first_payment, 1.0);
  EXPECT_DOUBLE_EQ(*report.accounts[0].hours_to_last_payment, 1.0);
}

TEST(Stats, EmptyInputIsAnError) {
  EXPECT_THROW(compute_account_stats(TimelineMap{}), ValidationError);
}

TEST(Stats, CdfsAreMonotoneAndEndAtOne) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto report = compute_account_stats(build_timelines(random_events(seed, 300)));
    for (const auto& [name, cdf] : report.cdfs) {
      if (cdf.empty()) continue;
      for (std::size_t i = 1; i < cdf.size(); ++i) {
        ASSERT_LT(cdf[i - 1].value, cdf[i].value) << name;
        ASSERT_LE(cdf[i - 1].cum_fraction, cdf[i].cum_fraction) << name;
      }
      EXPECT_DOUBLE_EQ(cdf.back().cum_fraction, 1.0) << name;
    }
  }
}

TEST(Stats, PermutingDistinctTimestampsChangesNothing) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto events = random_events(seed, 200);
    const std::string reference = stats_json(events);
    CounterRng rng(seed, 7, 7);
    shuffle(events, rng);
    EXPECT_EQ(stats_json(events), reference);
  }
  auto events = fixture_events();
  const std::string reference = stats_json(events);
  std::reverse(events.begin(), events.end());
  EXPECT_EQ(stats_json(events), reference);
}

TEST(Stats, EmpiricalCdf) {
  const auto cdf = empirical_cdf({3.0, 1.0, 3.0, 2.0});
  ASSERT_EQ(cdf.size(), 3u);
  EXPECT_DOUBLE_EQ(cdf[0].cum_fraction, 0.25);
  EXPECT_DOUBLE_EQ(cdf[1].cum_fraction, 0.5);
  EXPECT_DOUBLE_EQ(cdf[2].value, 3.0);
  EXPECT_DOUBLE_EQ(cdf[2].cum_fraction, 1.0);
}

TEST(Stats, GoldenFilesMatchByteForByte) {
  const auto dir = lowcoll::testing::scratch_dir("ledger_golden");
  const auto files = write_stats_files(compute_account_stats(build_timelines(fixture_events())), dir);
  for (const auto& entry : std::filesystem::directory_iterator(fixture("mini_market.expected"))) {
    const auto name = entry.path().filename().string();
    EXPECT_NE(std::find(files.begin(), files.end(), name), files.end()) << name;
    EXPECT_EQ(slurp(dir / name), slurp(entry.path())) << name;
  }
  EXPECT_EQ(slurp(dir / "stats.json"), slurp(fixture("mini_market.expected.json")));
}

TEST(MarketConfig, DefaultFileCarriesPublishedThresholds) {
  const auto path = std::filesystem::path(LOWCOLL_DATA_DIR) / "market_config.json";
  const MarketConfig compound = load_market_config(path);
  EXPECT_EQ(compound.platform, "compound");
  EXPECT_DOUBLE_EQ(compound.threshold("ETH"), 1.2195);
  EXPECT_DOUBLE_EQ(compound.threshold("WBTC"), 1.429);
  EXPECT_DOUBLE_EQ(load_market_config(path, "aave").threshold("SNX"), 2.5);
  EXPECT_DOUBLE_EQ(load_market_config(path, "makerdao").threshold("ETH"), 1.3);
  EXPECT_DOUBLE_EQ(compound.bank_rate_at(1660368917), 0.05);
  EXPECT_THROW(compound.threshold("DOGE"), ValidationError);
  EXPECT_THROW(load_market_config(path, "nope"), ValidationError);
}

TEST(MarketConfig, RejectsThresholdsAtOrBelowPar) {
  const auto doc = nlohmann::json::parse(
      R"({"default_platform": "x", "platforms": {"x": {"ETH": 1.0}}, "bank_rate_schedule": []})");
  EXPECT_THROW(market_config_from_json(doc), ValidationError);
  const auto unsorted = nlohmann::json::parse(
      R"({"default_platform": "x", "platforms": {"x": {"ETH": 1.2}},
          "bank_rate_schedule": [{"effective_from": 5, "alpha": 0.1}, {"effective_from": 2, "alpha": 0.1}]})");
  EXPECT_THROW(market_config_from_json(unsorted), ValidationError);
}
