#include "lowcoll/cli/cli.hpp"

#include <functional>
#include <ostream>

#include <CLI11.hpp>

#include "lowcoll/cli/commands.hpp"
#include "lowcoll/error.hpp"

#ifndef LOWCOLL_VERSION
#define LOWCOLL_VERSION "0.0.0"
#endif

namespace lowcoll::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-collateral lending toolkit: event-log statistics, probit credit scoring, loan quotes and "
               "Monte Carlo simulation."};
  app.name("lowcoll");
  app.set_version_flag("--version", LOWCOLL_VERSION);
  app.require_subcommand(1);
  bool quiet = false;
  bool json_logs = false;
  app.add_flag("--quiet", quiet, "Suppress informational logs");
  app.add_flag("--json-logs", json_logs, "Emit logs as JSON lines on stderr");

  std::function<void(Context&)> command;
  const std::string store_help = std::string("Store directory (default: $") + kStoreEnv + ")";

  IngestOptions ingest;
  auto* sub = app.add_subcommand("ingest", "Parse event logs into a canonical store");
  sub->add_option("--input", ingest.inputs, "Event log file(s)")->required()->check(CLI::ExistingFile);
  sub->add_option("--format", ingest.format, "Input format")->check(CLI::IsMember({"auto", "jsonl", "csv"}));
  sub->add_option("--out", ingest.out, std::string("Store directory to write (default: $") + kStoreEnv + ")");
  sub->callback([&] { command = [&](Context& ctx) { cmd_ingest(ingest, ctx); }; });

  StatsOptions stats;
  sub = app.add_subcommand("stats", "Per-account statistics, histograms and CDFs");
  sub->add_option("--store", stats.store, store_help);
  sub->add_option("--out", stats.out, "Output directory")->required();
  sub->callback([&] { command = [&](Context& ctx) { cmd_stats(stats, ctx); }; });

  ObserveOptions observe;
  sub = app.add_subcommand("observe", "Export labeled snapshot observations as CSV");
  sub->add_option("--store", observe.store, store_help);
  sub->add_option("--out", observe.out, "Output directory")->required();
  sub->add_option("--cadence-days", observe.cadence_days, "Snapshot cadence in days");
  sub->add_flag("--dedupe-per-account", observe.dedupe_per_account, "Keep only each account's latest snapshot");
  sub->callback([&] { command = [&](Context& ctx) { cmd_observe(observe, ctx); }; });

  TrainOptions train;
  sub = app.add_subcommand("train", "Fit the probit default model on every observation");
  sub->add_option("--store", train.store, store_help);
  sub->add_option("--out", train.out, "Output directory for model.json")->required();
  sub->add_flag("--dedupe-per-account", train.dedupe_per_account, "Keep only each account's latest snapshot");
  sub->callback([&] { command = [&](Context& ctx) { cmd_train(train, ctx); }; });

  ScoreOptions score;
  sub = app.add_subcommand("score", "Score observations with a saved model");
  sub->add_option("--store", score.store, store_help);
  sub->add_option("--model", score.model, "Model JSON")->required();
  sub->add_option("--out", score.out, "Output directory for scores.csv")->required();
  sub->add_flag("--dedupe-per-account", score.dedupe_per_account, "Keep only each account's latest snapshot");
  sub->callback([&] { command = [&](Context& ctx) { cmd_score(score, ctx); }; });

  EvalOptions evaluate;
  sub = app.add_subcommand("eval", "Stratified train/test evaluation with ROC curves");
  sub->add_option("--store", evaluate.store, store_help);
  sub->add_option("--out", evaluate.out, "Output directory")->required();
  sub->add_option("--seed", evaluate.seed, "Split seed");
  sub->add_option("--train-fraction", evaluate.train_fraction, "Share of each class used for training");
  sub->add_flag("--dedupe-per-account", evaluate.dedupe_per_account, "Keep only each account's latest snapshot");
  sub->callback([&] { command = [&](Context& ctx) { cmd_eval(evaluate, ctx); }; });

  QuoteOptions quote;
  sub = app.add_subcommand("quote", "Price a loan or sweep the rate/collateral trade-off");
  sub->add_option("--history", quote.history, "Borrower history JSON");
  sub->add_option("--request", quote.request, "Quote request JSON");
  sub->add_option("--gamma", quote.gamma, "Loan principal in USD");
  sub->add_option("--beta", quote.beta, "Default probability");
  sub->add_option("--rho", quote.rho, "Required margin over the bank");
  sub->add_option("--alpha", quote.alpha, "Bank rate for this loan period");
  sub->add_option("--sweep-steps", quote.sweep_steps, "Intervals in the reduction sweep");
  sub->add_option("--delta-coll", quote.delta_coll, "Price this collateral reduction");
  sub->add_option("--delta-n", quote.delta_n, "Solve the reduction for this rate");
  sub->add_option("--threshold", quote.threshold, "Base liquidation threshold");
  sub->add_option("--asset", quote.asset, "Collateral asset for the threshold lookup");
  sub->add_option("--platform", quote.platform, "Platform in the market config");
  sub->add_option("--market-config", quote.market_config, "Market config JSON");
  sub->add_option("--out", quote.out, "Output directory (default: stdout)");
  sub->callback([&] { command = [&](Context& ctx) { cmd_quote(quote, ctx); }; });

  SimulateOptions simulate;
  sub = app.add_subcommand("simulate", "Monte Carlo run of sequential quoted loans");
  sub->add_option("--config", simulate.config, "Simulation config JSON")->required();
  sub->add_option("--out", simulate.out, "Output directory")->required();
  sub->callback([&] { command = [&](Context& ctx) { cmd_simulate(simulate, ctx); }; });

  SynthOptions synth;
  sub = app.add_subcommand("synth", "Generate a synthetic market event store");
  sub->add_option("--out", synth.out, "Store directory to write")->required();
  sub->add_option("--seed", synth.seed, "Generator seed");
  sub->add_option("--borrowers", synth.borrowers, "Number of borrowers");
  sub->add_option("--lenders", synth.lenders, "Number of lenders");
  sub->add_option("--periods", synth.periods, "Number of 14-day periods");
  sub->callback([&] { command = [&](Context& ctx) { cmd_synth(synth, ctx); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Logger log(err, quiet, json_logs);
  Context ctx{out, log};
  try {
    command(ctx);
    return kExitOk;
  } catch (const ValidationError& e) {
    log.error(e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    log.error(std::string("internal error: ") + e.what());
    return kExitInternal;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"lowcoll"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace lowcoll::cli
