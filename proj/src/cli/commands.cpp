#include "lowcoll/cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lowcoll/cli/manifest.hpp"
#include "lowcoll/credit/features.hpp"
#include "lowcoll/credit/probit_model.hpp"
#include "lowcoll/error.hpp"
#include "lowcoll/eval/roc.hpp"
#include "lowcoll/eval/split.hpp"
#include "lowcoll/format.hpp"
#include "lowcoll/ledger/event.hpp"
#include "lowcoll/ledger/market_config.hpp"
#include "lowcoll/ledger/stats.hpp"
#include "lowcoll/ledger/timeline.hpp"
#include "lowcoll/protocol/io.hpp"
#include "lowcoll/protocol/loan.hpp"
#include "lowcoll/sim/simulation.hpp"
#include "lowcoll/synth/market_generator.hpp"

#ifndef LOWCOLL_VERSION
#define LOWCOLL_VERSION "0.0.0"
#endif
#ifndef LOWCOLL_DEFAULT_MARKET_CONFIG
#define LOWCOLL_DEFAULT_MARKET_CONFIG "data/market_config.json"
#endif

namespace lowcoll::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

void Logger::emit(std::string_view level, std::string_view message) const {
  if (json_) {
    err_ << json{{"level", level}, {"message", message}}.dump() << '\n';
  } else {
    err_ << level << ": " << message << '\n';
  }
}

void Logger::info(std::string_view message) const {
  if (!quiet_) emit("info", message);
}

void Logger::warn(std::string_view message) const {
  if (!quiet_) emit("warning", message);
}

void Logger::error(std::string_view message) const { emit("error", message); }

namespace {

constexpr const char* kEventsFile = "events.jsonl";
constexpr const char* kManifestFile = "manifest.json";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << content;
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": invalid JSON: " + e.what());
  }
}

fs::path prepare_dir(const std::string& dir) {
  if (dir.empty()) throw ValidationError("an output directory is required (--out)");
  fs::create_directories(dir);
  return dir;
}

std::string resolve_store(const std::string& store) {
  if (!store.empty()) return store;
  if (const char* env = std::getenv(kStoreEnv); env != nullptr && *env != '\0') return env;
  throw ValidationError(std::string("no store given: pass --store or set ") + kStoreEnv);
}

/// Parse errors get prefixed with "path:line".
std::vector<ledger::EventRecord> parse_file(const fs::path& path, ledger::LogFormat format) {
  const std::string text = read_file(path);
  try {
    return ledger::parse_event_log(text, format);
  } catch (const ParseError& e) {
    std::string message = e.what();
    if (const auto pos = message.find(": "); pos != std::string::npos) message = message.substr(pos + 2);
    throw ValidationError(path.string() + ":" + std::to_string(e.line()) + ": " + message);
  }
}

struct Store {
  std::string bytes;
  std::vector<ledger::EventRecord> events;
};

Store load_store(const std::string& store_option) {
  const fs::path events_path = fs::path(resolve_store(store_option)) / kEventsFile;
  if (!fs::exists(events_path)) throw ValidationError("no event store at " + events_path.parent_path().string());
  Store store;
  store.bytes = read_file(events_path);
  store.events = parse_file(events_path, ledger::LogFormat::Jsonl);
  if (store.events.empty()) throw ValidationError("event store " + events_path.string() + " is empty");
  return store;
}

void check_distinct(const std::string& store, const fs::path& out) {
  std::error_code ec;
  if (fs::equivalent(fs::path(resolve_store(store)), out, ec)) {
    throw ValidationError("output directory must differ from the store directory");
  }
}

RunManifest make_manifest(std::string command, const Digest& digest, std::vector<std::string> outputs,
                          std::optional<std::uint64_t> seed = std::nullopt) {
  return {std::move(command), digest.hex(), LOWCOLL_VERSION, seed, std::move(outputs)};
}

std::string bool_text(bool value) { return value ? "true" : "false"; }

std::vector<credit::LabeledObservation> observations_from(const Store& store, double cadence_days, bool dedupe) {
  if (!(cadence_days > 0.0)) throw ValidationError("snapshot cadence must be positive");
  const ledger::TimelineMap timelines = ledger::build_timelines(store.events);
  credit::ObservationConfig config;
  config.cadence_seconds = static_cast<std::int64_t>(std::llround(cadence_days * ledger::kSecondsPerDay));
  config.dedupe_per_account = dedupe;
  return credit::build_observations(timelines, config);
}

std::string roc_csv(const eval::RocCurve& curve) {
  std::string csv = "fpr,tpr\n";
  for (const eval::RocPoint& p : curve.points) csv += format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
  return csv;
}

std::vector<double> scores_for(const credit::ProbitModel& model,
                               std::span<const credit::LabeledObservation> observations) {
  std::vector<double> scores;
  scores.reserve(observations.size());
  for (const auto& o : observations) scores.push_back(credit::predict_proba(model, o.features));
  return scores;
}

std::vector<int> labels_of(std::span<const credit::LabeledObservation> observations) {
  std::vector<int> labels;
  labels.reserve(observations.size());
  for (const auto& o : observations) labels.push_back(o.label);
  return labels;
}

}  // namespace

void cmd_ingest(const IngestOptions& options, Context& ctx) {
  if (options.inputs.empty()) throw ValidationError("at least one --input is required");
  std::vector<ledger::EventRecord> events;
  for (const std::string& input : options.inputs) {
    ledger::LogFormat format;
    if (options.format == "auto") {
      format = fs::path(input).extension() == ".csv" ? ledger::LogFormat::Csv : ledger::LogFormat::Jsonl;
    } else {
      format = ledger::parse_log_format(options.format);
    }
    auto parsed = parse_file(input, format);
    events.insert(events.end(), std::make_move_iterator(parsed.begin()), std::make_move_iterator(parsed.end()));
  }
  events = ledger::sort_events(std::move(events));
  const ledger::TimelineMap timelines = ledger::build_timelines(events);

  const fs::path out = prepare_dir(options.out.empty() ? resolve_store("") : options.out);
  const std::string canonical = ledger::write_event_log(events, ledger::LogFormat::Jsonl);
  write_file(out / kEventsFile, canonical);
  Digest digest;
  digest.option("command", "ingest").update(canonical);
  write_manifest(out / kManifestFile, make_manifest("ingest", digest, {kEventsFile}));
  ctx.log.info("ingested " + std::to_string(events.size()) + " events for " + std::to_string(timelines.size()) +
               " accounts into " + out.string());
}

void cmd_stats(const StatsOptions& options, Context& ctx) {
  const Store store = load_store(options.store);
  const fs::path out = prepare_dir(options.out);
  check_distinct(options.store, out);
  const ledger::AccountStatsReport report = ledger::compute_account_stats(ledger::build_timelines(store.events));
  const std::vector<std::string> files = ledger::write_stats_files(report, out);
  Digest digest;
  digest.option("command", "stats").update(store.bytes);
  write_manifest(out / kManifestFile, make_manifest("stats", digest, files));
  ctx.log.info("wrote statistics for " + std::to_string(report.accounts.size()) + " accounts to " + out.string());
}

void cmd_observe(const ObserveOptions& options, Context& ctx) {
  const Store store = load_store(options.store);
  const fs::path out = prepare_dir(options.out);
  check_distinct(options.store, out);
  const auto observations = observations_from(store, options.cadence_days, options.dedupe_per_account);
  std::ostringstream csv;
  credit::write_observations_csv(csv, observations);
  write_file(out / "observations.csv", csv.str());
  Digest digest;
  digest.option("command", "observe")
      .option("cadence_days", format_double(options.cadence_days))
      .option("dedupe_per_account", bool_text(options.dedupe_per_account))
      .update(store.bytes);
  write_manifest(out / kManifestFile, make_manifest("observe", digest, {"observations.csv"}));
  int positives = 0;
  for (const auto& o : observations) positives += o.label;
  ctx.log.info("built " + std::to_string(observations.size()) + " observations (" + std::to_string(positives) +
               " positive)");
}

void cmd_train(const TrainOptions& options, Context& ctx) {
  const Store store = load_store(options.store);
  const fs::path out = prepare_dir(options.out);
  check_distinct(options.store, out);
  const auto observations = observations_from(store, 14.0, options.dedupe_per_account);
  const credit::ProbitModel model = credit::fit_probit(observations);
  if (!model.converged) ctx.log.warn(model.warning);
  write_file(out / "model.json", credit::to_json(model).dump(2) + "\n");
  Digest digest;
  digest.option("command", "train")
      .option("dedupe_per_account", bool_text(options.dedupe_per_account))
      .update(store.bytes);
  write_manifest(out / kManifestFile, make_manifest("train", digest, {"model.json"}));
  ctx.log.info("fitted probit model on " + std::to_string(observations.size()) + " observations in " +
               std::to_string(model.iterations) + " iterations");
}

void cmd_score(const ScoreOptions& options, Context& ctx) {
  if (options.model.empty()) throw ValidationError("--model is required");
  const std::string model_bytes = read_file(options.model);
  json model_doc;
  try {
    model_doc = json::parse(model_bytes);
  } catch (const json::parse_error& e) {
    throw ValidationError(options.model + ": invalid JSON: " + e.what());
  }
  const credit::ProbitModel model = credit::model_from_json(model_doc);
  const Store store = load_store(options.store);
  const fs::path out = prepare_dir(options.out);
  check_distinct(options.store, out);
  const auto observations = observations_from(store, 14.0, options.dedupe_per_account);
  std::string csv = "account,as_of,probability,label\n";
  for (const auto& o : observations) {
    csv += o.account + "," + std::to_string(o.as_of) + "," + format_double(credit::predict_proba(model, o.features)) +
           "," + std::to_string(o.label) + "\n";
  }
  write_file(out / "scores.csv", csv);
  Digest digest;
  digest.option("command", "score")
      .option("dedupe_per_account", bool_text(options.dedupe_per_account))
      .update(model_bytes)
      .update(store.bytes);
  write_manifest(out / kManifestFile, make_manifest("score", digest, {"scores.csv"}));
  ctx.log.info("scored " + std::to_string(observations.size()) + " observations");
}

void cmd_eval(const EvalOptions& options, Context& ctx) {
  const Store store = load_store(options.store);
  const fs::path out = prepare_dir(options.out);
  check_distinct(options.store, out);
  const auto observations = observations_from(store, 14.0, options.dedupe_per_account);
  const std::vector<int> labels = labels_of(observations);
  const eval::SplitIndices split = eval::stratified_split(labels, options.train_fraction, options.seed);
  std::vector<credit::LabeledObservation> train;
  std::vector<credit::LabeledObservation> test;
  for (std::size_t i : split.train) train.push_back(observations[i]);
  for (std::size_t i : split.test) test.push_back(observations[i]);

  const credit::ProbitModel model = credit::fit_probit(train);
  if (!model.converged) ctx.log.warn(model.warning);
  const eval::RocCurve roc_train = eval::roc_curve(scores_for(model, train), labels_of(train));
  const eval::RocCurve roc_test = eval::roc_curve(scores_for(model, test), labels_of(test));
  const Eigen::Vector4d ame = credit::average_marginal_effects(model, train);

  auto positives = [](std::span<const credit::LabeledObservation> rows) {
    int n = 0;
    for (const auto& o : rows) n += o.label;
    return n;
  };
  json ame_doc = json::object();
  for (int j = 0; j < credit::kFeatureCount; ++j) ame_doc[std::string(credit::kFeatureNames[j])] = ame(j);
  const json summary = {{"seed", options.seed},
                        {"train_fraction", options.train_fraction},
                        {"n_train", train.size()},
                        {"n_test", test.size()},
                        {"positives_train", positives(train)},
                        {"positives_test", positives(test)},
                        {"auc_train", roc_train.auc},
                        {"auc_test", roc_test.auc},
                        {"average_marginal_effects", ame_doc},
                        {"converged", model.converged}};

  write_file(out / "roc_train.csv", roc_csv(roc_train));
  write_file(out / "roc_test.csv", roc_csv(roc_test));
  write_file(out / "eval.json", summary.dump(2) + "\n");
  write_file(out / "model.json", credit::to_json(model).dump(2) + "\n");
  Digest digest;
  digest.option("command", "eval")
      .option("seed", std::to_string(options.seed))
      .option("train_fraction", format_double(options.train_fraction))
      .option("dedupe_per_account", bool_text(options.dedupe_per_account))
      .update(store.bytes);
  write_manifest(out / kManifestFile,
                 make_manifest("eval", digest, {"roc_train.csv", "roc_test.csv", "eval.json", "model.json"},
                               options.seed));
  ctx.out << "train AUC " << format_fixed(roc_train.auc, 6) << "\n"
          << "test AUC " << format_fixed(roc_test.auc, 6) << "\n";
}

void cmd_quote(const QuoteOptions& options, Context& ctx) {
  Digest digest;
  digest.option("command", "quote");
  protocol::BorrowerHistory history;
  if (options.history) {
    const std::string bytes = read_file(*options.history);
    digest.update(bytes);
    try {
      history = protocol::history_from_json(json::parse(bytes));
    } catch (const json::parse_error& e) {
      throw ValidationError(*options.history + ": invalid JSON: " + e.what());
    }
  }

  double threshold = 0.0;
  if (options.threshold) {
    threshold = *options.threshold;
  } else {
    const fs::path config_path = options.market_config.value_or(LOWCOLL_DEFAULT_MARKET_CONFIG);
    threshold = ledger::load_market_config(config_path, options.platform).threshold(options.asset);
  }

  protocol::QuoteRequest request;
  if (options.request) {
    const json doc = read_json(*options.request);
    digest.update(doc.dump());
    request = protocol::quote_request_from_json(doc, threshold);
  } else {
    if (!options.gamma || !options.beta) throw ValidationError("--gamma and --beta are required without --request");
    request.params = {Money::parse(*options.gamma), *options.beta, options.rho, options.alpha, threshold};
  }
  if (options.delta_coll) request.delta_coll = options.delta_coll;
  if (options.delta_n) request.delta_n = options.delta_n;
  if (request.delta_coll && request.delta_n) throw ValidationError("give either --delta-coll or --delta-n, not both");
  if (request.params.principal <= Money{}) throw ValidationError("gamma must be positive");

  const protocol::QuoteParams& p = request.params;
  digest.option("gamma", p.principal.to_string())
      .option("beta", format_double(p.default_probability))
      .option("rho", format_double(p.margin))
      .option("alpha", format_double(p.bank_rate))
      .option("threshold", format_double(p.base_threshold))
      .option("sweep_steps", std::to_string(options.sweep_steps));

  std::string body;
  std::string file;
  if (request.delta_coll || request.delta_n) {
    if (request.delta_coll) digest.option("delta_coll", format_double(*request.delta_coll));
    if (request.delta_n) digest.option("delta_n", format_double(*request.delta_n));
    const protocol::LoanQuote quote = request.delta_coll
                                          ? protocol::quote_for_reduction(history, p, *request.delta_coll)
                                          : protocol::quote_for_rate(history, p, *request.delta_n);
    if (quote.clamped) ctx.log.warn("collateral reduction was clamped to the admissible range");
    body = protocol::to_json(quote).dump(2) + "\n";
    file = "quote.json";
  } else {
    body = "delta_coll_pct,delta_n_pct\n";
    for (const protocol::CurvePoint& point : protocol::quote_curve(history, p, options.sweep_steps)) {
      body += format_fixed(100.0 * point.delta_coll, 10) + "," + format_fixed(100.0 * point.delta_n, 10) + "\n";
    }
    file = "quote_curve.csv";
  }

  if (options.out) {
    const fs::path out = prepare_dir(*options.out);
    write_file(out / file, body);
    write_manifest(out / kManifestFile, make_manifest("quote", digest, {file}));
  } else {
    ctx.out << body;
  }
}

void cmd_simulate(const SimulateOptions& options, Context& ctx) {
  if (options.config.empty()) throw ValidationError("--config is required");
  const std::string bytes = read_file(options.config);
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ValidationError(options.config + ": invalid JSON: " + e.what());
  }
  const sim::SimConfig config = sim::sim_config_from_json(doc);
  const fs::path out = prepare_dir(options.out);
  const sim::SimResult result = sim::run_simulation(config);
  const bool bound = verify_profit_bound(result, config.rho);

  std::vector<std::string> files{"result.json"};
  const json summary = {{"config", sim::to_json(config)}, {"result", sim::to_json(result)},
                        {"profit_bound_holds", bound}};
  write_file(out / "result.json", summary.dump(2) + "\n");
  if (config.record_trace) {
    std::ostringstream csv;
    sim::write_trace_csv(result, csv);
    write_file(out / "trace.csv", csv.str());
    files.emplace_back("trace.csv");
  }
  if (config.record_trajectories) {
    std::string csv = "borrower,loan_idx,required_ratio\n";
    for (std::size_t b = 0; b < result.trajectories.size(); ++b) {
      for (std::size_t k = 0; k < result.trajectories[b].size(); ++k) {
        csv += std::to_string(b) + "," + std::to_string(k) + "," + format_double(result.trajectories[b][k]) + "\n";
      }
    }
    write_file(out / "trajectories.csv", csv);
    files.emplace_back("trajectories.csv");
  }
  Digest digest;
  digest.option("command", "simulate").update(bytes);
  write_manifest(out / kManifestFile, make_manifest("simulate", digest, files, config.seed));
  ctx.log.info("simulated " + std::to_string(result.loans_quoted) + " loans; profit bound " +
               (bound ? "holds" : "violated"));
}

void cmd_synth(const SynthOptions& options, Context& ctx) {
  synth::MarketGeneratorConfig config;
  config.seed = options.seed;
  config.n_borrowers = options.borrowers;
  config.n_lenders = options.lenders;
  config.periods = options.periods;
  const synth::GeneratedMarket market = synth::generate_market(config);
  const fs::path out = prepare_dir(options.out);
  write_file(out / kEventsFile, ledger::write_event_log(market.events, ledger::LogFormat::Jsonl));
  Digest digest;
  digest.option("command", "synth")
      .option("borrowers", std::to_string(options.borrowers))
      .option("lenders", std::to_string(options.lenders))
      .option("periods", std::to_string(options.periods));
  write_manifest(out / kManifestFile, make_manifest("synth", digest, {kEventsFile}, options.seed));
  ctx.log.info("generated " + std::to_string(market.events.size()) + " events; " +
               std::to_string(market.snapshot_positives) + " of " + std::to_string(market.snapshots) +
               " snapshots are non-paydown");
}

}  // namespace lowcoll::cli
