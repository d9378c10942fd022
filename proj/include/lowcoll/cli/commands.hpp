#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lowcoll::cli {

/// Diagnostics on stderr, plain or one JSON object per line.
class Logger {
 public:
  Logger(std::ostream& err, bool quiet, bool json) : err_(err), quiet_(quiet), json_(json) {}
  void info(std::string_view message) const;
  void warn(std::string_view message) const;
  void error(std::string_view message) const;

 private:
  void emit(std::string_view level, std::string_view message) const;
  std::ostream& err_;
  bool quiet_;
  bool json_;
};

struct Context {
  std::ostream& out;
  const Logger& log;
};

/// Name of the environment variable holding the default store directory.
inline constexpr const char* kStoreEnv = "LOWCOLL_STORE";

struct IngestOptions {
  std::vector<std::string> inputs;
  std::string format = "auto";  // auto | jsonl | csv
  std::string out;
};

struct StatsOptions {
  std::string store;
  std::string out;
};

struct ObserveOptions {
  std::string store;
  std::string out;
  double cadence_days = 14.0;
  bool dedupe_per_account = false;
};

struct TrainOptions {
  std::string store;
  std::string out;
  bool dedupe_per_account = false;
};

struct ScoreOptions {
  std::string store;
  std::string model;
  std::string out;
  bool dedupe_per_account = false;
};

struct EvalOptions {
  std::string store;
  std::string out;
  std::uint64_t seed = 42;
  double train_fraction = 0.7;
  bool dedupe_per_account = false;
};

struct QuoteOptions {
  std::optional<std::string> history;
  std::optional<std::string> request;
  std::optional<std::string> gamma;
  std::optional<double> beta;
  double rho = 0.0;
  double alpha = 0.05;
  int sweep_steps = 10;
  std::optional<double> delta_coll;
  std::optional<double> delta_n;
  std::optional<double> threshold;
  std::string asset = "ETH";
  std::string platform;
  std::optional<std::string> market_config;
  std::optional<std::string> out;
};

struct SimulateOptions {
  std::string config;
  std::string out;
};

struct SynthOptions {
  std::string out;
  std::uint64_t seed = 42;
  int borrowers = 3000;
  int lenders = 150;
  int periods = 9;
};

void cmd_ingest(const IngestOptions& options, Context& ctx);
void cmd_stats(const StatsOptions& options, Context& ctx);
void cmd_observe(const ObserveOptions& options, Context& ctx);
void cmd_train(const TrainOptions& options, Context& ctx);
void cmd_score(const ScoreOptions& options, Context& ctx);
void cmd_eval(const EvalOptions& options, Context& ctx);
void cmd_quote(const QuoteOptions& options, Context& ctx);
void cmd_simulate(const SimulateOptions& options, Context& ctx);
void cmd_synth(const SynthOptions& options, Context& ctx);

}  // namespace lowcoll::cli
