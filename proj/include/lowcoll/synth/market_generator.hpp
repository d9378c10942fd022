#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "lowcoll/ledger/event.hpp"

namespace lowcoll::synth {

/// Latent default-risk coefficients over (intercept, age_days, tx_2w, pay_2w, coll_debt_2w).
struct LatentModel {
  std::array<double, 5> theta{-1.85, -0.012, 0.15, -0.9, 0.06};
};

struct MarketGeneratorConfig {
  std::uint64_t seed = 42;
  int n_borrowers = 3000;
  int n_lenders = 150;
  int periods = 9;
  std::int64_t start_time = 1660368917;
  LatentModel model;
};

struct GeneratedMarket {
  std::vector<ledger::EventRecord> events;  // sorted by timestamp
  /// Snapshot decisions made while generating; they match the labels the
  /// observation builder derives from the events.
  std::int64_t snapshots = 0;
  std::int64_t snapshot_positives = 0;
};

/// Synthetic USDC market whose borrowers repay (or not) according to a probit
/// model of their own recent activity. Deterministic for a given config.
GeneratedMarket generate_market(const MarketGeneratorConfig& config = {});

}  // namespace lowcoll::synth
