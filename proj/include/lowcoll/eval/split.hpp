#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lowcoll::eval {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified random split. Each class keeps round(train_fraction * n_c) rows
/// in train, clamped so both sides see every class; index lists are sorted.
/// Throws ValidationError if train_fraction is outside (0, 1) or a class has
/// fewer than two members.
SplitIndices stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed);

}  // namespace lowcoll::eval
