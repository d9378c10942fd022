#include "lowcoll/eval/split.hpp"

#include <algorithm>
#include <cmath>

#include "lowcoll/error.hpp"
#include "lowcoll/rng.hpp"

namespace lowcoll::eval {

namespace {

constexpr std::uint64_t kSplitStream = 0x5b1;

std::size_t train_count(std::size_t n, double fraction, bool round_half_down) {
  const double target = fraction * static_cast<double>(n);
  const double eps = 1e-9;
  double rounded = round_half_down ? std::ceil(target - 0.5 - eps) : std::floor(target + 0.5 + eps);
  rounded = std::clamp(rounded, 1.0, static_cast<double>(n - 1));
  return static_cast<std::size_t>(rounded);
}

}  // namespace

SplitIndices stratified_split(std::span<const int> labels, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ValidationError("train fraction must lie strictly between 0 and 1");
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw ValidationError("labels must be 0 or 1");
    by_class[labels[i]].push_back(i);
  }
  SplitIndices out;
  for (int c = 0; c < 2; ++c) {
    auto& members = by_class[c];
    if (members.size() < 2) {
      throw ValidationError("class " + std::to_string(c) + " has fewer than two observations");
    }
    CounterRng rng(seed, kSplitStream, static_cast<std::uint64_t>(c));
    shuffle(members, rng);
    // Positives round half down, negatives half up: the rare class never gains
    // a training row from a tie.
    const std::size_t k = train_count(members.size(), train_fraction, c == 1);
    out.train.insert(out.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    out.test.insert(out.test.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace lowcoll::eval
