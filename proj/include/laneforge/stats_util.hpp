#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace laneforge {

/// Percentile with linear interpolation between closest ranks (the
/// numpy "linear" rule). `p` in [0, 100]; returns NaN for empty input.
double percentile(std::vector<double> values, double p);

/// Fixed-width 1D histogram. Values outside [lo, hi) are clamped into the
/// first/last bin so the total always equals the number of samples.
struct Histogram1D {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::uint64_t> counts;

  Histogram1D() = default;
  Histogram1D(double lo, double hi, std::size_t bins);

  void add(double v);
  std::uint64_t total() const;
  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
};

/// Seed mixer (SplitMix64 finaliser) for deriving independent RNG streams
/// from a base seed and a counter.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t counter);

}  // namespace laneforge
