#include "laneforge/stats_util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "laneforge/errors.hpp"

namespace laneforge {

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double rank = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Histogram1D::Histogram1D(double lo_, double hi_, std::size_t bins) : lo(lo_), hi(hi_) {
  if (!(hi > lo) || bins == 0) fail(ErrorCode::InvalidConfig, "histogram needs hi > lo and bins > 0");
  counts.assign(bins, 0);
}

void Histogram1D::add(double v) {
  const auto n = static_cast<long>(counts.size());
  long bin = std::isfinite(v) ? static_cast<long>(std::floor((v - lo) / bin_width())) : 0;
  bin = std::clamp(bin, 0L, n - 1);
  ++counts[static_cast<std::size_t>(bin)];
}

std::uint64_t Histogram1D::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t counter) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace laneforge
