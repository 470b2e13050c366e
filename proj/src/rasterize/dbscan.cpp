#include <deque>

#include "laneforge/errors.hpp"
#include "laneforge/rasterize.hpp"
#include "laneforge/spatial_grid.hpp"

namespace laneforge::raster {

std::vector<int> cluster_instances(std::span<const Vec3> proposals, double eps, int min_pts) {
  if (!(eps > 0.0)) fail(ErrorCode::InvalidConfig, "eps must be positive");
  if (min_pts < 1) fail(ErrorCode::InvalidConfig, "min_pts must be at least 1");
  constexpr int kUnvisited = -2;
  std::vector<int> label(proposals.size(), kUnvisited);
  if (proposals.empty()) return label;

  const SpatialGrid2D grid(proposals, eps);
  auto neighbors = [&](std::size_t i) { return grid.radius_xy(proposals[i].head<2>(), eps); };
  const auto min_count = static_cast<std::size_t>(min_pts);

  int next_cluster = 0;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    if (label[i] != kUnvisited) continue;
    const auto seed = neighbors(i);
    if (seed.size() < min_count) {
      label[i] = kNoise;
      continue;
    }
    const int cluster = next_cluster++;
    label[i] = cluster;
    std::deque<std::size_t> frontier(seed.begin(), seed.end());
    while (!frontier.empty()) {
      const std::size_t q = frontier.front();
      frontier.pop_front();
      if (label[q] == kNoise) label[q] = cluster;  // border point
      if (label[q] != kUnvisited) continue;
      label[q] = cluster;
      const auto reach = neighbors(q);
      if (reach.size() >= min_count) frontier.insert(frontier.end(), reach.begin(), reach.end());
    }
  }
  return label;
}

}  // namespace laneforge::raster
