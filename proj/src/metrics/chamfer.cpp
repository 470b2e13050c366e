#include <algorithm>
#include <cmath>

#include "laneforge/errors.hpp"
#include "laneforge/metrics.hpp"
#include "laneforge/spatial_grid.hpp"

namespace laneforge::metrics {
namespace {

double grid_cell_for(std::span<const Vec3> pts) {
  double x0 = pts[0].x(), x1 = x0, y0 = pts[0].y(), y1 = y0;
  for (const auto& p : pts) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  const double extent = std::max(x1 - x0, y1 - y0);
  if (!(extent > 0.0)) return 1.0;
  return std::max(extent / std::sqrt(static_cast<double>(pts.size())), extent * 1e-6);
}

double chamfer(std::span<const Vec3> a, std::span<const Vec3> b, bool use_z) {
  if (a.empty() || b.empty()) fail(ErrorCode::EmptySet, "chamfer distance needs two non-empty sets");
  const SpatialGrid2D grid(b, grid_cell_for(b));
  double sum = 0.0;
  for (const auto& p : a) sum += grid.nearest(p, use_z)->distance;
  return sum / static_cast<double>(a.size());
}

}  // namespace

double chamfer_unilateral(std::span<const Vec3> a, std::span<const Vec3> b) {
  return chamfer(a, b, true);
}

double chamfer_unilateral_bev(std::span<const Vec3> a, std::span<const Vec3> b) {
  return chamfer(a, b, false);
}

}  // namespace laneforge::metrics
