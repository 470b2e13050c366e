#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "laneforge/errors.hpp"
#include "laneforge/rasterize.hpp"

namespace laneforge::raster {
namespace {

// Liang-Barsky clip of a->b against a closed box; returns the parameter
// interval, or nothing when the segment misses the box.
std::optional<std::pair<double, double>> clip_segment(const Vec2& a, const Vec2& b, double x0,
                                                      double x1, double y0, double y1) {
  double t0 = 0.0, t1 = 1.0;
  const Vec2 d = b - a;
  const double p[4] = {-d.x(), d.x(), -d.y(), d.y()};
  const double q[4] = {a.x() - x0, x1 - a.x(), a.y() - y0, y1 - a.y()};
  for (int k = 0; k < 4; ++k) {
    if (p[k] == 0.0) {
      if (q[k] < 0.0) return std::nullopt;
      continue;
    }
    const double r = q[k] / p[k];
    if (p[k] < 0.0) {
      t0 = std::max(t0, r);
    } else {
      t1 = std::min(t1, r);
    }
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

}  // namespace

GridGeometry GridGeometry::make(const Roi& roi, double resolution) {
  if (!(resolution > 0.0)) fail(ErrorCode::InvalidConfig, "grid resolution must be positive");
  if (!roi.valid()) fail(ErrorCode::InvalidConfig, "roi must be non-empty");
  GridGeometry g;
  g.roi = roi;
  g.resolution = resolution;
  g.rows = std::max(1L, std::lround((roi.x_max - roi.x_min) / resolution));
  g.cols = std::max(1L, std::lround((roi.y_max - roi.y_min) / resolution));
  return g;
}

namespace {

long axis_index(double v, double lo, double hi, double res, long n) {
  if (!(v >= lo && v <= hi)) return -1;
  long i = static_cast<long>(std::floor((v - lo) / res));
  if (lo + static_cast<double>(i) * res > v) --i;
  else if (lo + static_cast<double>(i + 1) * res <= v) ++i;
  return std::clamp(i, 0L, n - 1);
}

}  // namespace

long GridGeometry::index_x(double x) const {
  return axis_index(x, roi.x_min, roi.x_max, resolution, rows);
}

long GridGeometry::index_y(double y) const {
  return axis_index(y, roi.y_min, roi.y_max, resolution, cols);
}

Vec2 GridGeometry::cell_center(long ix, long iy) const {
  return {cell_lo_x(ix) + 0.5 * resolution, cell_lo_y(iy) + 0.5 * resolution};
}

std::size_t BevGrid::occupied_cells() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const BevCell& c) { return c.count > 0; }));
}

BevGrid pillarize(const PointCloud& cloud, const Roi& roi, double resolution) {
  BevGrid grid;
  grid.geometry = GridGeometry::make(roi, resolution);
  grid.cells.assign(grid.geometry.cell_count(), BevCell{});
  for (const auto& p : cloud.points) {
    const long ix = grid.geometry.index_x(p.x);
    const long iy = grid.geometry.index_y(p.y);
    if (ix < 0 || iy < 0) {
      ++grid.dropped_points;
      continue;
    }
    BevCell& cell = grid.cells[grid.geometry.flat(ix, iy)];
    cell.max_z = cell.count == 0 ? p.z : std::max(cell.max_z, p.z);
    ++cell.count;
    cell.intensity_sum += p.intensity;
    ++grid.in_roi_points;
  }
  return grid;
}

std::size_t LaneMask::flagged_count() const {
  return static_cast<std::size_t>(std::count(flag.begin(), flag.end(), std::uint8_t{1}));
}

LaneMask rasterize_lanes(std::span<const LanePolyline> lanes, const Roi& roi, double resolution) {
  LaneMask mask;
  mask.geometry = GridGeometry::make(roi, resolution);
  const GridGeometry& g = mask.geometry;
  mask.flag.assign(g.cell_count(), 0);
  mask.height.assign(g.cell_count(), 0.0);
  mask.samples.assign(g.cell_count(), 0);

  auto add_sample = [&](long ix, long iy, double z) {
    const std::size_t c = g.flat(ix, iy);
    mask.flag[c] = 1;
    mask.height[c] += z;
    ++mask.samples[c];
  };

  for (const auto& lane : lanes) {
    if (lane.size() == 1) {
      const Vec3& p = lane.points[0];
      const long ix = g.index_x(p.x()), iy = g.index_y(p.y());
      if (ix >= 0 && iy >= 0) add_sample(ix, iy, p.z());
      continue;
    }
    for (std::size_t s = 1; s < lane.size(); ++s) {
      const Vec3& a = lane.points[s - 1];
      const Vec3& b = lane.points[s];
      auto clamp_x = [&](double x) {
        return std::clamp(static_cast<long>(std::floor((x - roi.x_min) / resolution)), 0L,
                          g.rows - 1);
      };
      auto clamp_y = [&](double y) {
        return std::clamp(static_cast<long>(std::floor((y - roi.y_min) / resolution)), 0L,
                          g.cols - 1);
      };
      // One cell of slack on each side absorbs floor rounding.
      const long ix0 = std::max(0L, clamp_x(std::min(a.x(), b.x())) - 1);
      const long ix1 = std::min(g.rows - 1, clamp_x(std::max(a.x(), b.x())) + 1);
      const long iy0 = std::max(0L, clamp_y(std::min(a.y(), b.y())) - 1);
      const long iy1 = std::min(g.cols - 1, clamp_y(std::max(a.y(), b.y())) + 1);
      for (long ix = ix0; ix <= ix1; ++ix) {
        const double x_lo = g.cell_lo_x(ix);
        const double x_hi = ix == g.rows - 1 ? roi.x_max : g.cell_lo_x(ix + 1);
        for (long iy = iy0; iy <= iy1; ++iy) {
          const double y_lo = g.cell_lo_y(iy);
          const double y_hi = iy == g.cols - 1 ? roi.y_max : g.cell_lo_y(iy + 1);
          const auto clip = clip_segment(a.head<2>(), b.head<2>(), x_lo, x_hi, y_lo, y_hi);
          if (!clip) continue;
          const double t_mid = 0.5 * (clip->first + clip->second);
          const Vec3 mid = a + t_mid * (b - a);
          if (g.index_x(mid.x()) != ix || g.index_y(mid.y()) != iy) continue;
          add_sample(ix, iy, mid.z());
        }
      }
    }
  }
  for (std::size_t c = 0; c < mask.flag.size(); ++c) {
    if (mask.samples[c] > 0) mask.height[c] /= static_cast<double>(mask.samples[c]);
  }
  return mask;
}

std::vector<Vec3> lift_mask_to_3d(const LaneMask& mask) {
  std::vector<Vec3> proposals;
  const GridGeometry& g = mask.geometry;
  for (long ix = 0; ix < g.rows; ++ix) {
    for (long iy = 0; iy < g.cols; ++iy) {
      if (!mask.flagged(ix, iy)) continue;
      const Vec2 c = g.cell_center(ix, iy);
      proposals.emplace_back(c.x(), c.y(), mask.height[g.flat(ix, iy)]);
    }
  }
  return proposals;
}

}  // namespace laneforge::raster
