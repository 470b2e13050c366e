#include "laneforge/spatial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "laneforge/errors.hpp"

namespace laneforge {
namespace {

constexpr long kMaxCells = 1L << 22;

}  // namespace

SpatialGrid2D::SpatialGrid2D(std::span<const Vec3> points, double cell_size)
    : points_(points.begin(), points.end()), cell_(cell_size) {
  build();
}

SpatialGrid2D::SpatialGrid2D(std::span<const Point3I> points, double cell_size)
    : cell_(cell_size) {
  points_.reserve(points.size());
  for (const auto& p : points) points_.push_back(p.xyz());
  build();
}

void SpatialGrid2D::build() {
  if (!(cell_ > 0.0)) fail(ErrorCode::InvalidConfig, "grid cell size must be positive");
  if (points_.empty()) {
    nx_ = ny_ = 0;
    start_.assign(1, 0);
    return;
  }
  double x1 = points_[0].x(), y1 = points_[0].y();
  x0_ = x1;
  y0_ = y1;
  for (const auto& p : points_) {
    x0_ = std::min(x0_, p.x());
    y0_ = std::min(y0_, p.y());
    x1 = std::max(x1, p.x());
    y1 = std::max(y1, p.y());
  }
  // Coarsen the grid for very spread-out inputs so memory stays bounded.
  for (;;) {
    nx_ = static_cast<long>(std::floor((x1 - x0_) / cell_)) + 1;
    ny_ = static_cast<long>(std::floor((y1 - y0_) / cell_)) + 1;
    if (nx_ * ny_ <= kMaxCells) break;
    cell_ *= 2.0;
  }

  const std::size_t n_cells = static_cast<std::size_t>(nx_ * ny_);
  start_.assign(n_cells + 1, 0);
  std::vector<std::size_t> cell_of(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const long cx = std::clamp(cell_x(points_[i].x()), 0L, nx_ - 1);
    const long cy = std::clamp(cell_y(points_[i].y()), 0L, ny_ - 1);
    cell_of[i] = static_cast<std::size_t>(cy * nx_ + cx);
    ++start_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < n_cells; ++c) start_[c + 1] += start_[c];
  order_.resize(points_.size());
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) order_[fill[cell_of[i]]++] = i;
}

long SpatialGrid2D::cell_x(double x) const {
  return static_cast<long>(std::floor((x - x0_) / cell_));
}

long SpatialGrid2D::cell_y(double y) const {
  return static_cast<long>(std::floor((y - y0_) / cell_));
}

std::span<const std::size_t> SpatialGrid2D::bucket(long cx, long cy) const {
  const std::size_t c = static_cast<std::size_t>(cy * nx_ + cx);
  return std::span<const std::size_t>(order_).subspan(start_[c], start_[c + 1] - start_[c]);
}

template <class Fn>
void SpatialGrid2D::visit_box(const Vec2& center, double radius, Fn&& fn) const {
  if (points_.empty()) return;
  const long cx_lo = std::max(0L, cell_x(center.x() - radius));
  const long cx_hi = std::min(nx_ - 1, cell_x(center.x() + radius));
  const long cy_lo = std::max(0L, cell_y(center.y() - radius));
  const long cy_hi = std::min(ny_ - 1, cell_y(center.y() + radius));
  for (long cy = cy_lo; cy <= cy_hi; ++cy) {
    for (long cx = cx_lo; cx <= cx_hi; ++cx) {
      for (std::size_t i : bucket(cx, cy)) fn(i);
    }
  }
}

std::vector<std::size_t> SpatialGrid2D::radius_xy(const Vec2& center, double radius) const {
  std::vector<std::size_t> out;
  const double r2 = radius * radius;
  visit_box(center, radius, [&](std::size_t i) {
    if ((points_[i].head<2>() - center).squaredNorm() <= r2) out.push_back(i);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> SpatialGrid2D::radius_3d(const Vec3& center, double radius) const {
  std::vector<std::size_t> out;
  const double r2 = radius * radius;
  visit_box(center.head<2>(), radius, [&](std::size_t i) {
    if ((points_[i] - center).squaredNorm() <= r2) out.push_back(i);
  });
  std::sort(out.begin(), out.end());
  return out;
}

bool SpatialGrid2D::any_within_3d(const Vec3& center, double radius) const {
  const double r2 = radius * radius;
  bool found = false;
  visit_box(center.head<2>(), radius, [&](std::size_t i) {
    if (!found && (points_[i] - center).squaredNorm() <= r2) found = true;
  });
  return found;
}

std::optional<SpatialGrid2D::Neighbor> SpatialGrid2D::nearest(const Vec3& query,
                                                              bool use_z) const {
  if (points_.empty()) return std::nullopt;
  const long qx = cell_x(query.x());
  const long qy = cell_y(query.y());
  // Chebyshev ring distance from the query cell to the occupied grid box.
  const long gap_x = qx < 0 ? -qx : (qx >= nx_ ? qx - nx_ + 1 : 0);
  const long gap_y = qy < 0 ? -qy : (qy >= ny_ ? qy - ny_ + 1 : 0);
  const long first_ring = std::max(gap_x, gap_y);
  const long last_ring = std::max({std::abs(qx) + nx_, std::abs(qy) + ny_});

  double best2 = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  auto consider = [&](long cx, long cy) {
    if (cx < 0 || cy < 0 || cx >= nx_ || cy >= ny_) return;
    for (std::size_t i : bucket(cx, cy)) {
      const Vec3 d = points_[i] - query;
      const double d2 = use_z ? d.squaredNorm() : d.head<2>().squaredNorm();
      if (d2 < best2 || (d2 == best2 && i < best_i)) {
        best2 = d2;
        best_i = i;
      }
    }
  };

  for (long k = first_ring; k <= last_ring; ++k) {
    if (k == 0) {
      consider(qx, qy);
    } else {
      for (long dx = -k; dx <= k; ++dx) {
        consider(qx + dx, qy - k);
        consider(qx + dx, qy + k);
      }
      for (long dy = -k + 1; dy <= k - 1; ++dy) {
        consider(qx - k, qy + dy);
        consider(qx + k, qy + dy);
      }
    }
    // Every point outside rings 0..k is at least k cells away in xy.
    const double bound = static_cast<double>(k) * cell_;
    if (best2 < bound * bound) break;
  }
  return Neighbor{best_i, std::sqrt(best2)};
}

}  // namespace laneforge
