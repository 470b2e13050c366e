#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "laneforge/types.hpp"

namespace laneforge {

/// Uniform xy bucket index over a fixed point set. Queries are exact; the grid
/// only prunes candidates. Result index lists are in ascending order.
class SpatialGrid2D {
 public:
  SpatialGrid2D(std::span<const Vec3> points, double cell_size);
  SpatialGrid2D(std::span<const Point3I> points, double cell_size);

  struct Neighbor {
    std::size_t index;
    double distance;
  };

  /// Points whose xy distance to `center` is <= radius.
  std::vector<std::size_t> radius_xy(const Vec2& center, double radius) const;
  /// Points whose 3D distance to `center` is <= radius.
  std::vector<std::size_t> radius_3d(const Vec3& center, double radius) const;
  /// True iff some point lies within 3D distance `radius` of `center`.
  bool any_within_3d(const Vec3& center, double radius) const;
  /// Exact nearest neighbour by 3D distance (or xy distance when use_z is
  /// false); ties resolve to the lowest index. Empty for an empty grid.
  std::optional<Neighbor> nearest(const Vec3& query, bool use_z = true) const;

  std::size_t size() const { return points_.size(); }
  const Vec3& point(std::size_t i) const { return points_[i]; }

 private:
  void build();
  long cell_x(double x) const;
  long cell_y(double y) const;
  std::span<const std::size_t> bucket(long cx, long cy) const;

  template <class Fn>
  void visit_box(const Vec2& center, double radius, Fn&& fn) const;

  std::vector<Vec3> points_;
  double cell_ = 1.0;
  double x0_ = 0.0;
  double y0_ = 0.0;
  long nx_ = 0;
  long ny_ = 0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

}  // namespace laneforge
