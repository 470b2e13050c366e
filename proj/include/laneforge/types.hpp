#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace laneforge {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// A single LiDAR return in the sensor frame. Stored in single precision to
// match the on-disk record layout; all geometry is computed in double.
struct Point3I {
  float x = 0.0F;
  float y = 0.0F;
  float z = 0.0F;
  float intensity = 0.0F;  // unitless reflectance in [0, 1]

  Vec3 xyz() const { return {x, y, z}; }
  Vec2 xy() const { return {x, y}; }

  bool operator==(const Point3I&) const = default;
};

struct PointCloud {
  std::vector<Point3I> points;
  std::string frame_id;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Ordered 3D lane points with an instance id. Both manual (sparse) and
/// generated (dense) annotations use this type.
struct LanePolyline {
  std::vector<Vec3> points;
  std::uint32_t instance_id = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Axis-aligned rectangle in the xy plane.
struct Roi {
  double x_min = -48.0;
  double x_max = 48.0;
  double y_min = -20.0;
  double y_max = 20.0;

  bool valid() const { return x_max > x_min && y_max > y_min; }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  bool operator==(const Roi&) const = default;
};

/// Frame in which a lane is parametrized: u runs along `direction`, the
/// lateral coordinate runs along the left-hand normal of `direction`.
struct OrderingAxis {
  Vec2 origin = Vec2::Zero();
  Vec2 direction = Vec2::UnitX();

  bool is_x_axis() const { return origin.isZero(0.0) && direction == Vec2::UnitX(); }
  Vec2 normal() const { return {-direction.y(), direction.x()}; }
  double along(const Vec2& p) const { return direction.dot(p - origin); }
  double lateral(const Vec2& p) const { return normal().dot(p - origin); }
  Vec2 to_xy(double u, double lat) const { return origin + u * direction + lat * normal(); }
};

enum class CurveDimension { Lateral, Vertical };

/// v = a u^3 + b u^2 + c u + d, with u measured along `axis`.
struct CubicCurve {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  OrderingAxis axis;
  CurveDimension dimension = CurveDimension::Lateral;
};

}  // namespace laneforge
