#include "laneforge/lane_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "laneforge/errors.hpp"

namespace laneforge {
namespace {

constexpr double kArcTolerance = 1e-9;

std::vector<double> cumulative_lengths(std::span<const Vec3> points) {
  std::vector<double> cum(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    cum[i] = cum[i - 1] + (points[i] - points[i - 1]).norm();
  }
  return cum;
}

Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + t * (b - a); }

}  // namespace

OrderingAxis ordering_axis(std::span<const Vec3> points) {
  if (points.empty()) fail(ErrorCode::EmptyLane, "lane has no points");

  double x_lo = points[0].x(), x_hi = x_lo, y_lo = points[0].y(), y_hi = y_lo;
  for (const auto& p : points) {
    x_lo = std::min(x_lo, p.x());
    x_hi = std::max(x_hi, p.x());
    y_lo = std::min(y_lo, p.y());
    y_hi = std::max(y_hi, p.y());
  }
  OrderingAxis axis;
  if (x_hi - x_lo >= y_hi - y_lo) return axis;

  Vec2 mean = Vec2::Zero();
  for (const auto& p : points) mean += p.head<2>();
  mean /= static_cast<double>(points.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : points) {
    const Vec2 d = p.head<2>() - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(cov);
  Vec2 dir = solver.eigenvectors().col(1).normalized();
  if (dir.x() < 0.0 || (dir.x() == 0.0 && dir.y() < 0.0)) dir = -dir;
  axis.direction = dir;
  return axis;
}

std::vector<Vec3> order_lane_points(std::span<const Vec3> points) {
  const OrderingAxis axis = ordering_axis(points);
  struct Keyed {
    double key;
    Vec3 p;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(points.size());
  for (const auto& p : points) {
    const double key = axis.is_x_axis() ? p.x() : axis.along(p.head<2>());
    keyed.push_back({key, p});
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const Keyed& l, const Keyed& r) {
    if (l.key != r.key) return l.key < r.key;
    if (l.p.y() != r.p.y()) return l.p.y() < r.p.y();
    return l.p.z() < r.p.z();
  });
  std::vector<Vec3> out;
  out.reserve(keyed.size());
  for (const auto& k : keyed) out.push_back(k.p);
  return out;
}

double polyline_length(std::span<const Vec3> points) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += (points[i] - points[i - 1]).norm();
  return total;
}

LanePolyline polyline_resample(const LanePolyline& lane, double spacing) {
  if (!(spacing > 0.0)) fail(ErrorCode::InvalidConfig, "resample spacing must be positive");
  if (lane.size() < 2) fail(ErrorCode::DegenerateLane, "resampling needs at least two points");

  const std::span<const Vec3> pts(lane.points);
  const auto cum = cumulative_lengths(pts);
  const double total = cum.back();
  if (total <= kArcTolerance) fail(ErrorCode::DegenerateLane, "lane has zero length");

  LanePolyline out;
  out.instance_id = lane.instance_id;
  out.points.push_back(pts.front());

  std::size_t seg = 1;
  for (std::size_t k = 1;; ++k) {
    const double s = static_cast<double>(k) * spacing;
    if (s >= total - kArcTolerance) break;
    while (seg + 1 < pts.size() && cum[seg] < s) ++seg;
    const double seg_len = cum[seg] - cum[seg - 1];
    const double t = seg_len > 0.0 ? (s - cum[seg - 1]) / seg_len : 0.0;
    out.points.push_back(lerp(pts[seg - 1], pts[seg], std::clamp(t, 0.0, 1.0)));
  }
  out.points.push_back(pts.back());
  return out;
}

Vec3 polyline_point_at(std::span<const Vec3> points, double s) {
  if (points.empty()) fail(ErrorCode::EmptyLane, "polyline has no points");
  if (points.size() == 1 || s <= 0.0) return points.front();
  const auto cum = cumulative_lengths(points);
  if (s >= cum.back()) return points.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cum.begin());
  const double seg_len = cum[i] - cum[i - 1];
  const double t = seg_len > 0.0 ? (s - cum[i - 1]) / seg_len : 0.0;
  return lerp(points[i - 1], points[i], t);
}

SegmentProjection project_onto_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  SegmentProjection proj;
  proj.point = a + t * ab;
  proj.t = t;
  proj.distance = (p - proj.point).norm();
  return proj;
}

double distance_to_polyline(const Vec3& p, std::span<const Vec3> polyline) {
  if (polyline.empty()) fail(ErrorCode::EmptyLane, "polyline has no points");
  if (polyline.size() == 1) return (p - polyline[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    best = std::min(best, project_onto_segment(p, polyline[i - 1], polyline[i]).distance);
  }
  return best;
}

double arc_length_of_closest(const Vec3& p, std::span<const Vec3> polyline) {
  if (polyline.size() < 2) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    const auto proj = project_onto_segment(p, polyline[i - 1], polyline[i]);
    const double len = (polyline[i] - polyline[i - 1]).norm();
    if (proj.distance < best) {
      best = proj.distance;
      best_s = acc + proj.t * len;
    }
    acc += len;
  }
  return best_s;
}

}  // namespace laneforge
