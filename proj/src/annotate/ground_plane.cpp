#include <random>

#include <Eigen/Eigenvalues>

#include "laneforge/annotate.hpp"
#include "laneforge/stats_util.hpp"

namespace laneforge::annotate {
namespace {

constexpr double kCollinearRatio = 1e-12;

Plane oriented(Vec3 normal, const Vec3& through) {
  if (normal.z() < 0.0 || (normal.z() == 0.0 && normal.x() + normal.y() < 0.0)) normal = -normal;
  return {normal, normal.dot(through)};
}

// Second-largest covariance eigenvalue vanishing relative to the largest
// means the points span at most a line.
bool collinear(std::span<const Vec3> points) {
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov, Eigen::EigenvaluesOnly);
  const Vec3 ev = solver.eigenvalues();
  return ev(2) <= 0.0 || ev(1) <= kCollinearRatio * ev(2);
}

}  // namespace

void PipelineConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::InvalidConfig, what);
  };
  require(ransac_validate_threshold > 0.0, "ransac_validate_threshold must be positive");
  require(ransac_inlier_threshold > 0.0, "ransac_inlier_threshold must be positive");
  require(ransac_iterations > 0, "ransac_iterations must be positive");
  require(neighborhood_radius > 0.0, "neighborhood_radius must be positive");
  require(skeleton_spacing > 0.0, "skeleton_spacing must be positive");
  require(ball_radius > 0.0, "ball_radius must be positive");
  require(intensity_percentile >= 0.0 && intensity_percentile <= 100.0,
          "intensity_percentile must lie in [0,100]");
  require(coplanarity_tol > 0.0, "coplanarity_tol must be positive");
  require(interp_spacing > 0.0, "interp_spacing must be positive");
  require(threads >= 1, "threads must be at least 1");
}

IndexedCloud::IndexedCloud(const PointCloud& cloud, double cell_size)
    : cloud_(&cloud), grid_(std::span<const Point3I>(cloud.points), cell_size) {}

Plane fit_plane_least_squares(std::span<const Vec3> points) {
  if (points.size() < 3) fail(ErrorCode::InsufficientPoints, "plane fit needs 3 points");
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Vec3 ev = solver.eigenvalues();
  if (ev(2) <= 0.0 || ev(1) <= kCollinearRatio * ev(2)) {
    fail(ErrorCode::DegenerateNeighborhood, "points are collinear");
  }
  return oriented(solver.eigenvectors().col(0).normalized(), mean);
}

GroundFit fit_local_ground(const IndexedCloud& cloud, const Vec3& center, double radius,
                           const PipelineConfig& cfg, std::uint64_t stream) {
  GroundFit fit;
  fit.neighborhood = cloud.grid().radius_xy(center.head<2>(), radius);
  const std::size_t n = fit.neighborhood.size();
  if (n < 3) {
    fail(ErrorCode::InsufficientPoints,
         std::to_string(n) + " points within " + std::to_string(radius) + " m");
  }
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (std::size_t i : fit.neighborhood) pts.push_back(cloud.grid().point(i));
  if (collinear(pts)) fail(ErrorCode::DegenerateNeighborhood, "neighbourhood is collinear");

  std::mt19937_64 rng(mix_seed(cfg.ransac_seed, stream));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const double thr = cfg.ransac_inlier_threshold;

  std::size_t best_count = 0;
  Plane best;
  for (int it = 0; it < cfg.ransac_iterations; ++it) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    std::size_t k = pick(rng);
    if (i == j || j == k || i == k) continue;
    const Vec3 normal = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
    const double norm = normal.norm();
    if (norm < 1e-12) continue;
    const Plane candidate = oriented(normal / norm, pts[i]);
    std::size_t count = 0;
    for (const auto& p : pts) count += candidate.distance(p) <= thr ? 1 : 0;
    if (count > best_count) {
      best_count = count;
      best = candidate;
    }
  }

  std::vector<Vec3> consensus;
  if (best_count >= 3) {
    for (std::size_t m = 0; m < n; ++m) {
      if (best.distance(pts[m]) <= thr) {
        fit.inliers.push_back(fit.neighborhood[m]);
        consensus.push_back(pts[m]);
      }
    }
  }
  if (consensus.size() < 3 || collinear(consensus)) {
    // No usable consensus: fall back to the whole neighbourhood.
    fit.inliers = fit.neighborhood;
    consensus = pts;
  }
  fit.plane = fit_plane_least_squares(consensus);
  return fit;
}

Plane fit_local_ground_plane(const PointCloud& cloud, const Vec3& center, double radius,
                             const PipelineConfig& cfg, std::uint64_t stream) {
  const IndexedCloud indexed(cloud, std::max(radius, 0.25));
  return fit_local_ground(indexed, center, radius, cfg, stream).plane;
}

}  // namespace laneforge::annotate
