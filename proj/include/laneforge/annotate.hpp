#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laneforge/errors.hpp"
#include "laneforge/spatial_grid.hpp"
#include "laneforge/types.hpp"

namespace laneforge::annotate {

/// Plane n . p = offset with a unit, upward-facing normal.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
  double distance(const Vec3& p) const { return std::abs(signed_distance(p)); }
  /// z on the plane at (x, y); requires normal.z() > 0.
  double height_at(double x, double y) const {
    return (offset - normal.x() * x - normal.y() * y) / normal.z();
  }
};

struct PipelineConfig {
  double ransac_validate_threshold = 0.01;
  double ransac_inlier_threshold = 0.02;
  int ransac_iterations = 200;
  std::uint64_t ransac_seed = 0;
  double neighborhood_radius = 2.0;
  double skeleton_spacing = 0.5;
  double ball_radius = 0.3;
  double intensity_percentile = 90.0;
  double coplanarity_tol = 0.03;
  double interp_spacing = 0.5;
  int threads = 1;

  void validate() const;
};

/// Minimum number of manual points a lane needs before the pipeline will
/// touch it (one per cubic coefficient).
inline constexpr std::size_t kMinManualPoints = 4;

/// RANSAC result over a cylindrical xy neighbourhood.
struct GroundFit {
  Plane plane;
  std::vector<std::size_t> neighborhood;  // cloud indices, ascending
  std::vector<std::size_t> inliers;       // subset of neighborhood, ascending
};

/// Cloud plus the xy bucket index used for neighbourhood queries.
class IndexedCloud {
 public:
  explicit IndexedCloud(const PointCloud& cloud, double cell_size = 1.0);

  const PointCloud& cloud() const { return *cloud_; }
  const SpatialGrid2D& grid() const { return grid_; }

 private:
  const PointCloud* cloud_;
  SpatialGrid2D grid_;
};

/// Least-squares plane through `points` (smallest-eigenvector of the
/// covariance), oriented upward. Throws DegenerateNeighborhood if collinear.
Plane fit_plane_least_squares(std::span<const Vec3> points);

/// RANSAC ground plane over the points within `radius` (xy only) of
/// `center`. `stream` selects an independent random stream so results do not
/// depend on call order. Throws InsufficientPoints (< 3 candidates) or
/// DegenerateNeighborhood (all candidates collinear).
GroundFit fit_local_ground(const IndexedCloud& cloud, const Vec3& center, double radius,
                           const PipelineConfig& cfg, std::uint64_t stream = 0);

Plane fit_local_ground_plane(const PointCloud& cloud, const Vec3& center, double radius,
                             const PipelineConfig& cfg, std::uint64_t stream = 0);

enum class PointStatus : std::uint8_t { Accepted, Recalibrated, Unvalidated };

struct ValidatedLane {
  LanePolyline lane;
  std::vector<PointStatus> status;
  std::vector<std::optional<Plane>> planes;
};

/// Fits the local ground under each lane point. Points within the validate
/// threshold are kept; others get their z replaced by the plane height at
/// their xy. Points whose neighbourhood cannot be fitted are left unchanged
/// and flagged Unvalidated. `lane_stream` keys the RANSAC streams.
ValidatedLane validate_and_recalibrate(const LanePolyline& lane, const IndexedCloud& cloud,
                                       const PipelineConfig& cfg, std::uint64_t lane_stream = 0);

/// Orders, links and resamples the lane at cfg.skeleton_spacing.
LanePolyline skeletonize_lane(const LanePolyline& lane, const PipelineConfig& cfg);

/// Local ground model at one skeletal point: the plane plus the intensity
/// threshold derived from the plane-inlier intensities.
struct LocalGround {
  Plane plane;
  double intensity_threshold = 0.0;
};

LocalGround make_local_ground(const GroundFit& fit, const PointCloud& cloud,
                              const PipelineConfig& cfg);

/// Cloud indices (ascending, unique) of points within ball_radius of some
/// skeletal point s that are at least as bright as s's intensity threshold
/// and within coplanarity_tol of s's plane. Throws ShapeMismatch if the
/// ground list does not match the skeleton.
std::vector<std::size_t> ball_query_expand(const LanePolyline& skeleton,
                                           const IndexedCloud& cloud,
                                           std::span<const LocalGround> ground,
                                           const PipelineConfig& cfg);

struct InterpolatedLane {
  LanePolyline lane;
  CubicCurve lateral;
  CubicCurve vertical;
};

/// Two least-squares cubics (lateral and vertical offset over the ordering
/// axis u) sampled every cfg.interp_spacing across [u_min, u_max].
InterpolatedLane interpolate_lane(std::span<const Vec3> points, const PipelineConfig& cfg);

struct LaneReport {
  std::uint32_t instance_id = 0;
  bool ok = false;
  std::string error;
  std::size_t input_points = 0;
  std::size_t accepted = 0;
  std::size_t recalibrated = 0;
  std::size_t unvalidated = 0;
  std::size_t skeleton_points = 0;
  std::size_t ground_fit_failures = 0;
  std::size_t expanded_points = 0;
  std::size_t output_points = 0;
  std::optional<CubicCurve> lateral;
  std::optional<CubicCurve> vertical;
};

struct PipelineReport {
  std::vector<LaneReport> lanes;
};

struct PipelineResult {
  std::vector<LanePolyline> lanes;  // successful lanes, in input order
  PipelineReport report;            // one entry per input lane
};

/// validate -> skeletonize -> ball query -> interpolate, per lane. Lanes that
/// fail are recorded in the report and skipped. Deterministic for a given
/// (cloud, lanes, cfg) regardless of cfg.threads.
PipelineResult run_pipeline(const PointCloud& cloud, std::span<const LanePolyline> manual_lanes,
                            const PipelineConfig& cfg);

}  // namespace laneforge::annotate
