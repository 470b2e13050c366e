#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>

#include "laneforge/annotate.hpp"
#include "laneforge/cubic.hpp"
#include "laneforge/lane_geometry.hpp"
#include "laneforge/stats_util.hpp"

namespace laneforge::annotate {
namespace {

constexpr double kArcTolerance = 1e-9;
constexpr std::uint64_t kSkeletonStreamBase = 1ULL << 32;

bool is_fit_failure(const Error& e) {
  return e.code() == ErrorCode::InsufficientPoints ||
         e.code() == ErrorCode::DegenerateNeighborhood;
}

LaneReport process_lane(const LanePolyline& manual, const IndexedCloud& cloud,
                        const PipelineConfig& cfg, std::uint64_t lane_stream,
                        std::optional<LanePolyline>& output) {
  LaneReport report;
  report.instance_id = manual.instance_id;
  report.input_points = manual.size();
  try {
    if (manual.size() < kMinManualPoints) {
      fail(ErrorCode::DegenerateLane, "under-populated lane: " + std::to_string(manual.size()) +
                                          " points, need " + std::to_string(kMinManualPoints));
    }
    const ValidatedLane validated = validate_and_recalibrate(manual, cloud, cfg, lane_stream);
    std::vector<Vec3> fit_points;
    for (std::size_t i = 0; i < validated.status.size(); ++i) {
      switch (validated.status[i]) {
        case PointStatus::Accepted: ++report.accepted; break;
        case PointStatus::Recalibrated: ++report.recalibrated; break;
        case PointStatus::Unvalidated: ++report.unvalidated; continue;
      }
      fit_points.push_back(validated.lane.points[i]);
    }

    const LanePolyline skeleton = skeletonize_lane(validated.lane, cfg);
    report.skeleton_points = skeleton.size();

    LanePolyline grounded;
    std::vector<LocalGround> grounds;
    for (std::size_t j = 0; j < skeleton.size(); ++j) {
      try {
        const GroundFit fit =
            fit_local_ground(cloud, skeleton.points[j], cfg.neighborhood_radius, cfg,
                             mix_seed(lane_stream, kSkeletonStreamBase + j));
        grounds.push_back(make_local_ground(fit, cloud.cloud(), cfg));
        grounded.points.push_back(skeleton.points[j]);
      } catch (const Error& e) {
        if (!is_fit_failure(e)) throw;
        ++report.ground_fit_failures;
      }
    }

    const auto expanded = ball_query_expand(grounded, cloud, grounds, cfg);
    report.expanded_points = expanded.size();
    for (std::size_t i : expanded) fit_points.push_back(cloud.grid().point(i));

    InterpolatedLane interp = interpolate_lane(fit_points, cfg);
    interp.lane.instance_id = manual.instance_id;
    report.output_points = interp.lane.size();
    report.lateral = interp.lateral;
    report.vertical = interp.vertical;
    report.ok = true;
    output = std::move(interp.lane);
  } catch (const Error& e) {
    report.ok = false;
    report.error = e.what();
    output.reset();
  }
  return report;
}

}  // namespace

ValidatedLane validate_and_recalibrate(const LanePolyline& lane, const IndexedCloud& cloud,
                                       const PipelineConfig& cfg, std::uint64_t lane_stream) {
  if (lane.empty()) fail(ErrorCode::EmptyLane, "lane has no points");
  ValidatedLane out;
  out.lane = lane;
  out.status.reserve(lane.size());
  out.planes.reserve(lane.size());
  for (std::size_t i = 0; i < lane.size(); ++i) {
    Vec3& p = out.lane.points[i];
    try {
      const Plane plane =
          fit_local_ground(cloud, p, cfg.neighborhood_radius, cfg, mix_seed(lane_stream, i)).plane;
      out.planes.emplace_back(plane);
      if (plane.distance(p) <= cfg.ransac_validate_threshold) {
        out.status.push_back(PointStatus::Accepted);
      } else {
        // Height-only recalibration: keep xy, move onto the plane along z.
        p.z() = plane.height_at(p.x(), p.y());
        out.status.push_back(PointStatus::Recalibrated);
      }
    } catch (const Error& e) {
      if (!is_fit_failure(e)) throw;
      out.planes.emplace_back(std::nullopt);
      out.status.push_back(PointStatus::Unvalidated);
    }
  }
  return out;
}

LanePolyline skeletonize_lane(const LanePolyline& lane, const PipelineConfig& cfg) {
  if (lane.size() < 2) fail(ErrorCode::DegenerateLane, "skeleton needs at least two points");
  LanePolyline linked;
  linked.instance_id = lane.instance_id;
  linked.points = order_lane_points(lane.points);
  return polyline_resample(linked, cfg.skeleton_spacing);
}

LocalGround make_local_ground(const GroundFit& fit, const PointCloud& cloud,
                              const PipelineConfig& cfg) {
  std::vector<double> intensities;
  intensities.reserve(fit.inliers.size());
  for (std::size_t i : fit.inliers) intensities.push_back(cloud.points[i].intensity);
  return {fit.plane, percentile(std::move(intensities), cfg.intensity_percentile)};
}

std::vector<std::size_t> ball_query_expand(const LanePolyline& skeleton,
                                           const IndexedCloud& cloud,
                                           std::span<const LocalGround> ground,
                                           const PipelineConfig& cfg) {
  if (ground.size() != skeleton.size()) {
    fail(ErrorCode::ShapeMismatch, "one local ground model per skeletal point is required");
  }
  const auto& points = cloud.cloud().points;
  std::vector<std::size_t> selected;
  for (std::size_t j = 0; j < skeleton.size(); ++j) {
    const LocalGround& g = ground[j];
    for (std::size_t i : cloud.grid().radius_3d(skeleton.points[j], cfg.ball_radius)) {
      if (points[i].intensity < g.intensity_threshold) continue;
      if (g.plane.distance(cloud.grid().point(i)) > cfg.coplanarity_tol) continue;
      selected.push_back(i);
    }
  }
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());
  return selected;
}

InterpolatedLane interpolate_lane(std::span<const Vec3> points, const PipelineConfig& cfg) {
  if (points.empty()) fail(ErrorCode::RankDeficient, "no points to interpolate");
  const OrderingAxis axis = ordering_axis(points);

  std::vector<Vec2> lateral_samples, vertical_samples;
  lateral_samples.reserve(points.size());
  vertical_samples.reserve(points.size());
  double u_min = std::numeric_limits<double>::infinity();
  double u_max = -u_min;
  for (const auto& p : points) {
    const double u = axis.along(p.head<2>());
    lateral_samples.emplace_back(u, axis.lateral(p.head<2>()));
    vertical_samples.emplace_back(u, p.z());
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
  }

  InterpolatedLane out;
  out.lateral = fit_cubic(lateral_samples);
  out.lateral.axis = axis;
  out.lateral.dimension = CurveDimension::Lateral;
  out.vertical = fit_cubic(vertical_samples);
  out.vertical.axis = axis;
  out.vertical.dimension = CurveDimension::Vertical;

  auto emit = [&](double u) {
    const Vec2 xy = axis.to_xy(u, eval_cubic(out.lateral, u));
    out.lane.points.emplace_back(xy.x(), xy.y(), eval_cubic(out.vertical, u));
  };
  const double span = u_max - u_min;
  emit(u_min);
  for (std::size_t k = 1;; ++k) {
    const double step = static_cast<double>(k) * cfg.interp_spacing;
    if (step >= span - kArcTolerance) break;
    emit(u_min + step);
  }
  if (span > kArcTolerance) emit(u_max);
  return out;
}

PipelineResult run_pipeline(const PointCloud& cloud, std::span<const LanePolyline> manual_lanes,
                            const PipelineConfig& cfg) {
  cfg.validate();
  PipelineResult result;
  if (manual_lanes.empty()) return result;

  const IndexedCloud indexed(cloud, std::max(cfg.neighborhood_radius, cfg.ball_radius));
  const std::size_t n = manual_lanes.size();
  std::vector<LaneReport> reports(n);
  std::vector<std::optional<LanePolyline>> outputs(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      reports[i] = process_lane(manual_lanes[i], indexed, cfg, mix_seed(cfg.ransac_seed, i),
                                outputs[i]);
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), n);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  result.report.lanes = std::move(reports);
  for (auto& out : outputs) {
    if (out) result.lanes.push_back(std::move(*out));
  }
  return result;
}

}  // namespace laneforge::annotate
