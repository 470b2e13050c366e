#include "laneforge/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "laneforge/errors.hpp"
#include "laneforge/lane_geometry.hpp"
#include "laneforge/spatial_grid.hpp"
#include "laneforge/stats_util.hpp"

namespace laneforge::scene {
namespace {

constexpr double kCurbHalfWidth = 0.25;
constexpr double kCurbMargin = 0.5;  // past the outer lane's half lane
constexpr double kShrubRadius = 0.6;
constexpr int kShrubPoints = 60;
constexpr double kShrubClearance = 2.0;
constexpr double kDistractorLo = 0.1;
constexpr double kDistractorHi = 0.3;
constexpr double kCurveStep = 0.01;

double clamped_normal(std::mt19937_64& rng, double mean, double sigma, double lo, double hi) {
  if (sigma <= 0.0) return std::clamp(mean, lo, hi);
  std::normal_distribution<double> dist(mean, sigma);
  return std::clamp(dist(rng), lo, hi);
}

double noise3(std::mt19937_64& rng, double sigma) {
  return clamped_normal(rng, 0.0, sigma, -3.0 * sigma, 3.0 * sigma);
}

float intensity(std::mt19937_64& rng, double mean, double sigma) {
  return static_cast<float>(clamped_normal(rng, mean, sigma, 0.0, 1.0));
}

// Longest contiguous in-roi run of y = a x^3 + offset, resampled to the
// dense ground-truth spacing.
std::optional<LanePolyline> dense_lane(const SceneConfig& cfg, double a, double offset,
                                       std::uint32_t id) {
  const Roi& roi = cfg.roi;
  std::vector<Vec3> best, run;
  const auto steps = static_cast<long>(std::floor((roi.x_max - roi.x_min) / kCurveStep));
  for (long i = 0; i <= steps + 1; ++i) {
    const double x = std::min(roi.x_min + static_cast<double>(i) * kCurveStep, roi.x_max);
    const double y = a * x * x * x + offset;
    if (roi.contains(x, y)) {
      if (run.empty() || run.back().x() < x) run.emplace_back(x, y, cfg.ground_z(x));
    } else {
      if (run.size() > best.size()) best.swap(run);
      run.clear();
    }
  }
  if (run.size() > best.size()) best.swap(run);
  if (best.size() < 2) return std::nullopt;
  LanePolyline fine;
  fine.points = std::move(best);
  fine.instance_id = id;
  return polyline_resample(fine, kDenseLaneSpacing);
}

}  // namespace

void SceneConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::InvalidConfig, what);
  };
  require(roi.valid(), "roi must be non-empty");
  require(point_density > 0.0, "point_density must be positive");
  require(noise_sigma >= 0.0, "noise_sigma must be non-negative");
  for (double m : {lane_intensity_mean, ground_intensity_mean, distractor_intensity_mean}) {
    require(m >= 0.0 && m <= 1.0, "intensity means must lie in [0,1]");
  }
  require(intensity_sigma >= 0.0, "intensity_sigma must be non-negative");
  require(lane_count >= 0, "lane_count must be non-negative");
  require(lane_count == 0 || lane_curvature_a.size() == 1 ||
              lane_curvature_a.size() == static_cast<std::size_t>(lane_count),
          "lane_curvature_a needs one entry or one per lane");
  require(lane_width > 0.0, "lane_width must be positive");
  require(lane_spacing > 0.0, "lane_spacing must be positive");
  require(annotation_spacing > 0.0, "annotation_spacing must be positive");
  require(annotation_jitter >= 0.0, "annotation_jitter must be non-negative");
  require(shrub_count >= 0, "shrub_count must be non-negative");
  if (sensor_height > 0.0) {
    const double top = std::max(ground_z(roi.x_min), ground_z(roi.x_max)) + 3.0 * noise_sigma +
                       kDistractorHi;
    require(top < 0.0, "ground surface must stay below a roof-mounted sensor across the roi");
  }
}

double SceneConfig::curvature_for_lane(int lane) const {
  if (lane_curvature_a.empty()) return 0.0;
  if (lane_curvature_a.size() == 1) return lane_curvature_a.front();
  return lane_curvature_a.at(static_cast<std::size_t>(lane));
}

double SceneConfig::lane_offset(int lane) const {
  return (static_cast<double>(lane) - 0.5 * static_cast<double>(lane_count - 1)) * lane_spacing;
}

SparseAnnotation sparsify_annotation(const LanePolyline& dense, double spacing, double jitter,
                                     std::uint64_t seed) {
  if (!(spacing > 0.0)) fail(ErrorCode::InvalidConfig, "annotation spacing must be positive");
  SparseAnnotation out;
  out.lane = dense.size() >= 2 ? polyline_resample(dense, spacing) : dense;
  std::mt19937_64 rng(seed);
  out.z_offsets.reserve(out.lane.size());
  for (auto& p : out.lane.points) {
    const double dz = noise3(rng, jitter);
    p.z() += dz;
    out.z_offsets.push_back(dz);
  }
  return out;
}

SyntheticScene generate_scene(const SceneConfig& cfg) {
  cfg.validate();

  SyntheticScene scene;
  scene.config = cfg;
  scene.cloud.frame_id = "scene_" + std::to_string(cfg.seed);
  std::mt19937_64 rng(cfg.seed);

  for (int i = 0; i < cfg.lane_count; ++i) {
    auto lane = dense_lane(cfg, cfg.curvature_for_lane(i), cfg.lane_offset(i),
                           static_cast<std::uint32_t>(i));
    if (lane) scene.gt_dense_lanes.push_back(std::move(*lane));
  }
  for (const auto& dense : scene.gt_dense_lanes) {
    auto sparse = sparsify_annotation(dense, cfg.annotation_spacing, cfg.annotation_jitter,
                                      mix_seed(cfg.seed, 1000 + dense.instance_id));
    scene.gt_sparse_lanes.push_back(std::move(sparse.lane));
    scene.sparse_z_offsets.push_back(std::move(sparse.z_offsets));
  }

  // Index of all dense lane vertices, for the paint-stripe membership test.
  std::vector<Vec3> lane_vertices;
  std::vector<std::pair<std::size_t, std::size_t>> vertex_owner;
  for (std::size_t l = 0; l < scene.gt_dense_lanes.size(); ++l) {
    const auto& pts = scene.gt_dense_lanes[l].points;
    for (std::size_t v = 0; v < pts.size(); ++v) {
      lane_vertices.push_back(pts[v]);
      vertex_owner.emplace_back(l, v);
    }
  }
  const SpatialGrid2D lane_index(lane_vertices, 0.5);
  const double half_width = 0.5 * cfg.lane_width;
  auto on_paint = [&](double x, double y) {
    const Vec2 q(x, y);
    for (std::size_t k : lane_index.radius_xy(q, half_width + kDenseLaneSpacing)) {
      const auto [l, v] = vertex_owner[k];
      const auto& pts = scene.gt_dense_lanes[l].points;
      const Vec3 q3(x, y, 0.0);
      auto flat = [](const Vec3& p) { return Vec3(p.x(), p.y(), 0.0); };
      if (v > 0 && project_onto_segment(q3, flat(pts[v - 1]), flat(pts[v])).distance <= half_width)
        return true;
      if (v + 1 < pts.size() &&
          project_onto_segment(q3, flat(pts[v]), flat(pts[v + 1])).distance <= half_width)
        return true;
    }
    return false;
  };

  // Curbs follow the outermost lanes on either side.
  struct Curb {
    double a;
    double offset;
    double height;
  };
  std::vector<Curb> curbs;
  if (cfg.curbs && cfg.lane_count > 0) {
    std::uniform_real_distribution<double> h(kDistractorLo, kDistractorHi);
    const double margin = 0.5 * cfg.lane_spacing + kCurbMargin;
    curbs.push_back({cfg.curvature_for_lane(0), cfg.lane_offset(0) - margin, h(rng)});
    curbs.push_back({cfg.curvature_for_lane(cfg.lane_count - 1),
                     cfg.lane_offset(cfg.lane_count - 1) + margin, h(rng)});
  }
  auto curb_height = [&](double x, double y) -> std::optional<double> {
    for (const auto& c : curbs) {
      if (std::abs(y - (c.a * x * x * x + c.offset)) <= kCurbHalfWidth) return c.height;
    }
    return std::nullopt;
  };

  auto push = [&](double x, double y, double z, float inten, PointClass cls) {
    scene.cloud.points.push_back(
        {static_cast<float>(x), static_cast<float>(y), static_cast<float>(z), inten});
    scene.classes.push_back(cls);
  };

  // Ring-style sampling: range uniform in [r_min, r_max] gives an areal
  // density that falls off as 1/range.
  const Roi& roi = cfg.roi;
  double r_max = 0.0;
  for (double x : {roi.x_min, roi.x_max}) {
    for (double y : {roi.y_min, roi.y_max}) r_max = std::max(r_max, std::hypot(x, y));
  }
  const double r_min = std::min(kBlindRadius, r_max);
  const auto n_rays = static_cast<std::size_t>(
      std::llround(cfg.point_density * 10.0 * 2.0 * std::numbers::pi * (r_max - r_min)));
  std::uniform_real_distribution<double> range(r_min, r_max);
  std::uniform_real_distribution<double> azimuth(0.0, 2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n_rays; ++i) {
    const double r = range(rng);
    const double theta = azimuth(rng);
    const double x = r * std::cos(theta);
    const double y = r * std::sin(theta);
    if (!roi.contains(x, y)) continue;
    const double ground = cfg.ground_z(x);
    if (const auto h = curb_height(x, y)) {
      const double dz = std::clamp(*h + noise3(rng, cfg.noise_sigma), kDistractorLo, kDistractorHi);
      push(x, y, ground + dz, intensity(rng, cfg.distractor_intensity_mean, cfg.intensity_sigma),
           PointClass::Distractor);
    } else if (on_paint(x, y)) {
      push(x, y, ground + noise3(rng, cfg.noise_sigma),
           intensity(rng, cfg.lane_intensity_mean, cfg.intensity_sigma), PointClass::LanePaint);
    } else {
      push(x, y, ground + noise3(rng, cfg.noise_sigma),
           intensity(rng, cfg.ground_intensity_mean, cfg.intensity_sigma), PointClass::Ground);
    }
  }

  // Shrub-like volumetric clusters away from the lanes.
  std::uniform_real_distribution<double> ux(roi.x_min, roi.x_max);
  std::uniform_real_distribution<double> uy(roi.y_min, roi.y_max);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> lift(kDistractorLo, kDistractorHi);
  for (int s = 0; s < cfg.shrub_count; ++s) {
    std::optional<Vec2> centre;
    for (int attempt = 0; attempt < 100 && !centre; ++attempt) {
      const Vec2 c(ux(rng), uy(rng));
      const auto nearest = lane_index.nearest(Vec3(c.x(), c.y(), 0.0), false);
      if (!nearest || nearest->distance > kShrubClearance) centre = c;
    }
    if (!centre) continue;
    for (int k = 0; k < kShrubPoints; ++k) {
      const double rr = kShrubRadius * std::sqrt(unit(rng));
      const double th = azimuth(rng);
      const double x = centre->x() + rr * std::cos(th);
      const double y = centre->y() + rr * std::sin(th);
      const double dz = lift(rng);
      const float inten = intensity(rng, cfg.distractor_intensity_mean, cfg.intensity_sigma);
      if (!roi.contains(x, y)) continue;
      push(x, y, cfg.ground_z(x) + dz, inten, PointClass::Distractor);
    }
  }
  return scene;
}

}  // namespace laneforge::scene
