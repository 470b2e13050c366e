#pragma once

#include <cstdint>
#include <vector>

#include "laneforge/types.hpp"

namespace laneforge::scene {

/// Parameters of the synthetic surround-view scene. Lanes are cubics
/// y = a x^3 + offset running along x; the ground is the plane
/// z = -sensor_height + ground_slope * x.
struct SceneConfig {
  std::uint64_t seed = 0;
  double sensor_height = 2.0;
  double ground_slope = 0.0;
  int lane_count = 4;
  std::vector<double> lane_curvature_a{1.0e-5};  // one value, or one per lane
  double lane_spacing = 3.5;                     // lateral distance between centrelines
  double lane_width = 0.15;                      // paint stripe width
  double point_density = 10.0;                   // points / m^2 at 10 m range
  double noise_sigma = 0.01;
  double lane_intensity_mean = 0.8;
  double ground_intensity_mean = 0.2;
  double distractor_intensity_mean = 0.75;
  double intensity_sigma = 0.05;
  Roi roi;
  double annotation_spacing = 8.0;  // manual-annotation surrogate spacing
  double annotation_jitter = 0.02;  // z jitter sigma on the manual surrogate
  bool curbs = true;
  int shrub_count = 6;

  /// Throws InvalidConfig describing the first violated constraint.
  void validate() const;
  double curvature_for_lane(int lane) const;
  double lane_offset(int lane) const;
  double ground_z(double x) const { return -sensor_height + ground_slope * x; }
};

enum class PointClass : std::uint8_t { Ground, LanePaint, Distractor };

struct SparseAnnotation {
  LanePolyline lane;
  std::vector<double> z_offsets;  // applied jitter per output point
};

struct SyntheticScene {
  PointCloud cloud;
  std::vector<PointClass> classes;          // one per cloud point
  std::vector<LanePolyline> gt_dense_lanes;  // 0.1 m arc-length spacing
  std::vector<LanePolyline> gt_sparse_lanes;
  std::vector<std::vector<double>> sparse_z_offsets;
  SceneConfig config;
};

inline constexpr double kDenseLaneSpacing = 0.1;
inline constexpr double kBlindRadius = 2.5;  // no returns closer than this to the sensor

/// Deterministic in `config` (including the seed).
SyntheticScene generate_scene(const SceneConfig& config);

/// Resamples `dense` at `spacing` and perturbs each point's z by a Gaussian
/// of sigma `jitter`, clamped to +-3 sigma. The applied offsets are returned.
SparseAnnotation sparsify_annotation(const LanePolyline& dense, double spacing, double jitter,
                                     std::uint64_t seed);

}  // namespace laneforge::scene
