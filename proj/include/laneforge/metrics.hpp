#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "laneforge/stats_util.hpp"
#include "laneforge/types.hpp"

namespace laneforge::metrics {

/// Mean over A of the distance to the nearest point of B. Not symmetric.
/// Throws EmptySet when either set is empty.
double chamfer_unilateral(std::span<const Vec3> a, std::span<const Vec3> b);
/// Same, measured in the xy plane.
double chamfer_unilateral_bev(std::span<const Vec3> a, std::span<const Vec3> b);

struct MatchPair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double cost = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // ascending pred index
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_gt;

  double total_cost() const;
};

inline constexpr double kDefaultResampleSpacing = 0.5;
inline constexpr double kDefaultMatchThreshold = 1.5;

/// Minimum-cost assignment on a rows x cols cost matrix (row-major). Returns
/// the assigned column per row, or -1 for rows left out when rows > cols.
std::vector<long> hungarian(const std::vector<double>& cost, std::size_t rows, std::size_t cols);

/// Mean pointwise distance between two lanes after resampling at `spacing`
/// and aligning the shorter lane onto the longer one by arc length.
/// Infinite when either lane cannot be resampled.
double lane_match_cost(const LanePolyline& a, const LanePolyline& b, double spacing);

/// Hungarian assignment on lane_match_cost; pairs costing more than
/// `match_threshold` are dissolved. Throws InvalidConfig if spacing <= 0.
MatchResult match_lanes(std::span<const LanePolyline> pred, std::span<const LanePolyline> gt,
                        double resample_spacing = kDefaultResampleSpacing,
                        double match_threshold = kDefaultMatchThreshold);

struct PrecisionRecall {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Zero denominators give 0.
PrecisionRecall prf1(const MatchResult& match);
PrecisionRecall prf1(std::size_t tp, std::size_t fp, std::size_t fn);

struct Frame {
  std::string frame_id;
  std::vector<LanePolyline> pred;
  std::vector<LanePolyline> gt;
};

struct FrameEval {
  std::string frame_id;
  PrecisionRecall counts;
  MatchResult match;
  double cd_3d = 0.0;  // NaN without matched pairs
  double cd_bev = 0.0;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double cd_3d = 0.0;  // mean over matched pairs of all frames; NaN if none
  double cd_bev = 0.0;
  std::size_t matched_pairs = 0;
  std::vector<FrameEval> frames;
};

struct EvalConfig {
  double resample_spacing = kDefaultResampleSpacing;
  double match_threshold = kDefaultMatchThreshold;

  void validate() const;
};

/// CD per matched pair is measured from the prediction resampled at the
/// configured spacing to the ground truth resampled ten times finer.
FrameEval evaluate_frame(const Frame& frame, const EvalConfig& cfg = {});
/// Frames are reported in input order; P/R/F1 come from pooled counts.
EvalReport evaluate(std::span<const Frame> frames, const EvalConfig& cfg = {});

struct Histogram2D {
  Roi roi;
  double cell = 1.0;
  std::size_t rows = 0;  // along x
  std::size_t cols = 0;  // along y
  std::vector<std::uint64_t> counts;

  Histogram2D() = default;
  Histogram2D(const Roi& roi, double cell);

  void add(double x, double y);  // clamps into the border cells
  std::uint64_t total() const;
  std::uint64_t at(std::size_t r, std::size_t c) const { return counts[r * cols + c]; }
};

struct StatsConfig {
  Roi xy_roi;
  double xy_cell = 1.0;
  double height_lo = -4.0, height_hi = 2.0;
  std::size_t height_bins = 60;
  double curvature_lo = -2e-3, curvature_hi = 2e-3;
  std::size_t curvature_bins = 40;
  double slope_lo = -10.0, slope_hi = 10.0;  // degrees
  std::size_t slope_bins = 40;

  void validate() const;
};

struct LaneStats {
  std::uint32_t instance_id = 0;
  std::size_t points = 0;
  bool has_curvature = false;
  double a = 0.0;
  double slope_deg = 0.0;
};

struct StatsReport {
  Histogram2D xy;
  Histogram1D height;
  Histogram1D curvature;
  Histogram1D slope;
  std::size_t lane_count = 0;
  std::size_t point_count = 0;
  std::size_t skipped_curvature = 0;
  std::vector<LaneStats> lanes;
};

/// Cubic coefficient `a` of the lateral offset along the lane's ordering axis.
/// Throws RankDeficient for lanes without four distinct abscissae.
double lane_curvature_a(const LanePolyline& lane);
/// atan(dz / xy arc length) between the end points, in degrees.
double lane_slope_deg(const LanePolyline& lane);

/// Throws EmptySet for an empty lane list. Lanes with fewer than four points
/// (or a rank-deficient fit) are left out of the curvature histogram.
StatsReport dataset_stats(std::span<const LanePolyline> lanes, const StatsConfig& cfg = {});

}  // namespace laneforge::metrics
