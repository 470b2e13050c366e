#include <algorithm>
#include <cmath>
#include <numbers>

#include "laneforge/cubic.hpp"
#include "laneforge/errors.hpp"
#include "laneforge/lane_geometry.hpp"
#include "laneforge/metrics.hpp"

namespace laneforge::metrics {

Histogram2D::Histogram2D(const Roi& r, double c) : roi(r), cell(c) {
  if (!roi.valid() || !(cell > 0.0)) fail(ErrorCode::InvalidConfig, "bad xy histogram geometry");
  rows = static_cast<std::size_t>(std::ceil((roi.x_max - roi.x_min) / cell - 1e-9));
  cols = static_cast<std::size_t>(std::ceil((roi.y_max - roi.y_min) / cell - 1e-9));
  rows = std::max<std::size_t>(rows, 1);
  cols = std::max<std::size_t>(cols, 1);
  counts.assign(rows * cols, 0);
}

void Histogram2D::add(double x, double y) {
  auto bin = [&](double v, double lo, std::size_t n) {
    const double f = std::floor((v - lo) / cell);
    if (!(f > 0.0)) return std::size_t{0};
    return static_cast<std::size_t>(std::min(f, static_cast<double>(n - 1)));
  };
  ++counts[bin(x, roi.x_min, rows) * cols + bin(y, roi.y_min, cols)];
}

std::uint64_t Histogram2D::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

void StatsConfig::validate() const {
  if (!xy_roi.valid() || !(xy_cell > 0.0)) fail(ErrorCode::InvalidConfig, "bad xy histogram");
  if (!(height_hi > height_lo) || height_bins == 0) fail(ErrorCode::InvalidConfig, "bad height histogram");
  if (!(curvature_hi > curvature_lo) || curvature_bins == 0) {
    fail(ErrorCode::InvalidConfig, "bad curvature histogram");
  }
  if (!(slope_hi > slope_lo) || slope_bins == 0) fail(ErrorCode::InvalidConfig, "bad slope histogram");
}

double lane_curvature_a(const LanePolyline& lane) {
  if (lane.size() < 4) fail(ErrorCode::RankDeficient, "fewer than four lane points");
  const OrderingAxis axis = ordering_axis(lane.points);
  std::vector<Vec2> samples;
  samples.reserve(lane.size());
  for (const auto& p : lane.points) {
    const Vec2 xy = p.head<2>();
    samples.emplace_back(axis.along(xy), axis.lateral(xy));
  }
  return fit_cubic(samples).a;
}

double lane_slope_deg(const LanePolyline& lane) {
  if (lane.empty()) return 0.0;
  double run = 0.0;
  for (std::size_t i = 1; i < lane.size(); ++i) {
    run += (lane.points[i].head<2>() - lane.points[i - 1].head<2>()).norm();
  }
  const double rise = lane.points.back().z() - lane.points.front().z();
  return std::atan2(rise, run) * 180.0 / std::numbers::pi;
}

StatsReport dataset_stats(std::span<const LanePolyline> lanes, const StatsConfig& cfg) {
  cfg.validate();
  if (lanes.empty()) fail(ErrorCode::EmptySet, "no lanes to summarize");
  StatsReport r;
  r.xy = Histogram2D(cfg.xy_roi, cfg.xy_cell);
  r.height = Histogram1D(cfg.height_lo, cfg.height_hi, cfg.height_bins);
  r.curvature = Histogram1D(cfg.curvature_lo, cfg.curvature_hi, cfg.curvature_bins);
  r.slope = Histogram1D(cfg.slope_lo, cfg.slope_hi, cfg.slope_bins);
  r.lane_count = lanes.size();
  for (const auto& lane : lanes) {
    LaneStats ls;
    ls.instance_id = lane.instance_id;
    ls.points = lane.size();
    for (const auto& p : lane.points) {
      r.xy.add(p.x(), p.y());
      r.height.add(p.z());
    }
    r.point_count += lane.size();
    try {
      ls.a = lane_curvature_a(lane);
      ls.has_curvature = true;
      r.curvature.add(ls.a);
    } catch (const Error&) {
      ++r.skipped_curvature;
    }
    ls.slope_deg = lane_slope_deg(lane);
    r.slope.add(ls.slope_deg);
    r.lanes.push_back(ls);
  }
  return r;
}

}  // namespace laneforge::metrics
