#include <algorithm>
#include <sstream>

#include "laneforge/io.hpp"

namespace laneforge::io {

using nlohmann::json;

namespace {

json curve_json(const CubicCurve& c) {
  return {{"a", c.a},
          {"b", c.b},
          {"c", c.c},
          {"d", c.d},
          {"axis_origin", {c.axis.origin.x(), c.axis.origin.y()}},
          {"axis_direction", {c.axis.direction.x(), c.axis.direction.y()}}};
}

json histogram_json(const Histogram1D& h) {
  return {{"lo", h.lo}, {"hi", h.hi}, {"bin_width", h.bin_width()}, {"counts", h.counts}};
}

json prf_json(const metrics::PrecisionRecall& c) {
  return {{"tp", c.tp},         {"fp", c.fp},         {"fn", c.fn},
          {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
}

}  // namespace

json pipeline_report_to_json(const annotate::PipelineReport& report) {
  json lanes = json::array();
  for (const auto& l : report.lanes) {
    json j = {{"instance_id", l.instance_id},
              {"ok", l.ok},
              {"input_points", l.input_points},
              {"accepted", l.accepted},
              {"recalibrated", l.recalibrated},
              {"unvalidated", l.unvalidated},
              {"skeleton_points", l.skeleton_points},
              {"ground_fit_failures", l.ground_fit_failures},
              {"expanded_points", l.expanded_points},
              {"output_points", l.output_points}};
    if (!l.ok) j["error"] = l.error;
    if (l.lateral) j["lateral"] = curve_json(*l.lateral);
    if (l.vertical) j["vertical"] = curve_json(*l.vertical);
    lanes.push_back(std::move(j));
  }
  return {{"lanes", std::move(lanes)}};
}

json eval_report_to_json(const metrics::EvalReport& report) {
  json frames = json::array();
  for (const auto& f : report.frames) {
    json pairs = json::array();
    for (const auto& p : f.match.pairs) {
      pairs.push_back({{"pred", p.pred}, {"gt", p.gt}, {"cost", p.cost}});
    }
    json j = prf_json(f.counts);
    j["frame_id"] = f.frame_id;
    j["cd_3d"] = f.cd_3d;
    j["cd_bev"] = f.cd_bev;
    j["pairs"] = std::move(pairs);
    j["unmatched_pred"] = f.match.unmatched_pred;
    j["unmatched_gt"] = f.match.unmatched_gt;
    frames.push_back(std::move(j));
  }
  return {{"precision", report.precision}, {"recall", report.recall},
          {"f1", report.f1},               {"cd_3d", report.cd_3d},
          {"cd_bev", report.cd_bev},       {"matched_pairs", report.matched_pairs},
          {"frames", std::move(frames)}};
}

json stats_report_to_json(const metrics::StatsReport& report) {
  json lanes = json::array();
  for (const auto& l : report.lanes) {
    json j = {{"instance_id", l.instance_id}, {"points", l.points}, {"slope_deg", l.slope_deg}};
    j["a"] = l.has_curvature ? json(l.a) : json(nullptr);
    lanes.push_back(std::move(j));
  }
  const auto& xy = report.xy;
  return {{"lane_count", report.lane_count},
          {"point_count", report.point_count},
          {"skipped_curvature", report.skipped_curvature},
          {"xy",
           {{"roi", {{"x_min", xy.roi.x_min}, {"x_max", xy.roi.x_max},
                     {"y_min", xy.roi.y_min}, {"y_max", xy.roi.y_max}}},
            {"cell", xy.cell},
            {"rows", xy.rows},
            {"cols", xy.cols},
            {"counts", xy.counts}}},
          {"height", histogram_json(report.height)},
          {"curvature_a", histogram_json(report.curvature)},
          {"slope_deg", histogram_json(report.slope)},
          {"lanes", std::move(lanes)}};
}

json bev_stats_to_json(const raster::BevGrid& grid) {
  const auto& g = grid.geometry;
  std::uint32_t max_count = 0;
  double max_intensity = 0.0;
  for (const auto& c : grid.cells) {
    max_count = std::max(max_count, c.count);
    max_intensity = std::max(max_intensity, c.mean_intensity());
  }
  return {{"roi", {{"x_min", g.roi.x_min}, {"x_max", g.roi.x_max},
                   {"y_min", g.roi.y_min}, {"y_max", g.roi.y_max}}},
          {"resolution", g.resolution},
          {"rows", g.rows},
          {"cols", g.cols},
          {"in_roi_points", grid.in_roi_points},
          {"dropped_points", grid.dropped_points},
          {"occupied_cells", grid.occupied_cells()},
          {"max_cell_count", max_count},
          {"max_mean_intensity", max_intensity}};
}

std::string histogram_csv(const Histogram1D& h) {
  std::ostringstream out;
  out.precision(17);
  out << "lo,hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double lo = h.lo + static_cast<double>(i) * h.bin_width();
    out << lo << ',' << lo + h.bin_width() << ',' << h.counts[i] << '\n';
  }
  return out.str();
}

std::string histogram2d_csv(const metrics::Histogram2D& h) {
  std::ostringstream out;
  out.precision(17);
  out << "x_lo,y_lo,count\n";
  for (std::size_t r = 0; r < h.rows; ++r) {
    for (std::size_t c = 0; c < h.cols; ++c) {
      out << h.roi.x_min + static_cast<double>(r) * h.cell << ','
          << h.roi.y_min + static_cast<double>(c) * h.cell << ',' << h.at(r, c) << '\n';
    }
  }
  return out.str();
}

std::string bev_to_pgm(const raster::BevGrid& grid) {
  const auto& g = grid.geometry;
  std::ostringstream out;
  // Image rows run along x, columns along y.
  out << "P2\n" << g.cols << ' ' << g.rows << "\n255\n";
  for (long ix = 0; ix < g.rows; ++ix) {
    for (long iy = 0; iy < g.cols; ++iy) {
      if (iy) out << ' ';
      out << std::min<std::uint32_t>(grid.at(ix, iy).count, 255);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace laneforge::io
