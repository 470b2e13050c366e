#include <cmath>
#include <set>

#include "laneforge/errors.hpp"
#include "laneforge/io.hpp"

namespace laneforge::io {

using nlohmann::json;

namespace {

// Reads optional keys from one JSON object and rejects anything it was not
// asked about.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) fail(ErrorCode::SchemaViolation, path_ + ": expected an object");
  }

  void number(const char* key, double& dst) {
    if (const json* v = take(key)) {
      if (!v->is_number()) bad(key, "expected a number");
      dst = v->get<double>();
    }
  }

  template <class Int>
  void integer(const char* key, Int& dst) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) bad(key, "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (!v->is_number_unsigned()) bad(key, "expected a non-negative integer");
        dst = static_cast<Int>(v->get<std::uint64_t>());
      } else {
        dst = static_cast<Int>(v->get<std::int64_t>());
      }
    }
  }

  void boolean(const char* key, bool& dst) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) bad(key, "expected true or false");
      dst = v->get<bool>();
    }
  }

  void numbers(const char* key, std::vector<double>& dst) {
    if (const json* v = take(key)) {
      if (v->is_number()) {
        dst = {v->get<double>()};
        return;
      }
      if (!v->is_array()) bad(key, "expected a number or an array of numbers");
      dst.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) bad(key, "expected an array of numbers");
        dst.push_back(e.get<double>());
      }
    }
  }

  void vec3(const char* key, Vec3& dst) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != 3) bad(key, "expected [x, y, z]");
      for (int i = 0; i < 3; ++i) {
        if (!(*v)[static_cast<std::size_t>(i)].is_number()) bad(key, "expected [x, y, z]");
        dst[i] = (*v)[static_cast<std::size_t>(i)].get<double>();
      }
    }
  }

  void roi(const char* key, Roi& dst) {
    if (const json* v = take(key)) {
      Section s(*v, path_ + "." + key);
      s.number("x_min", dst.x_min);
      s.number("x_max", dst.x_max);
      s.number("y_min", dst.y_min);
      s.number("y_max", dst.y_max);
      s.finish();
    }
  }

  void finish() const {
    for (const auto& [k, v] : doc_.items()) {
      if (!used_.count(k)) fail(ErrorCode::SchemaViolation, path_ + "." + k + ": unknown key");
    }
  }

 private:
  const json* take(const char* key) {
    used_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  [[noreturn]] void bad(const char* key, const std::string& what) const {
    fail(ErrorCode::SchemaViolation, path_ + "." + key + ": " + what);
  }

  const json& doc_;
  std::string path_;
  std::set<std::string> used_;
};

json roi_json(const Roi& r) {
  return {{"x_min", r.x_min}, {"x_max", r.x_max}, {"y_min", r.y_min}, {"y_max", r.y_max}};
}

}  // namespace

void RasterConfig::validate() const {
  if (!roi.valid()) fail(ErrorCode::InvalidConfig, "rasterize.roi must have positive extent");
  if (!(bev_resolution > 0.0)) fail(ErrorCode::InvalidConfig, "rasterize.bev_resolution must be > 0");
  if (!(label_resolution > 0.0)) {
    fail(ErrorCode::InvalidConfig, "rasterize.label_resolution must be > 0");
  }
  if (!(voxel_size.array() > 0.0).all()) {
    fail(ErrorCode::InvalidConfig, "rasterize.voxel_size entries must be > 0");
  }
  if (voxel_caps.max_points_per_voxel == 0 || voxel_caps.max_voxels == 0) {
    fail(ErrorCode::InvalidConfig, "rasterize voxel caps must be positive");
  }
  if (knn_k == 0) fail(ErrorCode::InvalidConfig, "rasterize.knn_k must be positive");
  if (!(confidence_tau > 0.0)) fail(ErrorCode::InvalidConfig, "rasterize.confidence_tau must be > 0");
  if (!(dbscan_eps > 0.0)) fail(ErrorCode::InvalidConfig, "rasterize.dbscan_eps must be > 0");
  if (dbscan_min_pts < 1) fail(ErrorCode::InvalidConfig, "rasterize.dbscan_min_pts must be >= 1");
}

void RunConfig::validate() const {
  scene.validate();
  pipeline.validate();
  rasterize.validate();
  metrics.validate();
}

json config_to_json(const RunConfig& cfg) {
  const auto& s = cfg.scene;
  const auto& p = cfg.pipeline;
  const auto& r = cfg.rasterize;
  json doc;
  doc["scene"] = {{"seed", s.seed},
                  {"sensor_height", s.sensor_height},
                  {"ground_slope", s.ground_slope},
                  {"lane_count", s.lane_count},
                  {"lane_curvature_a", s.lane_curvature_a},
                  {"lane_spacing", s.lane_spacing},
                  {"lane_width", s.lane_width},
                  {"point_density", s.point_density},
                  {"noise_sigma", s.noise_sigma},
                  {"lane_intensity_mean", s.lane_intensity_mean},
                  {"ground_intensity_mean", s.ground_intensity_mean},
                  {"distractor_intensity_mean", s.distractor_intensity_mean},
                  {"intensity_sigma", s.intensity_sigma},
                  {"roi", roi_json(s.roi)},
                  {"annotation_spacing", s.annotation_spacing},
                  {"annotation_jitter", s.annotation_jitter},
                  {"curbs", s.curbs},
                  {"shrub_count", s.shrub_count}};
  doc["pipeline"] = {{"ransac_validate_threshold", p.ransac_validate_threshold},
                     {"ransac_inlier_threshold", p.ransac_inlier_threshold},
                     {"ransac_iterations", p.ransac_iterations},
                     {"ransac_seed", p.ransac_seed},
                     {"neighborhood_radius", p.neighborhood_radius},
                     {"skeleton_spacing", p.skeleton_spacing},
                     {"ball_radius", p.ball_radius},
                     {"intensity_percentile", p.intensity_percentile},
                     {"coplanarity_tol", p.coplanarity_tol},
                     {"interp_spacing", p.interp_spacing},
                     {"threads", p.threads}};
  doc["rasterize"] = {{"roi", roi_json(r.roi)},
                      {"bev_resolution", r.bev_resolution},
                      {"label_resolution", r.label_resolution},
                      {"voxel_size", {r.voxel_size.x(), r.voxel_size.y(), r.voxel_size.z()}},
                      {"max_points_per_voxel", r.voxel_caps.max_points_per_voxel},
                      {"max_voxels", r.voxel_caps.max_voxels},
                      {"knn_k", r.knn_k},
                      {"confidence_tau", r.confidence_tau},
                      {"dbscan_eps", r.dbscan_eps},
                      {"dbscan_min_pts", r.dbscan_min_pts}};
  doc["metrics"] = {{"resample_spacing", cfg.metrics.resample_spacing},
                    {"match_threshold", cfg.metrics.match_threshold}};
  return doc;
}

RunConfig config_from_json(const json& doc) {
  RunConfig cfg;
  if (!doc.is_object()) fail(ErrorCode::SchemaViolation, "$: expected an object");
  const json empty = json::object();
  auto section = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    return it == doc.end() ? empty : *it;
  };

  {
    auto& s = cfg.scene;
    Section sec(section("scene"), "$.scene");
    sec.integer("seed", s.seed);
    sec.number("sensor_height", s.sensor_height);
    sec.number("ground_slope", s.ground_slope);
    sec.integer("lane_count", s.lane_count);
    sec.numbers("lane_curvature_a", s.lane_curvature_a);
    sec.number("lane_spacing", s.lane_spacing);
    sec.number("lane_width", s.lane_width);
    sec.number("point_density", s.point_density);
    sec.number("noise_sigma", s.noise_sigma);
    sec.number("lane_intensity_mean", s.lane_intensity_mean);
    sec.number("ground_intensity_mean", s.ground_intensity_mean);
    sec.number("distractor_intensity_mean", s.distractor_intensity_mean);
    sec.number("intensity_sigma", s.intensity_sigma);
    sec.roi("roi", s.roi);
    sec.number("annotation_spacing", s.annotation_spacing);
    sec.number("annotation_jitter", s.annotation_jitter);
    sec.boolean("curbs", s.curbs);
    sec.integer("shrub_count", s.shrub_count);
    sec.finish();
  }
  {
    auto& p = cfg.pipeline;
    Section sec(section("pipeline"), "$.pipeline");
    sec.number("ransac_validate_threshold", p.ransac_validate_threshold);
    sec.number("ransac_inlier_threshold", p.ransac_inlier_threshold);
    sec.integer("ransac_iterations", p.ransac_iterations);
    sec.integer("ransac_seed", p.ransac_seed);
    sec.number("neighborhood_radius", p.neighborhood_radius);
    sec.number("skeleton_spacing", p.skeleton_spacing);
    sec.number("ball_radius", p.ball_radius);
    sec.number("intensity_percentile", p.intensity_percentile);
    sec.number("coplanarity_tol", p.coplanarity_tol);
    sec.number("interp_spacing", p.interp_spacing);
    sec.integer("threads", p.threads);
    sec.finish();
  }
  {
    auto& r = cfg.rasterize;
    Section sec(section("rasterize"), "$.rasterize");
    sec.roi("roi", r.roi);
    sec.number("bev_resolution", r.bev_resolution);
    sec.number("label_resolution", r.label_resolution);
    sec.vec3("voxel_size", r.voxel_size);
    sec.integer("max_points_per_voxel", r.voxel_caps.max_points_per_voxel);
    sec.integer("max_voxels", r.voxel_caps.max_voxels);
    sec.integer("knn_k", r.knn_k);
    sec.number("confidence_tau", r.confidence_tau);
    sec.number("dbscan_eps", r.dbscan_eps);
    sec.integer("dbscan_min_pts", r.dbscan_min_pts);
    sec.finish();
  }
  {
    Section sec(section("metrics"), "$.metrics");
    sec.number("resample_spacing", cfg.metrics.resample_spacing);
    sec.number("match_threshold", cfg.metrics.match_threshold);
    sec.finish();
  }
  for (const auto& [k, v] : doc.items()) {
    if (k != "scene" && k != "pipeline" && k != "rasterize" && k != "metrics") {
      fail(ErrorCode::SchemaViolation, "$." + k + ": unknown key");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig read_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

}  // namespace laneforge::io
