#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"

#include "laneforge/errors.hpp"
#include "laneforge/io.hpp"

namespace laneforge::io {

using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path) {
  return path.empty() ? RunConfig{} : read_config(path);
}

void echo(const std::string& command, const json& resolved) {
  std::cout << json{{"command", command}, {"resolved", resolved}}.dump() << '\n';
}

// Flag, then LANEFORGE_THREADS, then an explicit pipeline.threads in the
// config file, then the number of available cores.
int resolve_threads(std::optional<int> flag, std::optional<int> from_config) {
  if (flag) {
    if (*flag < 1) throw UsageError("--threads must be at least 1");
    return *flag;
  }
  if (const char* env = std::getenv("LANEFORGE_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) {
      throw UsageError(std::string("LANEFORGE_THREADS must be a positive integer, got \"") + env + "\"");
    }
    return static_cast<int>(v);
  }
  if (from_config) return *from_config;
  return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

bool config_sets_threads(const std::string& path) {
  if (path.empty()) return false;
  const json doc = read_json(path);
  return doc.contains("pipeline") && doc["pipeline"].is_object() && doc["pipeline"].contains("threads");
}

std::filesystem::path with_suffix(const std::filesystem::path& base, const std::string& suffix) {
  std::filesystem::path p = base;
  p.replace_extension();
  p += suffix;
  return p;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"laneforge: synthetic LiDAR lane annotation toolkit", "laneforge"};
  app.require_subcommand(1);

  std::string config_path;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic scene");
  std::string gen_cloud, gen_lanes, gen_gt;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--config", config_path, "Run configuration JSON")->check(CLI::ExistingFile);
  gen->add_option("--seed", gen_seed, "Override scene.seed");
  gen->add_option("--out-cloud", gen_cloud, "Output point cloud (.lsvl)")->required();
  gen->add_option("--out-lanes", gen_lanes, "Output sparse manual lanes (JSON)")->required();
  gen->add_option("--out-gt", gen_gt, "Output dense ground-truth lanes (JSON)");

  // annotate
  auto* ann = app.add_subcommand("annotate", "Run the automatic annotation pipeline");
  std::string ann_cloud, ann_lanes, ann_out, ann_report;
  std::optional<int> ann_threads;
  ann->add_option("--config", config_path, "Run configuration JSON")->check(CLI::ExistingFile);
  ann->add_option("--cloud", ann_cloud, "Input point cloud")->required()->check(CLI::ExistingFile);
  ann->add_option("--lanes", ann_lanes, "Manual lanes (JSON)")->required()->check(CLI::ExistingFile);
  ann->add_option("--out", ann_out, "Output auto lanes (JSON)")->required();
  ann->add_option("--report", ann_report, "Per-lane pipeline report (JSON)");
  ann->add_option("--threads", ann_threads, "Worker threads (overrides LANEFORGE_THREADS)");

  // bev
  auto* bev = app.add_subcommand("bev", "Pillarize a cloud into a BEV grid");
  std::string bev_cloud, bev_out, bev_stats;
  std::vector<double> bev_roi;
  std::optional<double> bev_res;
  bev->add_option("--config", config_path, "Run configuration JSON")->check(CLI::ExistingFile);
  bev->add_option("--cloud", bev_cloud, "Input point cloud")->required()->check(CLI::ExistingFile);
  bev->add_option("--roi", bev_roi, "x_min x_max y_min y_max")->expected(4);
  bev->add_option("--res", bev_res, "Cell size in metres");
  bev->add_option("--out", bev_out, "Output graymap (P2 text)")->required();
  bev->add_option("--stats", bev_stats, "Output grid statistics (JSON)");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate predicted lanes against ground truth");
  std::vector<std::string> ev_pred, ev_gt;
  std::string ev_out;
  std::optional<double> ev_tau, ev_spacing;
  ev->add_option("--config", config_path, "Run configuration JSON")->check(CLI::ExistingFile);
  ev->add_option("--pred", ev_pred, "Predicted lane files, one per frame")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--gt", ev_gt, "Ground-truth lane files, same order")
      ->required()
      ->check(CLI::ExistingFile);
  ev->add_option("--tau", ev_tau, "Match threshold (mean distance, m)");
  ev->add_option("--spacing", ev_spacing, "Resampling spacing (m)");
  ev->add_option("--out", ev_out, "Output report (JSON)")->required();

  // stats
  auto* st = app.add_subcommand("stats", "Dataset statistics over lane files");
  std::vector<std::string> st_lanes;
  std::string st_out;
  st->add_option("--config", config_path, "Run configuration JSON")->check(CLI::ExistingFile);
  st->add_option("--lanes", st_lanes, "Lane files")->required()->check(CLI::ExistingFile);
  st->add_option("--out", st_out, "Output report (JSON); CSVs are written beside it")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();  // program name
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg = load_config(config_path);

    if (gen->parsed()) {
      if (gen_seed) cfg.scene.seed = *gen_seed;
      cfg.scene.validate();
      echo("gen", {{"scene", config_to_json(cfg)["scene"]}});
      const auto sc = scene::generate_scene(cfg.scene);
      write_cloud(sc.cloud, gen_cloud);
      LaneFile manual{sc.cloud.frame_id, {}};
      for (const auto& l : sc.gt_sparse_lanes) manual.lanes.push_back({l, LaneSource::Manual, {}});
      write_lanes(manual, gen_lanes);
      if (!gen_gt.empty()) {
        LaneFile gt{sc.cloud.frame_id, {}};
        for (const auto& l : sc.gt_dense_lanes) gt.lanes.push_back({l, LaneSource::Manual, {}});
        write_lanes(gt, gen_gt);
      }
      return 0;
    }

    if (ann->parsed()) {
      cfg.pipeline.threads = resolve_threads(
          ann_threads, config_sets_threads(config_path) ? std::optional<int>(cfg.pipeline.threads)
                                                        : std::nullopt);
      cfg.pipeline.validate();
      echo("annotate", {{"pipeline", config_to_json(cfg)["pipeline"]}});
      const PointCloud cloud = read_cloud(ann_cloud);
      const LaneFile manual = read_lanes(ann_lanes);
      const auto result = annotate::run_pipeline(cloud, manual.polylines(), cfg.pipeline);
      LaneFile out{manual.frame_id, {}};
      std::size_t next = 0;
      for (const auto& rep : result.report.lanes) {
        if (!rep.ok) {
          std::cerr << "lane " << rep.instance_id << ": " << rep.error << '\n';
          continue;
        }
        LaneRecord rec{result.lanes[next++], LaneSource::Auto, {}};
        if (rep.lateral) {
          rec.curve = CurveCoefficients{rep.lateral->a, rep.lateral->b, rep.lateral->c, rep.lateral->d};
        }
        out.lanes.push_back(std::move(rec));
      }
      write_lanes(out, ann_out);
      if (!ann_report.empty()) {
        json rep = pipeline_report_to_json(result.report);
        rep["frame_id"] = manual.frame_id;
        write_json(ann_report, rep);
      }
      return 0;
    }

    if (bev->parsed()) {
      if (!bev_roi.empty()) {
        cfg.rasterize.roi = {bev_roi[0], bev_roi[1], bev_roi[2], bev_roi[3]};
      }
      if (bev_res) cfg.rasterize.bev_resolution = *bev_res;
      cfg.rasterize.validate();
      echo("bev", {{"rasterize", config_to_json(cfg)["rasterize"]}});
      const PointCloud cloud = read_cloud(bev_cloud);
      const auto grid = raster::pillarize(cloud, cfg.rasterize.roi, cfg.rasterize.bev_resolution);
      write_file_atomic(bev_out, bev_to_pgm(grid));
      if (!bev_stats.empty()) write_json(bev_stats, bev_stats_to_json(grid));
      return 0;
    }

    if (ev->parsed()) {
      if (ev_pred.size() != ev_gt.size()) {
        throw UsageError("--pred and --gt must list the same number of files");
      }
      if (ev_tau) cfg.metrics.match_threshold = *ev_tau;
      if (ev_spacing) cfg.metrics.resample_spacing = *ev_spacing;
      cfg.metrics.validate();
      echo("eval", {{"metrics", config_to_json(cfg)["metrics"]}});
      std::vector<metrics::Frame> frames;
      for (std::size_t i = 0; i < ev_pred.size(); ++i) {
        const LaneFile pred = read_lanes(ev_pred[i]);
        const LaneFile gt = read_lanes(ev_gt[i]);
        frames.push_back({gt.frame_id, pred.polylines(), gt.polylines()});
      }
      const auto report = metrics::evaluate(frames, cfg.metrics);
      write_json(ev_out, eval_report_to_json(report));
      std::cout << json{{"precision", report.precision}, {"recall", report.recall},
                        {"f1", report.f1},               {"cd_3d", report.cd_3d},
                        {"cd_bev", report.cd_bev}}
                       .dump()
                << '\n';
      return 0;
    }

    if (st->parsed()) {
      metrics::StatsConfig sc;
      sc.xy_roi = cfg.rasterize.roi;
      echo("stats", {{"xy_roi", config_to_json(cfg)["rasterize"]["roi"]}});
      std::vector<LanePolyline> lanes;
      for (const auto& path : st_lanes) {
        for (auto& l : read_lanes(path).polylines()) lanes.push_back(std::move(l));
      }
      const auto report = metrics::dataset_stats(lanes, sc);
      write_json(st_out, stats_report_to_json(report));
      write_file_atomic(with_suffix(st_out, "_xy.csv"), histogram2d_csv(report.xy));
      write_file_atomic(with_suffix(st_out, "_height.csv"), histogram_csv(report.height));
      write_file_atomic(with_suffix(st_out, "_curvature.csv"), histogram_csv(report.curvature));
      write_file_atomic(with_suffix(st_out, "_slope.csv"), histogram_csv(report.slope));
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

int cli_main(int argc, const char* const* argv) {
  return cli_main(std::vector<std::string>(argv, argv + argc));
}

}  // namespace laneforge::io
