#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "laneforge/annotate.hpp"
#include "laneforge/metrics.hpp"
#include "laneforge/rasterize.hpp"
#include "laneforge/scenegen.hpp"
#include "laneforge/types.hpp"

namespace laneforge::io {

// ---------------------------------------------------------------------------
// Binary point clouds
//
// Little-endian layout: "LSVL", u32 version, u64 point count, u32 record
// size (16), then count records of four f32 (x, y, z, intensity).

inline constexpr char kCloudMagic[4] = {'L', 'S', 'V', 'L'};
inline constexpr std::uint32_t kCloudVersion = 1;
inline constexpr std::size_t kCloudHeaderBytes = 20;
inline constexpr std::size_t kCloudRecordBytes = 16;

std::vector<std::uint8_t> encode_cloud(const PointCloud& cloud);
/// Throws BadMagic, VersionUnsupported or TruncatedFile (any length other
/// than header + count * 16 bytes).
PointCloud decode_cloud(std::span<const std::uint8_t> bytes);

/// The frame id is not stored; read_cloud takes it from the file stem.
void write_cloud(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_cloud(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Lane files (JSON)

enum class LaneSource { Manual, Auto };

struct CurveCoefficients {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  bool operator==(const CurveCoefficients&) const = default;
};

struct LaneRecord {
  LanePolyline lane;
  LaneSource source = LaneSource::Manual;
  std::optional<CurveCoefficients> curve;
};

struct LaneFile {
  std::string frame_id;
  std::vector<LaneRecord> lanes;

  std::vector<LanePolyline> polylines() const;
};

bool structurally_equal(const LaneFile& a, const LaneFile& b);

nlohmann::json lanes_to_json(const LaneFile& file);
/// Throws SchemaViolation naming the offending JSON path.
LaneFile lanes_from_json(const nlohmann::json& doc);

void write_lanes(const LaneFile& file, const std::filesystem::path& path);
LaneFile read_lanes(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run configuration

struct RasterConfig {
  Roi roi;
  double bev_resolution = 0.04;
  double label_resolution = 0.32;
  Vec3 voxel_size{0.1, 0.1, 0.2};
  raster::VoxelCaps voxel_caps;
  std::size_t knn_k = 12;
  double confidence_tau = 0.5;
  double dbscan_eps = 0.96;
  int dbscan_min_pts = 5;

  void validate() const;
};

struct RunConfig {
  scene::SceneConfig scene;
  annotate::PipelineConfig pipeline;
  RasterConfig rasterize;
  metrics::EvalConfig metrics;

  void validate() const;
};

nlohmann::json config_to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown keys and wrongly typed values
/// throw SchemaViolation. The result is validated (InvalidConfig).
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig read_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Reports

nlohmann::json pipeline_report_to_json(const annotate::PipelineReport& report);
nlohmann::json eval_report_to_json(const metrics::EvalReport& report);
nlohmann::json stats_report_to_json(const metrics::StatsReport& report);
nlohmann::json bev_stats_to_json(const raster::BevGrid& grid);

/// "lo,hi,count" rows.
std::string histogram_csv(const Histogram1D& h);
/// "x_lo,y_lo,count" rows for every cell.
std::string histogram2d_csv(const metrics::Histogram2D& h);
/// Plain-text graymap of per-cell point counts, clipped at 255.
std::string bev_to_pgm(const raster::BevGrid& grid);

// ---------------------------------------------------------------------------
// Files

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);
std::string read_file(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Command line

/// Exit codes: 0 success, 1 usage error, 2 data error.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace laneforge::io
