#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "laneforge/types.hpp"

namespace laneforge::raster {

/// Cell geometry shared by the BEV grid and the lane mask. Cells are
/// half-open [lo, lo + res); a coordinate exactly on the roi's upper edge is
/// clamped into the last cell.
struct GridGeometry {
  Roi roi;
  double resolution = 0.04;
  long rows = 0;  // along x (L)
  long cols = 0;  // along y (W)

  static GridGeometry make(const Roi& roi, double resolution);

  /// Cell index along x / y, or -1 when outside the roi.
  long index_x(double x) const;
  long index_y(double y) const;
  double cell_lo_x(long ix) const { return roi.x_min + static_cast<double>(ix) * resolution; }
  double cell_lo_y(long iy) const { return roi.y_min + static_cast<double>(iy) * resolution; }
  Vec2 cell_center(long ix, long iy) const;
  std::size_t cell_count() const { return static_cast<std::size_t>(rows * cols); }
  std::size_t flat(long ix, long iy) const { return static_cast<std::size_t>(ix * cols + iy); }
};

struct BevCell {
  std::uint32_t count = 0;
  double intensity_sum = 0.0;
  float max_z = 0.0F;

  double mean_intensity() const { return count ? intensity_sum / count : 0.0; }
};

/// Pseudo-image of pillarized points.
struct BevGrid {
  GridGeometry geometry;
  std::vector<BevCell> cells;  // row-major, rows = x cells
  std::size_t in_roi_points = 0;
  std::size_t dropped_points = 0;

  const BevCell& at(long ix, long iy) const { return cells[geometry.flat(ix, iy)]; }
  std::size_t occupied_cells() const;
};

BevGrid pillarize(const PointCloud& cloud, const Roi& roi, double resolution);

struct LaneMask {
  GridGeometry geometry;
  std::vector<std::uint8_t> flag;
  std::vector<double> height;  // mean z of contributing samples, 0 where unflagged
  std::vector<std::uint32_t> samples;

  bool flagged(long ix, long iy) const { return flag[geometry.flat(ix, iy)] != 0; }
  std::size_t flagged_count() const;
};

/// Flags every cell that contains a point of some lane segment under the
/// half-open cell convention. Each segment contributes one height sample
/// per touched cell: z at the midpoint of the segment's piece in that cell.
LaneMask rasterize_lanes(std::span<const LanePolyline> lanes, const Roi& roi, double resolution);

/// One proposal per flagged cell, at the cell centre with the cell height.
/// Ordered by (x index, y index).
std::vector<Vec3> lift_mask_to_3d(const LaneMask& mask);

struct VoxelCaps {
  std::size_t max_points_per_voxel = 32;
  std::size_t max_voxels = 12000;
};

struct Voxel {
  std::array<long, 3> index{};
  std::vector<std::size_t> points;  // cloud indices, arrival order
};

struct VoxelGrid {
  Vec3 voxel_size{0.1, 0.1, 0.2};
  VoxelCaps caps;
  std::vector<Voxel> voxels;  // admission order
  std::size_t stored_points = 0;
  std::size_t dropped_overflow = 0;   // voxel already held max_points_per_voxel
  std::size_t dropped_no_voxel = 0;   // voxel budget exhausted

  std::size_t dropped_points() const { return dropped_overflow + dropped_no_voxel; }
};

/// floor(coord / size) voxel index along one axis, corrected so that
/// idx * size <= coord < (idx + 1) * size holds in floating point.
long voxel_coordinate(double coord, double size);

/// Points are scanned in ascending index; per-voxel lists truncate at the
/// point cap and no new voxel is admitted once the voxel cap is reached.
VoxelGrid voxelize(const PointCloud& cloud, const Vec3& voxel_size, const VoxelCaps& caps = {});

inline constexpr int kNoise = -1;

/// DBSCAN over xy. Clusters are numbered 0.. in order of discovery while
/// scanning points in input order; noise is kNoise.
std::vector<int> cluster_instances(std::span<const Vec3> proposals, double eps, int min_pts);

}  // namespace laneforge::raster
