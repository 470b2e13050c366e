#include <cmath>
#include <unordered_map>

#include "laneforge/errors.hpp"
#include "laneforge/rasterize.hpp"

namespace laneforge::raster {
namespace {

struct KeyHash {
  std::size_t operator()(const std::array<long, 3>& k) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (long v : k) {
      h ^= static_cast<std::size_t>(v) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

long voxel_coordinate(double coord, double size) {
  long k = static_cast<long>(std::floor(coord / size));
  if (static_cast<double>(k) * size > coord) {
    --k;
  } else if (static_cast<double>(k + 1) * size <= coord) {
    ++k;
  }
  return k;
}

VoxelGrid voxelize(const PointCloud& cloud, const Vec3& voxel_size, const VoxelCaps& caps) {
  if (!(voxel_size.minCoeff() > 0.0)) fail(ErrorCode::InvalidConfig, "voxel size must be positive");
  VoxelGrid grid;
  grid.voxel_size = voxel_size;
  grid.caps = caps;
  std::unordered_map<std::array<long, 3>, std::size_t, KeyHash> slot;

  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Point3I& p = cloud.points[i];
    const std::array<long, 3> key{voxel_coordinate(p.x, voxel_size.x()),
                                  voxel_coordinate(p.y, voxel_size.y()),
                                  voxel_coordinate(p.z, voxel_size.z())};
    auto it = slot.find(key);
    if (it == slot.end()) {
      if (grid.voxels.size() >= caps.max_voxels) {
        ++grid.dropped_no_voxel;
        continue;
      }
      it = slot.emplace(key, grid.voxels.size()).first;
      grid.voxels.push_back(Voxel{key, {}});
    }
    Voxel& v = grid.voxels[it->second];
    if (v.points.size() >= caps.max_points_per_voxel) {
      ++grid.dropped_overflow;
      continue;
    }
    v.points.push_back(i);
    ++grid.stored_points;
  }
  return grid;
}

}  // namespace laneforge::raster
