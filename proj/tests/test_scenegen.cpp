#include <gtest/gtest.h>

#include <cmath>

#include "laneforge/errors.hpp"
#include "laneforge/lane_geometry.hpp"
#include "laneforge/scenegen.hpp"
#include "laneforge/stats_util.hpp"

using namespace laneforge;
using namespace laneforge::scene;

namespace {

double xy_distance_to_lane(const Vec3& p, const LanePolyline& lane) {
  std::vector<Vec3> flat;
  for (const auto& q : lane.points) flat.emplace_back(q.x(), q.y(), 0.0);
  return distance_to_polyline(Vec3(p.x(), p.y(), 0.0), flat);
}

double xy_distance_to_any(const Vec3& p, const std::vector<LanePolyline>& lanes) {
  double best = 1e300;
  for (const auto& l : lanes) best = std::min(best, xy_distance_to_lane(p, l));
  return best;
}

}  // namespace

TEST(SceneGen, FlatNoiselessGroundIsExact) {
  SceneConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.ground_slope = 0.0;
  cfg.sensor_height = 2.0;
  const auto s = generate_scene(cfg);
  std::size_t ground = 0;
  for (std::size_t i = 0; i < s.cloud.size(); ++i) {
    if (s.classes[i] == PointClass::Distractor) continue;
    EXPECT_EQ(s.cloud.points[i].z, -2.0F);
    ++ground;
  }
  EXPECT_GT(ground, 1000u);
}

TEST(SceneGen, Deterministic) {
  SceneConfig cfg;
  cfg.seed = 1234;
  const auto a = generate_scene(cfg);
  const auto b = generate_scene(cfg);
  EXPECT_EQ(a.cloud.points, b.cloud.points);
  EXPECT_EQ(a.classes, b.classes);
  ASSERT_EQ(a.gt_sparse_lanes.size(), b.gt_sparse_lanes.size());
  for (std::size_t i = 0; i < a.gt_sparse_lanes.size(); ++i) {
    EXPECT_EQ(a.gt_sparse_lanes[i].points, b.gt_sparse_lanes[i].points);
    EXPECT_EQ(a.gt_dense_lanes[i].points, b.gt_dense_lanes[i].points);
  }
  cfg.seed = 1235;
  EXPECT_NE(generate_scene(cfg).cloud.points, a.cloud.points);
}

TEST(SceneGen, IntensityGapMatchesMeans) {
  SceneConfig cfg;
  cfg.lane_intensity_mean = 0.8;
  cfg.ground_intensity_mean = 0.2;
  const auto s = generate_scene(cfg);
  double lane = 0, ground = 0;
  std::size_t nl = 0, ng = 0;
  for (std::size_t i = 0; i < s.cloud.size(); ++i) {
    if (s.classes[i] == PointClass::LanePaint) {
      lane += s.cloud.points[i].intensity;
      ++nl;
    } else if (s.classes[i] == PointClass::Ground) {
      ground += s.cloud.points[i].intensity;
      ++ng;
    }
  }
  ASSERT_GT(nl, 100u);
  EXPECT_NEAR(lane / nl - ground / ng, 0.6, 0.02);
}

TEST(SceneGen, ClassGeometry) {
  SceneConfig cfg;
  cfg.seed = 3;
  cfg.ground_slope = 0.01;
  cfg.noise_sigma = 0.02;
  const auto s = generate_scene(cfg);
  ASSERT_EQ(s.classes.size(), s.cloud.size());
  for (std::size_t i = 0; i < s.cloud.size(); ++i) {
    const Vec3 p = s.cloud.points[i].xyz();
    const double above = p.z() - cfg.ground_z(p.x());
    EXPECT_TRUE(cfg.roi.contains(p.x(), p.y()));
    switch (s.classes[i]) {
      case PointClass::LanePaint:
        EXPECT_LE(xy_distance_to_any(p, s.gt_dense_lanes), 0.5 * cfg.lane_width + 1e-5);
        EXPECT_LE(std::abs(above), 3 * cfg.noise_sigma + 1e-5);
        break;
      case PointClass::Distractor:
        EXPECT_GE(above, 0.1 - 1e-5);
        EXPECT_LE(above, 0.3 + 1e-5);
        break;
      case PointClass::Ground:
        EXPECT_LE(std::abs(above), 3 * cfg.noise_sigma + 1e-5);
        break;
    }
  }
}

TEST(SceneGen, GroundTruthLanes) {
  SceneConfig cfg;
  cfg.seed = 5;
  const auto s = generate_scene(cfg);
  ASSERT_EQ(s.gt_dense_lanes.size(), 4u);
  ASSERT_EQ(s.gt_sparse_lanes.size(), 4u);
  for (std::size_t l = 0; l < 4; ++l) {
    const auto& dense = s.gt_dense_lanes[l];
    for (std::size_t i = 0; i < dense.size(); ++i) {
      EXPECT_TRUE(cfg.roi.contains(dense.points[i].x(), dense.points[i].y()));
      EXPECT_LT(dense.points[i].z(), 0.0);
      if (i > 0 && i + 1 < dense.size()) {
        EXPECT_NEAR((dense.points[i] - dense.points[i - 1]).norm(), kDenseLaneSpacing, 1e-3);
      }
    }
    const auto& sparse = s.gt_sparse_lanes[l];
    EXPECT_EQ(sparse.instance_id, dense.instance_id);
    for (std::size_t i = 0; i < sparse.size(); ++i) {
      EXPECT_LE(xy_distance_to_lane(sparse.points[i], dense), 1e-9);
      EXPECT_LT(sparse.points[i].z(), 0.0);
    }
  }
}

TEST(SceneGen, DefaultSceneSize) {
  const auto s = generate_scene(SceneConfig{});
  EXPECT_GT(s.cloud.size(), 15000u);
  EXPECT_LT(s.cloud.size(), 25000u);
}

TEST(SceneGen, ClassSeparability) {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    SceneConfig cfg;
    cfg.seed = seed;
    const auto s = generate_scene(cfg);
    std::vector<double> ground_int;
    for (std::size_t i = 0; i < s.cloud.size(); ++i) {
      if (s.classes[i] == PointClass::Ground) ground_int.push_back(s.cloud.points[i].intensity);
    }
    const double p95 = percentile(ground_int, 95);
    std::size_t lane = 0, separable = 0;
    for (std::size_t i = 0; i < s.cloud.size(); ++i) {
      if (s.classes[i] != PointClass::LanePaint) continue;
      const auto& p = s.cloud.points[i];
      ++lane;
      separable += p.intensity > p95 && std::abs(p.z - cfg.ground_z(p.x)) <= 0.03;
    }
    ASSERT_GT(lane, 0u);
    EXPECT_GE(static_cast<double>(separable) / lane, 0.99);
  }
}

TEST(SceneGen, InvalidConfigs) {
  SceneConfig cfg;
  cfg.roi = {1, 1, 0, 5};
  EXPECT_THROW(generate_scene(cfg), Error);
  cfg = {};
  cfg.point_density = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.lane_curvature_a = {1e-5, 2e-5};
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Sparsify, ZeroJitterLiesOnDense) {
  const LanePolyline dense{{{0, 0, -2}, {5, 1, -2}, {20, 1, -1.8}}, 2};
  const auto s = sparsify_annotation(dense, 3.0, 0.0, 9);
  for (const auto& p : s.lane.points) EXPECT_LE(distance_to_polyline(p, dense.points), 1e-9);
}

TEST(Sparsify, CountArithmetic) {
  const LanePolyline dense{{{0, 0, -2}, {20, 0, -2}}, 0};
  EXPECT_EQ(sparsify_annotation(dense, 4.0, 0.0, 1).lane.size(), 6u);
}

TEST(Sparsify, JitterClampedAndLogged) {
  const LanePolyline dense{{{0, 0, -2}, {100, 0, -2}}, 0};
  const auto s = sparsify_annotation(dense, 0.5, 0.05, 77);
  const auto clean = sparsify_annotation(dense, 0.5, 0.0, 77);
  ASSERT_EQ(s.z_offsets.size(), s.lane.size());
  double max_dz = 0.0;
  for (std::size_t i = 0; i < s.lane.size(); ++i) {
    EXPECT_NEAR(s.lane.points[i].z() - clean.lane.points[i].z(), s.z_offsets[i], 1e-12);
    EXPECT_EQ(s.lane.points[i].head<2>(), clean.lane.points[i].head<2>());
    max_dz = std::max(max_dz, std::abs(s.z_offsets[i]));
  }
  EXPECT_LE(max_dz, 0.15 + 1e-12);
  EXPECT_GT(max_dz, 0.05);
}
