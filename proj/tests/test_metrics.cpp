#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "error_code.hpp"
#include "laneforge/lane_geometry.hpp"
#include "laneforge/metrics.hpp"
#include "laneforge/scenegen.hpp"
#include "oracles.hpp"

using namespace laneforge;
using namespace laneforge::metrics;

namespace {

std::vector<Vec3> random_points(std::mt19937_64& rng, std::size_t n, double extent) {
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng), 0.2 * u(rng));
  return pts;
}

// Cost of an assignment summed along the smaller side in index order.
double assignment_cost(const std::vector<double>& cost, std::size_t rows, std::size_t cols,
                       const std::vector<long>& assign) {
  if (rows <= cols) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += cost[r * cols + static_cast<std::size_t>(assign[r])];
    return s;
  }
  std::vector<std::size_t> row_of(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (assign[r] >= 0) row_of[static_cast<std::size_t>(assign[r])] = r;
  }
  double s = 0.0;
  for (std::size_t c = 0; c < cols; ++c) s += cost[row_of[c] * cols + c];
  return s;
}

LanePolyline straight_lane(double y, double z, double x0, double x1, std::uint32_t id) {
  LanePolyline l;
  l.instance_id = id;
  for (double x = x0; x <= x1 + 1e-9; x += 0.5) l.points.emplace_back(x, y, z);
  return l;
}

}  // namespace

TEST(Chamfer, SmallExample) {
  const std::vector<Vec3> a{{0, 0, 0}, {1, 0, 0}};
  const std::vector<Vec3> b{{0, 0, 0}, {0, 1, 0}, {3, 0, 0}};
  EXPECT_DOUBLE_EQ(chamfer_unilateral(a, b), 0.5);
  EXPECT_DOUBLE_EQ(chamfer_unilateral(b, a), 1.0);
  EXPECT_EQ(chamfer_unilateral(a, a), 0.0);
  EXPECT_EQ(code_of([&] { chamfer_unilateral({}, b); }), ErrorCode::EmptySet);
  EXPECT_EQ(code_of([&] { chamfer_unilateral(a, {}); }), ErrorCode::EmptySet);
}

TEST(Chamfer, MatchesOracle) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto a = random_points(rng, 1 + t % 60, 5.0 + t);
    const auto b = random_points(rng, 1 + (t * 7) % 80, 5.0 + t);
    EXPECT_NEAR(chamfer_unilateral(a, b), oracle::brute_chamfer(a, b, true), 1e-12);
    EXPECT_NEAR(chamfer_unilateral_bev(a, b), oracle::brute_chamfer(a, b, false), 1e-12);
  }
}

TEST(Chamfer, MonotoneUnderAddition) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    const auto a = random_points(rng, 20, 4.0);
    auto b = random_points(rng, 1 + t % 10, 4.0);
    const double before = chamfer_unilateral(a, b);
    const auto extra = random_points(rng, 1 + t % 3, 4.0);
    b.insert(b.end(), extra.begin(), extra.end());
    EXPECT_LE(chamfer_unilateral(a, b), before);
  }
}

TEST(Hungarian, MatchesExhaustive) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 10);
  std::uniform_int_distribution<int> dim(0, 5), small(0, 3);
  for (int t = 0; t < 500; ++t) {
    const std::size_t rows = static_cast<std::size_t>(dim(rng));
    const std::size_t cols = static_cast<std::size_t>(dim(rng));
    std::vector<double> cost(rows * cols);
    for (auto& c : cost) c = (t % 2) ? u(rng) : static_cast<double>(small(rng));
    const auto assign = hungarian(cost, rows, cols);
    ASSERT_EQ(assign.size(), rows);
    std::vector<bool> used(cols, false);
    std::size_t assigned = 0;
    for (long a : assign) {
      if (a < 0) continue;
      ASSERT_LT(static_cast<std::size_t>(a), cols);
      EXPECT_FALSE(used[static_cast<std::size_t>(a)]);
      used[static_cast<std::size_t>(a)] = true;
      ++assigned;
    }
    EXPECT_EQ(assigned, std::min(rows, cols));
    EXPECT_EQ(assignment_cost(cost, rows, cols, assign), oracle::exhaustive_assignment(cost, rows, cols));
  }
  EXPECT_EQ(code_of([] { hungarian({1.0}, 2, 2); }), ErrorCode::ShapeMismatch);
}

TEST(MatchLanes, IdenticalAndEmpty) {
  const std::vector<LanePolyline> gt{straight_lane(-1.75, -2, 0, 30, 0), straight_lane(1.75, -2, 0, 30, 1)};
  const auto m = match_lanes(gt, gt);
  ASSERT_EQ(m.pairs.size(), 2u);
  for (const auto& p : m.pairs) {
    EXPECT_EQ(p.pred, p.gt);
    EXPECT_NEAR(p.cost, 0.0, 1e-12);
  }
  const auto none = match_lanes({}, gt);
  EXPECT_TRUE(none.pairs.empty());
  EXPECT_EQ(none.unmatched_gt.size(), 2u);
  const auto pr = prf1(none);
  EXPECT_EQ(pr.recall, 0.0);
  EXPECT_EQ(pr.f1, 0.0);
}

TEST(MatchLanes, OffsetReversedAndRejected) {
  const auto gt = straight_lane(0, -2, 0, 30, 0);
  auto shifted = straight_lane(0.3, -2, 0, 30, 0);
  EXPECT_NEAR(lane_match_cost(shifted, gt, 0.5), 0.3, 1e-9);
  std::reverse(shifted.points.begin(), shifted.points.end());
  EXPECT_NEAR(lane_match_cost(shifted, gt, 0.5), 0.3, 1e-9);
  // A partial prediction is aligned with the part of gt it covers.
  EXPECT_NEAR(lane_match_cost(straight_lane(0, -2, 10, 20, 0), gt, 0.5), 0.0, 1e-9);

  const std::vector<LanePolyline> pred{straight_lane(3.0, -2, 0, 30, 0)};
  const std::vector<LanePolyline> gts{gt};
  const auto m = match_lanes(pred, gts, 0.5, 1.5);
  EXPECT_TRUE(m.pairs.empty());
  EXPECT_EQ(m.unmatched_pred.size(), 1u);
  EXPECT_EQ(m.unmatched_gt.size(), 1u);
}

TEST(Prf1, Examples) {
  const auto r = prf1(3, 1, 1);
  EXPECT_DOUBLE_EQ(r.precision, 0.75);
  EXPECT_DOUBLE_EQ(r.recall, 0.75);
  EXPECT_DOUBLE_EQ(r.f1, 0.75);
  const auto z = prf1(0, 0, 0);
  EXPECT_EQ(z.f1, 0.0);
}

TEST(Prf1, CountInvariants) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_int_distribution<int> cnt(0, 4);
  for (int t = 0; t < 200; ++t) {
    std::vector<LanePolyline> pred, gt;
    for (int i = cnt(rng); i > 0; --i) pred.push_back(straight_lane(u(rng), -2, 0, 10, 0));
    for (int i = cnt(rng); i > 0; --i) gt.push_back(straight_lane(u(rng), -2, 0, 10, 0));
    const auto r = prf1(match_lanes(pred, gt));
    EXPECT_EQ(r.tp + r.fp, pred.size());
    EXPECT_EQ(r.tp + r.fn, gt.size());
    EXPECT_GE(r.f1, 0.0);
    EXPECT_LE(r.f1, 1.0);
  }
}

TEST(Evaluate, PerfectPredictionAndEmptyMatch) {
  const std::vector<LanePolyline> gt{straight_lane(-1.75, -2, 0, 30, 0), straight_lane(1.75, -2, 0, 30, 1)};
  const std::vector<Frame> frames{{"a", gt, gt}, {"b", {}, gt}};
  const auto r = evaluate(frames);
  EXPECT_EQ(r.matched_pairs, 2u);
  EXPECT_DOUBLE_EQ(r.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
  EXPECT_NEAR(r.cd_3d, 0.0, 1e-12);
  EXPECT_TRUE(std::isnan(r.frames[1].cd_3d));
  const std::vector<Frame> nothing{{"c", {}, gt}};
  EXPECT_TRUE(std::isnan(evaluate(nothing).cd_3d));
}

TEST(Stats, StraightFlatLane) {
  const auto lane = straight_lane(1.0, -2, 0, 20, 0);
  EXPECT_NEAR(lane_curvature_a(lane), 0.0, 1e-12);
  EXPECT_NEAR(lane_slope_deg(lane), 0.0, 1e-12);
  LanePolyline short_lane;
  short_lane.points = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  EXPECT_EQ(code_of([&] { lane_curvature_a(short_lane); }), ErrorCode::RankDeficient);
  EXPECT_EQ(code_of([] { dataset_stats({}); }), ErrorCode::EmptySet);
}

TEST(Stats, SlopeOfRamp) {
  LanePolyline lane;
  for (int i = 0; i <= 20; ++i) lane.points.emplace_back(i, 0, 0.05 * i);
  EXPECT_NEAR(lane_slope_deg(lane), std::atan(0.05) * 180.0 / M_PI, 1e-12);
}

TEST(Stats, RecoversGeneratorCubicsWithNegativeHeights) {
  for (double a : {2e-3, -1e-3, 5e-4}) {
    scene::SceneConfig cfg;
    cfg.seed = 7;
    cfg.lane_curvature_a = {a};
    const auto s = scene::generate_scene(cfg);
    for (const auto& lane : s.gt_dense_lanes) {
      EXPECT_NEAR(lane_curvature_a(lane), a, 0.05 * std::abs(a));
    }
    const auto r = dataset_stats(s.gt_dense_lanes);
    EXPECT_EQ(r.skipped_curvature, 0u);
    EXPECT_EQ(r.height.total(), r.point_count);
    const std::size_t zero_bin = static_cast<std::size_t>((0.0 - r.height.lo) / r.height.bin_width());
    for (std::size_t b = zero_bin; b < r.height.counts.size(); ++b) EXPECT_EQ(r.height.counts[b], 0u);
    for (const auto& lane : s.gt_dense_lanes) {
      for (const auto& p : lane.points) EXPECT_LT(p.z(), 0.0);
    }
  }
}

TEST(Histogram2D, ClampsToBorder) {
  Histogram2D h(Roi{0, 10, 0, 5}, 1.0);
  EXPECT_EQ(h.rows, 10u);
  EXPECT_EQ(h.cols, 5u);
  h.add(-3, -3);
  h.add(100, 100);
  h.add(4.5, 2.5);
  EXPECT_EQ(h.at(0, 0), 1u);
  EXPECT_EQ(h.at(9, 4), 1u);
  EXPECT_EQ(h.at(4, 2), 1u);
  EXPECT_EQ(h.total(), 3u);
}
