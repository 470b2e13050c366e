#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "laneforge/cubic.hpp"
#include "laneforge/errors.hpp"
#include "laneforge/lane_geometry.hpp"
#include "laneforge/spatial_grid.hpp"
#include "laneforge/stats_util.hpp"
#include "error_code.hpp"
#include "oracles.hpp"

using namespace laneforge;

namespace {

bool same_multiset(std::vector<Vec3> a, std::vector<Vec3> b) {
  auto lt = [](const Vec3& p, const Vec3& q) {
    return std::lexicographical_compare(p.data(), p.data() + 3, q.data(), q.data() + 3);
  };
  std::sort(a.begin(), a.end(), lt);
  std::sort(b.begin(), b.end(), lt);
  return a == b;
}

}  // namespace

TEST(OrderLanePoints, FrontalLaneSortsByX) {
  const std::vector<Vec3> in{{2, 0, 0}, {0, 0, 0}, {1, 0, 0}};
  const auto out = order_lane_points(in);
  EXPECT_EQ(out, (std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}));
}

TEST(OrderLanePoints, SortedInputUnchanged) {
  const std::vector<Vec3> in{{-3, 1, 0}, {-1, 1.1, 0}, {0.5, 1.2, 0}, {4, 1.0, 0}};
  EXPECT_EQ(order_lane_points(in), in);
}

TEST(OrderLanePoints, LateralLaneUsesPrincipalAxis) {
  const std::vector<Vec3> in{{0, 3, 0}, {0, 1, 0}, {0, 2, 0}};
  const auto out = order_lane_points(in);
  EXPECT_TRUE(std::is_sorted(out.begin(), out.end(),
                             [](const Vec3& a, const Vec3& b) { return a.y() < b.y(); }));
  EXPECT_NEAR(polyline_length(out), oracle::min_link_length(in), 1e-12);
}

TEST(OrderLanePoints, EmptyThrows) {
  EXPECT_EQ(code_of([] { order_lane_points({}); }), ErrorCode::EmptyLane);
}

TEST(OrderLanePoints, TiesBreakByYThenZ) {
  const std::vector<Vec3> in{{1, 0.2, 0}, {1, 0.1, 5}, {1, 0.1, 3}, {0, 0.9, 9}, {3, 0, 0}};
  const auto out = order_lane_points(in);
  EXPECT_EQ(out, (std::vector<Vec3>{{0, 0.9, 9}, {1, 0.1, 3}, {1, 0.1, 5}, {1, 0.2, 0}, {3, 0, 0}}));
}

TEST(OrderLanePoints, PermutationAndMinimalLinksOnRandomSmoothLanes) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20, 20), ang(0, 3.14159);
  for (int trial = 0; trial < 200; ++trial) {
    const double th = ang(rng);
    const Vec2 dir(std::cos(th), std::sin(th));
    std::vector<Vec3> pts;
    for (int i = 0; i < 7; ++i) {
      const double s = u(rng);
      pts.emplace_back(dir.x() * s, dir.y() * s, 0.01 * s);
    }
    const auto out = order_lane_points(pts);
    EXPECT_TRUE(same_multiset(out, pts));
    EXPECT_NEAR(polyline_length(out), oracle::min_link_length(pts), 1e-9);
  }
}

TEST(PolylineResample, UniformSegment) {
  const LanePolyline l{{{0, 0, 0}, {10, 0, 0}}, 3};
  const auto r = polyline_resample(l, 2.0);
  ASSERT_EQ(r.size(), 6u);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(r.points[i].x(), 2.0 * i, 1e-12);
  EXPECT_EQ(r.instance_id, 3u);
}

TEST(PolylineResample, SpacingLongerThanLane) {
  const LanePolyline l{{{0, 0, 0}, {1, 0, 0}}, 0};
  const auto r = polyline_resample(l, 5.0);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.points.front(), l.points.front());
  EXPECT_EQ(r.points.back(), l.points.back());
}

TEST(PolylineResample, LShape) {
  const LanePolyline l{{{0, 0, 0}, {3, 0, 0}, {3, 4, 0}}, 0};
  const auto r = polyline_resample(l, 1.0);
  ASSERT_EQ(r.size(), 8u);
  EXPECT_NEAR(polyline_length(r.points), 7.0, 1e-12);
}

TEST(PolylineResample, Errors) {
  EXPECT_EQ(code_of([] { polyline_resample({{{1, 1, 1}}, 0}, 1.0); }), ErrorCode::DegenerateLane);
  EXPECT_EQ(code_of([] { polyline_resample({{{0, 0, 0}, {1, 0, 0}}, 0}, 0.0); }),
            ErrorCode::InvalidConfig);
}

TEST(PolylineResample, PropertiesOnRandomPolylines) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5), sp(0.05, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    LanePolyline l;
    Vec3 p(u(rng), u(rng), u(rng));
    const int n = 2 + trial % 6;
    for (int i = 0; i < n; ++i) {
      l.points.push_back(p);
      p += Vec3(std::abs(u(rng)) + 0.1, u(rng), 0.1 * u(rng));
    }
    const double spacing = sp(rng);
    const auto r = polyline_resample(l, spacing);
    EXPECT_EQ(r.points.front(), l.points.front());
    EXPECT_EQ(r.points.back(), l.points.back());
    // Arc-length separation along the input polyline.
    double prev = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      EXPECT_LE(distance_to_polyline(r.points[i], l.points), 1e-9);
      const double s = arc_length_of_closest(r.points[i], l.points);
      if (i > 0 && i + 1 < r.size()) {
        EXPECT_NEAR(s - prev, spacing, 1e-9);
      } else if (i > 0) {
        EXPECT_LE(s - prev, spacing + 1e-9);
      }
      prev = s;
    }
  }
}

TEST(FitCubic, ExactCubicAndLine) {
  std::vector<Vec2> s{{0, 0}, {1, 1}, {2, 8}, {3, 27}};
  auto c = fit_cubic(s);
  EXPECT_NEAR(c.a, 1, 1e-9);
  EXPECT_NEAR(c.b, 0, 1e-9);
  EXPECT_NEAR(c.c, 0, 1e-9);
  EXPECT_NEAR(c.d, 0, 1e-9);
  s = {{0, 1}, {1, 3}, {2, 5}, {3, 7}, {4, 9}};
  c = fit_cubic(s);
  EXPECT_NEAR(c.a, 0, 1e-9);
  EXPECT_NEAR(c.b, 0, 1e-9);
  EXPECT_NEAR(c.c, 2, 1e-9);
  EXPECT_NEAR(c.d, 1, 1e-9);
}

TEST(FitCubic, RankDeficient) {
  EXPECT_EQ(code_of([] { fit_cubic(std::vector<Vec2>{{0, 0}, {1, 1}, {2, 2}}); }),
            ErrorCode::RankDeficient);
  EXPECT_EQ(code_of([] { fit_cubic(std::vector<Vec2>{{0, 0}, {1, 1}, {1, 2}, {2, 2}, {0, 5}}); }),
            ErrorCode::RankDeficient);
}

TEST(FitCubic, NoisyMatchesNormalEquations) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<Vec2> s;
  for (int i = 0; i < 20; ++i) {
    const double u = -2.0 + 0.2 * i;
    s.emplace_back(u, oracle::poly3(0.5, 0, -1, 2, u) + noise(rng));
  }
  const auto c = fit_cubic(s);
  const auto o = oracle::normal_equation_cubic(s);
  EXPECT_NEAR(c.a, 0.5, 0.05);
  EXPECT_NEAR(c.b, 0.0, 0.05);
  EXPECT_NEAR(c.c, -1.0, 0.05);
  EXPECT_NEAR(c.d, 2.0, 0.05);
  EXPECT_NEAR(c.a, o[0], 1e-9);
  EXPECT_NEAR(c.b, o[1], 1e-9);
  EXPECT_NEAR(c.c, o[2], 1e-9);
  EXPECT_NEAR(c.d, o[3], 1e-9);
}

TEST(FitCubic, LocalOptimalityProbe) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3), pert(-1e-3, 1e-3);
  std::vector<Vec2> s;
  for (int i = 0; i < 30; ++i) {
    const double x = u(rng);
    s.emplace_back(x, std::sin(x) + 0.1 * u(rng));
  }
  const auto c = fit_cubic(s);
  auto resid = [&](double a, double b, double cc, double d) {
    double r = 0;
    for (const auto& p : s) r += std::pow(p.y() - oracle::poly3(a, b, cc, d, p.x()), 2);
    return r;
  };
  const double best = resid(c.a, c.b, c.c, c.d);
  for (int t = 0; t < 1000; ++t) {
    EXPECT_LE(best, resid(c.a + pert(rng), c.b + pert(rng), c.c + pert(rng), c.d + pert(rng)) + 1e-12);
  }
}

TEST(FitCubic, ReproducesSamplesOnCubic) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-10, 10), co(-1, 1);
  for (int t = 0; t < 100; ++t) {
    const double a = co(rng) * 1e-3, b = co(rng) * 1e-2, c = co(rng), d = co(rng) * 5;
    std::vector<Vec2> s;
    for (int i = 0; i < 12; ++i) {
      const double x = u(rng);
      s.emplace_back(x, oracle::poly3(a, b, c, d, x));
    }
    const auto fit = fit_cubic(s);
    for (const auto& p : s) EXPECT_NEAR(eval_cubic(fit, p.x()), p.y(), 1e-9);
  }
}

TEST(EvalCubic, Basics) {
  CubicCurve c;
  c.a = 1;
  EXPECT_EQ(eval_cubic(c, 2.0), 8.0);
  c = {0.3, -2, 5, 7.25, {}, CurveDimension::Lateral};
  EXPECT_EQ(eval_cubic(c, 0.0), 7.25);
}

TEST(EvalCubic, MatchesExpansion) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-50, 50), co(-2, 2);
  const CubicCurve c{co(rng), co(rng), co(rng), co(rng), {}, CurveDimension::Lateral};
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    const double ref = oracle::poly3(c.a, c.b, c.c, c.d, x);
    EXPECT_LE(std::abs(eval_cubic(c, x) - ref), 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST(SpatialGrid, QueriesMatchBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<Vec3> pts(500);
  for (auto& p : pts) p = {u(rng), u(rng), 0.2 * u(rng)};
  const SpatialGrid2D grid(pts, 0.7);
  for (int t = 0; t < 200; ++t) {
    const Vec3 q(u(rng) * 1.3, u(rng) * 1.3, u(rng) * 0.2);
    const double r = std::abs(u(rng)) * 0.3;
    std::vector<std::size_t> xy, xyz;
    std::size_t best = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if ((pts[i].head<2>() - q.head<2>()).squaredNorm() <= r * r) xy.push_back(i);
      if ((pts[i] - q).squaredNorm() <= r * r) xyz.push_back(i);
      if ((pts[i] - q).squaredNorm() < (pts[best] - q).squaredNorm()) best = i;
    }
    EXPECT_EQ(grid.radius_xy(q.head<2>(), r), xy);
    EXPECT_EQ(grid.radius_3d(q, r), xyz);
    EXPECT_EQ(grid.any_within_3d(q, r), !xyz.empty());
    EXPECT_EQ(grid.nearest(q)->index, best);
  }
}

TEST(StatsUtil, PercentileLinear) {
  EXPECT_DOUBLE_EQ(percentile({1, 2, 3, 4}, 50), 2.5);
  EXPECT_DOUBLE_EQ(percentile({10}, 90), 10);
  EXPECT_DOUBLE_EQ(percentile({0, 10}, 90), 9);
  EXPECT_TRUE(std::isnan(percentile({}, 50)));
}

TEST(StatsUtil, HistogramClampsIntoEdgeBins) {
  Histogram1D h(0, 1, 4);
  for (double v : {-5.0, 0.0, 0.3, 0.99, 1.0, 7.0}) h.add(v);
  EXPECT_EQ(h.total(), 6u);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{2, 1, 0, 3}));
}

TEST(StatsUtil, MixSeedSeparatesStreams) {
  EXPECT_NE(mix_seed(0, 0), mix_seed(0, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(0, 1));
  EXPECT_EQ(mix_seed(42, 7), mix_seed(42, 7));
}
