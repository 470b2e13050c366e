#include <algorithm>
#include <cmath>
#include <limits>

#include "laneforge/errors.hpp"
#include "laneforge/lane_geometry.hpp"
#include "laneforge/metrics.hpp"

namespace laneforge::metrics {

double MatchResult::total_cost() const {
  double sum = 0.0;
  for (const auto& p : pairs) sum += p.cost;
  return sum;
}

std::vector<long> hungarian(const std::vector<double>& cost, std::size_t rows, std::size_t cols) {
  if (cost.size() != rows * cols) fail(ErrorCode::ShapeMismatch, "cost matrix size mismatch");
  std::vector<long> assign(rows, -1);
  if (rows == 0 || cols == 0) return assign;

  // Potentials formulation; requires n <= m, so work on the transpose if needed.
  const bool transposed = rows > cols;
  const std::size_t n = transposed ? cols : rows;
  const std::size_t m = transposed ? rows : cols;
  auto c = [&](std::size_t i, std::size_t j) {
    return transposed ? cost[j * cols + i] : cost[i * cols + j];
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] == 0) continue;
    if (transposed) {
      assign[j - 1] = static_cast<long>(p[j] - 1);
    } else {
      assign[p[j] - 1] = static_cast<long>(j - 1);
    }
  }
  return assign;
}

double lane_match_cost(const LanePolyline& a, const LanePolyline& b, double spacing) {
  LanePolyline ra, rb;
  try {
    ra = polyline_resample(a, spacing);
    rb = polyline_resample(b, spacing);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
  const double la = polyline_length(ra.points);
  const double lb = polyline_length(rb.points);
  const bool a_short = la <= lb;
  const std::vector<Vec3>& shorter = a_short ? ra.points : rb.points;
  std::vector<Vec3> longer = a_short ? rb.points : ra.points;

  // Orient the longer lane like the shorter one.
  if (arc_length_of_closest(shorter.front(), longer) >
      arc_length_of_closest(shorter.back(), longer)) {
    std::reverse(longer.begin(), longer.end());
  }
  const double offset = arc_length_of_closest(shorter.front(), longer);

  double sum = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < shorter.size(); ++i) {
    if (i > 0) s += (shorter[i] - shorter[i - 1]).norm();
    sum += (shorter[i] - polyline_point_at(longer, offset + s)).norm();
  }
  return sum / static_cast<double>(shorter.size());
}

MatchResult match_lanes(std::span<const LanePolyline> pred, std::span<const LanePolyline> gt,
                        double resample_spacing, double match_threshold) {
  if (!(resample_spacing > 0.0)) fail(ErrorCode::InvalidConfig, "resample spacing must be positive");
  const std::size_t n = pred.size();
  const std::size_t m = gt.size();
  std::vector<double> cost(n * m);
  // Unusable pairs get a finite stand-in above the threshold so the
  // assignment stays well defined; they are dissolved afterwards.
  const double unusable = std::max(1e6, 1e3 * match_threshold);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = lane_match_cost(pred[i], gt[j], resample_spacing);
      cost[i * m + j] = std::isfinite(c) ? c : unusable;
    }
  }

  const std::vector<long> assign = hungarian(cost, n, m);
  MatchResult r;
  std::vector<bool> gt_used(m, false);
  for (std::size_t i = 0; i < n; ++i) {
    const long j = assign[i];
    if (j >= 0 && cost[i * m + static_cast<std::size_t>(j)] <= match_threshold) {
      r.pairs.push_back({i, static_cast<std::size_t>(j), cost[i * m + static_cast<std::size_t>(j)]});
      gt_used[static_cast<std::size_t>(j)] = true;
    } else {
      r.unmatched_pred.push_back(i);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!gt_used[j]) r.unmatched_gt.push_back(j);
  }
  return r;
}

PrecisionRecall prf1(std::size_t tp, std::size_t fp, std::size_t fn) {
  PrecisionRecall r{tp, fp, fn, 0.0, 0.0, 0.0};
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

PrecisionRecall prf1(const MatchResult& match) {
  return prf1(match.pairs.size(), match.unmatched_pred.size(), match.unmatched_gt.size());
}

void EvalConfig::validate() const {
  if (!(resample_spacing > 0.0)) fail(ErrorCode::InvalidConfig, "resample_spacing must be positive");
  if (!(match_threshold >= 0.0)) fail(ErrorCode::InvalidConfig, "match_threshold must be >= 0");
}

namespace {

struct PairDistances {
  double cd_3d = 0.0;
  double cd_bev = 0.0;
};

PairDistances pair_distances(const LanePolyline& pred, const LanePolyline& gt, double spacing) {
  const LanePolyline p = polyline_resample(pred, spacing);
  const LanePolyline g = polyline_resample(gt, spacing / 10.0);
  return {chamfer_unilateral(p.points, g.points), chamfer_unilateral_bev(p.points, g.points)};
}

}  // namespace

FrameEval evaluate_frame(const Frame& frame, const EvalConfig& cfg) {
  cfg.validate();
  FrameEval e;
  e.frame_id = frame.frame_id;
  e.match = match_lanes(frame.pred, frame.gt, cfg.resample_spacing, cfg.match_threshold);
  e.counts = prf1(e.match);
  double sum3 = 0.0, sum_bev = 0.0;
  for (const auto& pr : e.match.pairs) {
    const auto d = pair_distances(frame.pred[pr.pred], frame.gt[pr.gt], cfg.resample_spacing);
    sum3 += d.cd_3d;
    sum_bev += d.cd_bev;
  }
  const auto k = static_cast<double>(e.match.pairs.size());
  e.cd_3d = e.match.pairs.empty() ? std::nan("") : sum3 / k;
  e.cd_bev = e.match.pairs.empty() ? std::nan("") : sum_bev / k;
  return e;
}

EvalReport evaluate(std::span<const Frame> frames, const EvalConfig& cfg) {
  cfg.validate();
  EvalReport r;
  std::size_t tp = 0, fp = 0, fn = 0;
  double sum3 = 0.0, sum_bev = 0.0;
  for (const auto& f : frames) {
    FrameEval e = evaluate_frame(f, cfg);
    tp += e.counts.tp;
    fp += e.counts.fp;
    fn += e.counts.fn;
    if (!e.match.pairs.empty()) {
      const auto k = static_cast<double>(e.match.pairs.size());
      sum3 += e.cd_3d * k;
      sum_bev += e.cd_bev * k;
      r.matched_pairs += e.match.pairs.size();
    }
    r.frames.push_back(std::move(e));
  }
  const PrecisionRecall pooled = prf1(tp, fp, fn);
  r.precision = pooled.precision;
  r.recall = pooled.recall;
  r.f1 = pooled.f1;
  const auto k = static_cast<double>(r.matched_pairs);
  r.cd_3d = r.matched_pairs == 0 ? std::nan("") : sum3 / k;
  r.cd_bev = r.matched_pairs == 0 ? std::nan("") : sum_bev / k;
  return r;
}

}  // namespace laneforge::metrics
