#include "laneforge/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/QR>

#include "laneforge/errors.hpp"

namespace laneforge {
namespace {

std::size_t count_distinct(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  std::size_t distinct = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i == 0 || u[i] - u[i - 1] > 1e-12 * std::max(1.0, std::abs(u[i]))) ++distinct;
  }
  return distinct;
}

}  // namespace

CubicCurve fit_cubic(std::span<const Vec2> samples) {
  std::vector<double> us;
  us.reserve(samples.size());
  for (const auto& s : samples) {
    if (!std::isfinite(s.x()) || !std::isfinite(s.y())) {
      fail(ErrorCode::RankDeficient, "non-finite sample");
    }
    us.push_back(s.x());
  }
  if (count_distinct(us) < 4) {
    fail(ErrorCode::RankDeficient, "cubic fit needs at least 4 distinct abscissae");
  }

  // Fit in a centred, unit-scaled abscissa to keep the Vandermonde system
  // well conditioned, then expand back to raw-u coefficients.
  double mean = 0.0;
  for (double u : us) mean += u;
  mean /= static_cast<double>(us.size());
  double scale = 0.0;
  for (double u : us) scale = std::max(scale, std::abs(u - mean));

  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (samples[static_cast<std::size_t>(i)].x() - mean) / scale;
    design(i, 0) = 1.0;
    design(i, 1) = t;
    design(i, 2) = t * t;
    design(i, 3) = t * t * t;
    rhs(i) = samples[static_cast<std::size_t>(i)].y();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 4) fail(ErrorCode::RankDeficient, "design matrix is rank deficient");
  const Eigen::Vector4d g = qr.solve(rhs);

  // sum_k g_k ((u - m)/s)^k  ->  sum_j c_j u^j
  const double m = mean;
  const double s = scale;
  const double g1 = g(1) / s, g2 = g(2) / (s * s), g3 = g(3) / (s * s * s);
  CubicCurve curve;
  curve.a = g3;
  curve.b = g2 - 3.0 * g3 * m;
  curve.c = g1 - 2.0 * g2 * m + 3.0 * g3 * m * m;
  curve.d = g(0) - g1 * m + g2 * m * m - g3 * m * m * m;
  return curve;
}

double eval_cubic(const CubicCurve& curve, double u) {
  return ((curve.a * u + curve.b) * u + curve.c) * u + curve.d;
}

}  // namespace laneforge
