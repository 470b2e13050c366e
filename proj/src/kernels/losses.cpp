#include <algorithm>
#include <cmath>

#include "laneforge/errors.hpp"
#include "laneforge/kernels.hpp"
#include "laneforge/spatial_grid.hpp"

namespace laneforge::kernels {
namespace {

double clamp_prob(double p) { return std::clamp(p, kBceClamp, 1.0 - kBceClamp); }

}  // namespace

double bce_loss(double p, int label) {
  const double q = clamp_prob(p);
  return label != 0 ? -std::log(q) : -std::log(1.0 - q);
}

double bce_grad(double p, int label) {
  if (p < kBceClamp || p > 1.0 - kBceClamp) return 0.0;
  return label != 0 ? -1.0 / p : 1.0 / (1.0 - p);
}

double bce_mean(std::span<const double> p, std::span<const int> labels) {
  if (p.size() != labels.size()) fail(ErrorCode::ShapeMismatch, "probabilities and labels differ");
  if (p.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += bce_loss(p[i], labels[i]);
  return sum / static_cast<double>(p.size());
}

double smooth_l1(double x, double beta) {
  const double a = std::abs(x);
  return a < beta ? 0.5 * x * x / beta : a - 0.5 * beta;
}

double smooth_l1_grad(double x, double beta) {
  if (std::abs(x) < beta) return x / beta;
  return x > 0.0 ? 1.0 : -1.0;
}

std::vector<bool> confidence_labels(std::span<const Vec3> proposals, std::span<const Vec3> gt,
                                    double tau) {
  std::vector<bool> labels(proposals.size(), false);
  if (gt.empty() || proposals.empty()) return labels;
  const SpatialGrid2D grid(gt, std::max(tau, 1e-3));
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    labels[i] = grid.any_within_3d(proposals[i], tau);
  }
  return labels;
}

}  // namespace laneforge::kernels
