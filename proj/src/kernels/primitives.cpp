#include <cmath>
#include <numbers>

#include "laneforge/errors.hpp"
#include "laneforge/kernels.hpp"

namespace laneforge::kernels {

double activate(Activation act, double x) {
  switch (act) {
    case Activation::Gelu: return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2));
    case Activation::Tanh: return std::tanh(x);
    case Activation::Identity: return x;
  }
  return x;
}

double activate_derivative(Activation act, double x) {
  switch (act) {
    case Activation::Gelu: {
      const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
      const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
      return cdf + x * pdf;
    }
    case Activation::Tanh: {
      const double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

Vector softmax(const Vector& logits) {
  if (logits.size() == 0) return logits;
  const Vector e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    out.row(r) = softmax(logits.row(r).transpose()).transpose();
  }
  return out;
}

LayerNormParams LayerNormParams::identity(Eigen::Index channels, double epsilon) {
  return {RowVector::Ones(channels), RowVector::Zero(channels), epsilon};
}

namespace {

void check_layer_norm(const Matrix& x, const LayerNormParams& p) {
  if (x.cols() < 2) fail(ErrorCode::ShapeMismatch, "layer norm needs at least 2 channels");
  if (p.gain.size() != x.cols() || p.bias.size() != x.cols()) {
    fail(ErrorCode::ShapeMismatch, "layer norm gain/bias width differs from input");
  }
}

}  // namespace

Matrix layer_norm(const Matrix& x, const LayerNormParams& params) {
  check_layer_norm(x, params);
  Matrix y(x.rows(), x.cols());
  const auto c = static_cast<double>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / c;
    const RowVector centered = x.row(r).array() - mean;
    const double var = centered.squaredNorm() / c;
    const double inv_std = 1.0 / std::sqrt(var + params.epsilon);
    y.row(r) = (centered * inv_std).cwiseProduct(params.gain) + params.bias;
  }
  return y;
}

LayerNormGrads layer_norm_backward(const Matrix& x, const LayerNormParams& params,
                                   const Matrix& dy) {
  check_layer_norm(x, params);
  LayerNormGrads g{Matrix(x.rows(), x.cols()), RowVector::Zero(x.cols()),
                   RowVector::Zero(x.cols())};
  const auto c = static_cast<double>(x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / c;
    const RowVector centered = x.row(r).array() - mean;
    const double var = centered.squaredNorm() / c;
    const double inv_std = 1.0 / std::sqrt(var + params.epsilon);
    const RowVector xhat = centered * inv_std;
    g.dgain += dy.row(r).cwiseProduct(xhat);
    g.dbias += dy.row(r);
    const RowVector dxhat = dy.row(r).cwiseProduct(params.gain);
    const double mean_dxhat = dxhat.sum() / c;
    const double mean_dxhat_xhat = dxhat.dot(xhat) / c;
    g.dx.row(r) = inv_std * (dxhat.array() - mean_dxhat - xhat.array() * mean_dxhat_xhat).matrix();
  }
  return g;
}

namespace {

void check_mlp(const Matrix& x, const Mlp& m) {
  if (x.cols() != m.w1.rows() || m.b1.size() != m.w1.cols() || m.w2.rows() != m.w1.cols() ||
      m.b2.size() != m.w2.cols()) {
    fail(ErrorCode::ShapeMismatch, "MLP weights do not match the input width");
  }
}

}  // namespace

Matrix mlp_forward(const Matrix& x, const Mlp& mlp) {
  check_mlp(x, mlp);
  Matrix h = (x * mlp.w1).rowwise() + mlp.b1;
  h = h.unaryExpr([&](double v) { return activate(mlp.activation, v); });
  return (h * mlp.w2).rowwise() + mlp.b2;
}

MlpGrads mlp_backward(const Matrix& x, const Mlp& mlp, const Matrix& dy) {
  check_mlp(x, mlp);
  const Matrix pre = (x * mlp.w1).rowwise() + mlp.b1;
  const Matrix act = pre.unaryExpr([&](double v) { return activate(mlp.activation, v); });
  MlpGrads g;
  g.dparams.activation = mlp.activation;
  g.dparams.w2 = act.transpose() * dy;
  g.dparams.b2 = dy.colwise().sum();
  const Matrix dact = dy * mlp.w2.transpose();
  const Matrix dpre = dact.cwiseProduct(
      pre.unaryExpr([&](double v) { return activate_derivative(mlp.activation, v); }));
  g.dparams.w1 = x.transpose() * dpre;
  g.dparams.b1 = dpre.colwise().sum();
  g.dx = dpre * mlp.w1.transpose();
  return g;
}

}  // namespace laneforge::kernels
