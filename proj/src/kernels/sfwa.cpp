#include <algorithm>
#include <numeric>

#include "laneforge/errors.hpp"
#include "laneforge/kernels.hpp"

namespace laneforge::kernels {
namespace {

void check_sfwa(const SfwaInput& in, const SfwaParams& p) {
  const Eigen::Index k = in.blocks[0].rows();
  const Eigen::Index cv = in.blocks[0].cols();
  if (k < 1 || cv < 1) fail(ErrorCode::ShapeMismatch, "neighbour blocks must be non-empty");
  for (const auto& b : in.blocks) {
    if (b.rows() != k || b.cols() != cv) {
      fail(ErrorCode::ShapeMismatch, "all scale blocks must share the k x C_v shape");
    }
  }
  if (p.score.in_dim() != cv || p.score.out_dim() != 1) {
    fail(ErrorCode::ShapeMismatch, "score MLP must map C_v to one logit");
  }
  if (p.output.in_dim() != cv) fail(ErrorCode::ShapeMismatch, "output MLP must take C_v inputs");
}

struct SfwaForward {
  Matrix pooled;                          // 3 x C_v
  std::vector<std::vector<Eigen::Index>> argmax;  // per level, per channel
  Vector weights;                          // 3
  Matrix stacked;                          // 3k x C_v, reweighted blocks
  Matrix rows_out;                         // 3k x C_sp
};

SfwaForward forward(const SfwaInput& in, const SfwaParams& p) {
  check_sfwa(in, p);
  const Eigen::Index k = in.blocks[0].rows();
  const Eigen::Index cv = in.blocks[0].cols();
  SfwaForward f;
  f.pooled.resize(kScaleLevels, cv);
  f.argmax.resize(kScaleLevels);
  for (std::size_t n = 0; n < kScaleLevels; ++n) {
    const Matrix& b = in.blocks[n];
    f.argmax[n].resize(static_cast<std::size_t>(cv));
    for (Eigen::Index c = 0; c < cv; ++c) {
      Eigen::Index row = 0;
      b.col(c).maxCoeff(&row);
      f.argmax[n][static_cast<std::size_t>(c)] = row;
      f.pooled(static_cast<Eigen::Index>(n), c) = b(row, c);
    }
  }
  f.weights = softmax(mlp_forward(f.pooled, p.score).col(0));
  f.stacked.resize(static_cast<Eigen::Index>(kScaleLevels) * k, cv);
  for (std::size_t n = 0; n < kScaleLevels; ++n) {
    f.stacked.middleRows(static_cast<Eigen::Index>(n) * k, k) =
        f.weights(static_cast<Eigen::Index>(n)) * in.blocks[n];
  }
  f.rows_out = mlp_forward(f.stacked, p.output);
  return f;
}

}  // namespace

SfwaResult sfwa_aggregate(const SfwaInput& input, const SfwaParams& params) {
  const SfwaForward f = forward(input, params);
  SfwaResult r;
  r.feature = f.rows_out.colwise().mean();
  r.scale_weights = f.weights;
  return r;
}

SfwaGrads sfwa_backward(const SfwaInput& input, const SfwaParams& params, const RowVector& dout) {
  const SfwaForward f = forward(input, params);
  if (dout.size() != f.rows_out.cols()) {
    fail(ErrorCode::ShapeMismatch, "upstream gradient width differs from C_sp");
  }
  const Eigen::Index k = input.blocks[0].rows();
  const Eigen::Index rows = f.rows_out.rows();

  const Matrix drows = dout.replicate(rows, 1) / static_cast<double>(rows);
  const MlpGrads out_g = mlp_backward(f.stacked, params.output, drows);

  SfwaGrads g;
  g.dparams.output = out_g.dparams;
  Vector dweights(static_cast<Eigen::Index>(kScaleLevels));
  for (std::size_t n = 0; n < kScaleLevels; ++n) {
    const auto level = static_cast<Eigen::Index>(n);
    const Matrix dblock = out_g.dx.middleRows(level * k, k);
    dweights(level) = dblock.cwiseProduct(input.blocks[n]).sum();
    g.dblocks[n] = f.weights(level) * dblock;
  }

  // Softmax over the three logits, then back through the score MLP.
  const double dot = dweights.dot(f.weights);
  const Vector dlogits = f.weights.cwiseProduct((dweights.array() - dot).matrix());
  const MlpGrads score_g = mlp_backward(f.pooled, params.score, dlogits);
  g.dparams.score = score_g.dparams;

  // Max-pool routes each pooled gradient to its arg-max row.
  for (std::size_t n = 0; n < kScaleLevels; ++n) {
    for (Eigen::Index c = 0; c < f.pooled.cols(); ++c) {
      g.dblocks[n](f.argmax[n][static_cast<std::size_t>(c)], c) +=
          score_g.dx(static_cast<Eigen::Index>(n), c);
    }
  }
  return g;
}

KnnBlock knn_gather(const Vec3& query, std::span<const Vec3> voxel_centers,
                    const Matrix& voxel_features, std::size_t k) {
  if (voxel_centers.empty()) fail(ErrorCode::EmptyVoxelSet, "no voxels to gather from");
  if (static_cast<Eigen::Index>(voxel_centers.size()) != voxel_features.rows()) {
    fail(ErrorCode::ShapeMismatch, "one feature row per voxel centre is required");
  }
  if (k == 0) fail(ErrorCode::ShapeMismatch, "k must be positive");

  std::vector<std::size_t> order(voxel_centers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> dist2(voxel_centers.size());
  for (std::size_t i = 0; i < voxel_centers.size(); ++i) {
    dist2[i] = (voxel_centers[i] - query).squaredNorm();
  }
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist2[a] != dist2[b] ? dist2[a] < dist2[b] : a < b;
                    });

  KnnBlock block;
  block.padded = take < k;
  block.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
  block.indices.resize(k, order.front());
  block.features.resize(static_cast<Eigen::Index>(k), voxel_features.cols());
  for (std::size_t r = 0; r < k; ++r) {
    block.features.row(static_cast<Eigen::Index>(r)) =
        voxel_features.row(static_cast<Eigen::Index>(block.indices[r]));
  }
  return block;
}

}  // namespace laneforge::kernels
