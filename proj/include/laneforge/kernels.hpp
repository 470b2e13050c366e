#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "laneforge/types.hpp"

// Forward kernels of the BEV/voxel fusion head, with hand-written backward
// passes used for gradient checks. Everything is double precision and pure.
namespace laneforge::kernels {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using FeatureMatrix = Matrix;

enum class Activation { Gelu, Tanh, Identity };

double activate(Activation act, double x);
double activate_derivative(Activation act, double x);

// ---------------------------------------------------------------------------
// Primitives

/// Max-subtracted softmax.
Vector softmax(const Vector& logits);
Matrix softmax_rows(const Matrix& logits);

struct LayerNormParams {
  RowVector gain;
  RowVector bias;
  double epsilon = 1e-5;

  static LayerNormParams identity(Eigen::Index channels, double epsilon = 1e-5);
};

/// Per-row (x - mean) / sqrt(var + eps) * gain + bias; population variance.
Matrix layer_norm(const Matrix& x, const LayerNormParams& params);

struct LayerNormGrads {
  Matrix dx;
  RowVector dgain;
  RowVector dbias;
};
LayerNormGrads layer_norm_backward(const Matrix& x, const LayerNormParams& params,
                                   const Matrix& dy);

/// Two affine maps with an activation between them, applied row-wise:
/// act(x W1 + b1) W2 + b2. Serves as both the FFN and the shared MLPs.
struct Mlp {
  Matrix w1;
  RowVector b1;
  Matrix w2;
  RowVector b2;
  Activation activation = Activation::Gelu;

  Eigen::Index in_dim() const { return w1.rows(); }
  Eigen::Index out_dim() const { return w2.cols(); }
};

Matrix mlp_forward(const Matrix& x, const Mlp& mlp);

struct MlpGrads {
  Matrix dx;
  Mlp dparams;
};
MlpGrads mlp_backward(const Matrix& x, const Mlp& mlp, const Matrix& dy);

// ---------------------------------------------------------------------------
// Cross attention

/// Projections for queries (C_q x D_h) and keys/values (C_kv x D_h, C_kv x D_v).
struct AttentionParams {
  Matrix w_q;
  Matrix w_k;
  Matrix w_v;
};

/// softmax((Q W_q)(K W_k)^T / sqrt(D_h)) (V W_v), softmax over keys.
/// Throws ShapeMismatch on inconsistent shapes.
Matrix cross_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                       const AttentionParams& params);

struct AttentionGrads {
  Matrix dq;
  Matrix dk;
  Matrix dv;
  AttentionParams dparams;
};
AttentionGrads cross_attention_backward(const Matrix& q, const Matrix& k, const Matrix& v,
                                        const AttentionParams& params, const Matrix& dout);

// ---------------------------------------------------------------------------
// BEV-voxel aggregation

/// Parameters of the two fusion pathways. The "bev_query" pathway attends
/// from normalized BEV features to normalized spatial features, the
/// "sp_query" pathway the other way round. FFNs do not share weights.
struct BvatParams {
  LayerNormParams ln_bev;
  LayerNormParams ln_sp;
  AttentionParams attn_bev_query;
  AttentionParams attn_sp_query;
  Mlp ffn_bev_query;
  Mlp ffn_sp_query;

  /// Parameters for the call with the two modalities exchanged.
  BvatParams swapped() const;
};

/// Z = FFN_b(CA(LN(F_bev), LN(F_sp), LN(F_sp))) + FFN_s(CA(LN(F_sp), LN(F_bev), LN(F_bev))).
/// No residual connections. Throws ShapeMismatch.
Matrix bvat_fuse(const Matrix& f_bev, const Matrix& f_sp, const BvatParams& params);

struct BvatGrads {
  Matrix d_bev;
  Matrix d_sp;
  BvatParams dparams;
};
BvatGrads bvat_backward(const Matrix& f_bev, const Matrix& f_sp, const BvatParams& params,
                        const Matrix& dz);

// ---------------------------------------------------------------------------
// Multi-scale neighbour aggregation

inline constexpr std::size_t kScaleLevels = 3;

struct SfwaInput {
  std::array<Matrix, kScaleLevels> blocks;  // each k x C_v
};

/// `score` maps a pooled C_v row to one logit; `output` maps each weighted
/// neighbour row to C_sp channels. Both are shared across rows.
struct SfwaParams {
  Mlp score;
  Mlp output;
};

struct SfwaResult {
  RowVector feature;              // 1 x C_sp
  Eigen::Vector3d scale_weights;  // softmax over the scale levels
};

/// Column-wise max-pool per level, softmax of the shared score MLP over the
/// pooled rows, per-level reweighting of the neighbour blocks, shared output
/// MLP per neighbour row, mean over all 3k rows. Invariant to neighbour
/// order within a block. Throws ShapeMismatch.
SfwaResult sfwa_aggregate(const SfwaInput& input, const SfwaParams& params);

struct SfwaGrads {
  std::array<Matrix, kScaleLevels> dblocks;
  SfwaParams dparams;
};
SfwaGrads sfwa_backward(const SfwaInput& input, const SfwaParams& params, const RowVector& dout);

struct KnnBlock {
  Matrix features;                   // k x C_v, ascending distance
  std::vector<std::size_t> indices;  // voxel index per row
  bool padded = false;               // fewer than k voxels; nearest repeated
};

/// Features of the k nearest voxel centres (ties by lower index). Throws
/// EmptyVoxelSet when there are no voxels, ShapeMismatch when centres and
/// feature rows disagree.
KnnBlock knn_gather(const Vec3& query, std::span<const Vec3> voxel_centers,
                    const Matrix& voxel_features, std::size_t k);

// ---------------------------------------------------------------------------
// Objectives

inline constexpr double kBceClamp = 1e-7;

/// -(y ln p + (1 - y) ln(1 - p)) with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double p, int label);
/// d bce / d p (zero where the clamp is active).
double bce_grad(double p, int label);
double bce_mean(std::span<const double> p, std::span<const int> labels);

double smooth_l1(double x, double beta = 1.0);
double smooth_l1_grad(double x, double beta = 1.0);

/// True iff the nearest ground-truth point is within tau (3D distance).
std::vector<bool> confidence_labels(std::span<const Vec3> proposals, std::span<const Vec3> gt,
                                    double tau = 0.5);

}  // namespace laneforge::kernels
