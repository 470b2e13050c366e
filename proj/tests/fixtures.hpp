#pragma once

#include <cmath>
#include <random>

#include "laneforge/kernels.hpp"

namespace fixture {

using laneforge::kernels::Matrix;
using laneforge::kernels::RowVector;

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(rng);
  return m;
}

inline RowVector random_row(std::mt19937_64& rng, Eigen::Index c, double scale = 1.0) {
  return random_matrix(rng, 1, c, scale);
}

inline laneforge::kernels::Mlp random_mlp(std::mt19937_64& rng, Eigen::Index in, Eigen::Index hidden,
                                          Eigen::Index out,
                                          laneforge::kernels::Activation act =
                                              laneforge::kernels::Activation::Gelu) {
  const double s1 = 1.0 / std::sqrt(static_cast<double>(in));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  return {random_matrix(rng, in, hidden, s1), random_row(rng, hidden, 0.1),
          random_matrix(rng, hidden, out, s2), random_row(rng, out, 0.1), act};
}

inline laneforge::kernels::AttentionParams random_attention(std::mt19937_64& rng, Eigen::Index cq,
                                                            Eigen::Index ckv, Eigen::Index dh,
                                                            Eigen::Index dv) {
  return {random_matrix(rng, cq, dh, 1.0 / std::sqrt(static_cast<double>(cq))),
          random_matrix(rng, ckv, dh, 1.0 / std::sqrt(static_cast<double>(ckv))),
          random_matrix(rng, ckv, dv, 1.0 / std::sqrt(static_cast<double>(ckv)))};
}

inline laneforge::kernels::LayerNormParams random_ln(std::mt19937_64& rng, Eigen::Index c) {
  laneforge::kernels::LayerNormParams p;
  p.gain = RowVector::Ones(c) + random_row(rng, c, 0.1);
  p.bias = random_row(rng, c, 0.1);
  return p;
}

// Both pathways share channel width C so the two modalities can be swapped.
inline laneforge::kernels::BvatParams random_bvat(std::mt19937_64& rng, Eigen::Index c,
                                                  Eigen::Index dh, Eigen::Index out) {
  laneforge::kernels::BvatParams p;
  p.ln_bev = random_ln(rng, c);
  p.ln_sp = random_ln(rng, c);
  p.attn_bev_query = random_attention(rng, c, c, dh, dh);
  p.attn_sp_query = random_attention(rng, c, c, dh, dh);
  p.ffn_bev_query = random_mlp(rng, dh, 4 * dh, out);
  p.ffn_sp_query = random_mlp(rng, dh, 4 * dh, out);
  return p;
}

inline laneforge::kernels::SfwaParams random_sfwa(std::mt19937_64& rng, Eigen::Index cv,
                                                  Eigen::Index hidden, Eigen::Index csp) {
  return {random_mlp(rng, cv, hidden, 1), random_mlp(rng, cv, hidden, csp)};
}

// Blocks whose column maxima are separated from the runner-up so that a
// finite-difference step never changes which row wins the max-pool.
inline laneforge::kernels::SfwaInput separated_blocks(std::mt19937_64& rng, Eigen::Index k,
                                                      Eigen::Index cv) {
  laneforge::kernels::SfwaInput in;
  std::uniform_int_distribution<Eigen::Index> pick(0, k - 1);
  for (auto& b : in.blocks) {
    b = random_matrix(rng, k, cv, 0.5);
    for (Eigen::Index c = 0; c < cv; ++c) {
      const Eigen::Index r = pick(rng);
      b(r, c) = b.col(c).maxCoeff() + 0.1;
    }
  }
  return in;
}

}  // namespace fixture
