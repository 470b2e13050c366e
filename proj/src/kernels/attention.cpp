#include <cmath>

#include "laneforge/errors.hpp"
#include "laneforge/kernels.hpp"

namespace laneforge::kernels {
namespace {

void check_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                     const AttentionParams& p) {
  if (k.rows() != v.rows()) fail(ErrorCode::ShapeMismatch, "K and V row counts differ");
  if (q.rows() < 1 || k.rows() < 1) fail(ErrorCode::ShapeMismatch, "empty query or key set");
  if (q.cols() != p.w_q.rows()) fail(ErrorCode::ShapeMismatch, "Q width differs from W_q rows");
  if (k.cols() != p.w_k.rows()) fail(ErrorCode::ShapeMismatch, "K width differs from W_k rows");
  if (v.cols() != p.w_v.rows()) fail(ErrorCode::ShapeMismatch, "V width differs from W_v rows");
  if (p.w_q.cols() != p.w_k.cols() || p.w_q.cols() < 1) {
    fail(ErrorCode::ShapeMismatch, "W_q and W_k head widths differ");
  }
}

struct AttentionCache {
  Matrix qb, kb, vb, probs;
  double scale = 1.0;
};

AttentionCache attend(const Matrix& q, const Matrix& k, const Matrix& v,
                      const AttentionParams& p) {
  check_attention(q, k, v, p);
  AttentionCache c;
  c.qb = q * p.w_q;
  c.kb = k * p.w_k;
  c.vb = v * p.w_v;
  c.scale = 1.0 / std::sqrt(static_cast<double>(p.w_q.cols()));
  c.probs = softmax_rows(c.qb * c.kb.transpose() * c.scale);
  return c;
}

}  // namespace

Matrix cross_attention(const Matrix& q, const Matrix& k, const Matrix& v,
                       const AttentionParams& params) {
  const AttentionCache c = attend(q, k, v, params);
  return c.probs * c.vb;
}

AttentionGrads cross_attention_backward(const Matrix& q, const Matrix& k, const Matrix& v,
                                        const AttentionParams& params, const Matrix& dout) {
  const AttentionCache c = attend(q, k, v, params);
  AttentionGrads g;
  const Matrix dvb = c.probs.transpose() * dout;
  const Matrix dprobs = dout * c.vb.transpose();
  // Row-wise softmax Jacobian: dS = P o (dP - rowsum(dP o P)).
  Matrix dscores(c.probs.rows(), c.probs.cols());
  for (Eigen::Index r = 0; r < c.probs.rows(); ++r) {
    const double dot = dprobs.row(r).dot(c.probs.row(r));
    dscores.row(r) = c.probs.row(r).cwiseProduct((dprobs.row(r).array() - dot).matrix());
  }
  dscores *= c.scale;
  const Matrix dqb = dscores * c.kb;
  const Matrix dkb = dscores.transpose() * c.qb;
  g.dq = dqb * params.w_q.transpose();
  g.dk = dkb * params.w_k.transpose();
  g.dv = dvb * params.w_v.transpose();
  g.dparams.w_q = q.transpose() * dqb;
  g.dparams.w_k = k.transpose() * dkb;
  g.dparams.w_v = v.transpose() * dvb;
  return g;
}

BvatParams BvatParams::swapped() const {
  BvatParams s;
  s.ln_bev = ln_sp;
  s.ln_sp = ln_bev;
  s.attn_bev_query = attn_sp_query;
  s.attn_sp_query = attn_bev_query;
  s.ffn_bev_query = ffn_sp_query;
  s.ffn_sp_query = ffn_bev_query;
  return s;
}

Matrix bvat_fuse(const Matrix& f_bev, const Matrix& f_sp, const BvatParams& params) {
  if (f_bev.rows() != f_sp.rows()) {
    fail(ErrorCode::ShapeMismatch, "BEV and spatial features need the same number of rows");
  }
  const Matrix bev = layer_norm(f_bev, params.ln_bev);
  const Matrix sp = layer_norm(f_sp, params.ln_sp);
  const Matrix from_bev = mlp_forward(cross_attention(bev, sp, sp, params.attn_bev_query),
                                      params.ffn_bev_query);
  const Matrix from_sp = mlp_forward(cross_attention(sp, bev, bev, params.attn_sp_query),
                                     params.ffn_sp_query);
  if (from_bev.cols() != from_sp.cols()) {
    fail(ErrorCode::ShapeMismatch, "pathway FFN output widths differ");
  }
  return from_bev + from_sp;
}

BvatGrads bvat_backward(const Matrix& f_bev, const Matrix& f_sp, const BvatParams& params,
                        const Matrix& dz) {
  if (f_bev.rows() != f_sp.rows()) {
    fail(ErrorCode::ShapeMismatch, "BEV and spatial features need the same number of rows");
  }
  const Matrix bev = layer_norm(f_bev, params.ln_bev);
  const Matrix sp = layer_norm(f_sp, params.ln_sp);
  const Matrix ca_bev = cross_attention(bev, sp, sp, params.attn_bev_query);
  const Matrix ca_sp = cross_attention(sp, bev, bev, params.attn_sp_query);

  const MlpGrads ffn_b = mlp_backward(ca_bev, params.ffn_bev_query, dz);
  const MlpGrads ffn_s = mlp_backward(ca_sp, params.ffn_sp_query, dz);
  const AttentionGrads att_b =
      cross_attention_backward(bev, sp, sp, params.attn_bev_query, ffn_b.dx);
  const AttentionGrads att_s =
      cross_attention_backward(sp, bev, bev, params.attn_sp_query, ffn_s.dx);

  const Matrix dbev_norm = att_b.dq + att_s.dk + att_s.dv;
  const Matrix dsp_norm = att_b.dk + att_b.dv + att_s.dq;
  const LayerNormGrads ln_b = layer_norm_backward(f_bev, params.ln_bev, dbev_norm);
  const LayerNormGrads ln_s = layer_norm_backward(f_sp, params.ln_sp, dsp_norm);

  BvatGrads g;
  g.d_bev = ln_b.dx;
  g.d_sp = ln_s.dx;
  g.dparams.ln_bev = {ln_b.dgain, ln_b.dbias, params.ln_bev.epsilon};
  g.dparams.ln_sp = {ln_s.dgain, ln_s.dbias, params.ln_sp.epsilon};
  g.dparams.attn_bev_query = att_b.dparams;
  g.dparams.attn_sp_query = att_s.dparams;
  g.dparams.ffn_bev_query = ffn_b.dparams;
  g.dparams.ffn_sp_query = ffn_s.dparams;
  return g;
}

}  // namespace laneforge::kernels
