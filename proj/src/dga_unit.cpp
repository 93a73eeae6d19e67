#include "dga/dga_unit.hpp"

#include <cmath>
#include <limits>

#include "dga/errors.hpp"

namespace dga {

DgaIdx register_dga(ModelParams& params, std::size_t dim, std::size_t attn_size) {
  DgaIdx idx;
  idx.dim = dim;
  idx.attn = attn_size;
  idx.w1p = params.add("dga.w1p", dim, dim, Init::Xavier);
  idx.w2p = params.add("dga.w2p", dim, dim, Init::Xavier);
  idx.w3p = params.add("dga.w3p", dim, dim, Init::Xavier);
  idx.up = params.add("dga.up", attn_size, dim, Init::Xavier);
  idx.vp = params.add("dga.vp", attn_size, 1, Init::Xavier);
  idx.wd = params.add("dga.wd", attn_size, dim, Init::Xavier);
  idx.ud = params.add("dga.ud", attn_size, dim, Init::Xavier);
  idx.md = params.add("dga.md", attn_size, dim, Init::Xavier);
  idx.omega = params.add("dga.omega", attn_size, 1, Init::Xavier);
  idx.cell = register_gru_cell(params, "dga.cell", dim, dim);
  return idx;
}

namespace {

Vec token_sum(const Matrix& H, bool mean_pool) {
  Vec s(H.cols, real(0));
  for (std::size_t t = 0; t < H.rows; ++t) {
    const real* ht = H[t];
    for (std::size_t j = 0; j < H.cols; ++j) s[j] += ht[j];
  }
  if (mean_pool)
    for (real& v : s) v /= static_cast<real>(H.rows);
  return s;
}

struct PositionOut {
  Vec m, tanh_pos;
  real sig = 0;
  real p = 0;
};

// pos_base = W1 sum_h + W3 h_g, shared across steps.
PositionOut position_from_base(const ModelParams& params, const DgaIdx& idx, const Vec& pos_base,
                               const Vec& hbar_prev, std::size_t len) {
  PositionOut out;
  out.m = pos_base;
  add_inplace(out.m, matvec(params.value(idx.w2p), hbar_prev));
  out.tanh_pos = tanh_vec(matvec(params.value(idx.up), out.m));
  const real s = dot(params.value(idx.vp).data, out.tanh_pos);
  out.sig = sigmoid(s);
  out.p = static_cast<real>(len) * out.sig;
  return out;
}

Vec position_base(const ModelParams& params, const DgaIdx& idx, const Vec& sum_h, const Vec& h_g) {
  Vec base = matvec(params.value(idx.w1p), sum_h);
  add_inplace(base, matvec(params.value(idx.w3p), h_g));
  return base;
}

struct AttentionStash {
  Matrix tanh_att;
  AttentionResult result;
};

// att_rows[i] = Wd h_i (len x attn) and att_vec = Ud hbar_prev + Md h_g are
// precomputed by the caller.
AttentionStash attention_from_base(const ModelParams& params, const DgaIdx& idx, const Matrix& H,
                                   const Matrix& att_rows, const Vec& att_vec, const Vec& g,
                                   const DgaOptions& opt) {
  const std::size_t len = H.rows;
  AttentionStash out;
  out.tanh_att = Matrix(len, idx.attn);
  out.result.scores.resize(len);
  const Vec& omega = params.value(idx.omega).data;
  for (std::size_t i = 0; i < len; ++i) {
    const real* base = att_rows[i];
    real* th = out.tanh_att[i];
    real score = 0;
    for (std::size_t j = 0; j < idx.attn; ++j) {
      th[j] = std::tanh(base[j] + att_vec[j]);
      score += omega[j] * th[j];
    }
    out.result.scores[i] = score;
  }
  out.result.modulated.resize(len);
  if (opt.no_gaussian) {
    out.result.modulated = out.result.scores;
  } else if (opt.log_mask) {
    for (std::size_t i = 0; i < len; ++i)
      out.result.modulated[i] = out.result.scores[i] + std::log(g[i]);
  } else {
    for (std::size_t i = 0; i < len; ++i) out.result.modulated[i] = out.result.scores[i] * g[i];
  }
  out.result.weights = softmax(out.result.modulated);
  out.result.context.assign(H.cols, real(0));
  for (std::size_t i = 0; i < len; ++i) axpy(out.result.weights[i], H.row(i), out.result.context);
  return out;
}

}  // namespace

real generate_position(const ModelParams& params, const DgaIdx& idx, const Matrix& H,
                       const Vec& hbar_prev, const Vec& h_g, bool mean_pool) {
  if (H.rows == 0) throw DimensionError("generate_position: empty token matrix");
  const Vec sum_h = token_sum(H, mean_pool);
  const Vec base = position_base(params, idx, sum_h, h_g);
  return position_from_base(params, idx, base, hbar_prev, H.rows).p;
}

Vec gaussian_vector(real p, std::size_t len, real window) {
  const real sigma = window / real(2);
  const real denom = real(2) * sigma * sigma;
  Vec g(len);
  for (std::size_t i = 0; i < len; ++i) {
    const real d = static_cast<real>(i) - p;
    g[i] = std::max(std::exp(-(d * d) / denom), std::numeric_limits<real>::min());
  }
  return g;
}

AttentionResult gaussian_attention(const ModelParams& params, const DgaIdx& idx, const Matrix& H,
                                   const Vec& hbar_prev, const Vec& h_g, real p,
                                   const DgaOptions& opt) {
  Matrix att_rows = matmul(H, transpose(params.value(idx.wd)));
  Vec att_vec = matvec(params.value(idx.ud), hbar_prev);
  add_inplace(att_vec, matvec(params.value(idx.md), h_g));
  const Vec g = opt.no_gaussian ? Vec(H.rows, real(1)) : gaussian_vector(p, H.rows, opt.window);
  return attention_from_base(params, idx, H, att_rows, att_vec, g, opt).result;
}

DgaRun run_dga(const ModelParams& params, const DgaIdx& idx, const Matrix& H, const Vec& h_g,
               const DgaOptions& opt) {
  if (opt.steps == 0) throw DimensionError("run_dga: steps must be >= 1");
  const std::size_t len = H.rows;
  DgaRun run;
  run.sum_h = token_sum(H, opt.mean_pool_position);
  const Vec pos_base = position_base(params, idx, run.sum_h, h_g);
  const Matrix att_rows = matmul(H, transpose(params.value(idx.wd)));
  const Vec md_hg = matvec(params.value(idx.md), h_g);

  Vec hbar(idx.dim, real(0));
  run.steps.resize(opt.steps);
  for (std::size_t t = 0; t < opt.steps; ++t) {
    DgaStep& step = run.steps[t];
    PositionOut pos = position_from_base(params, idx, pos_base, hbar, len);
    step.m = std::move(pos.m);
    step.tanh_pos = std::move(pos.tanh_pos);
    step.sig = pos.sig;
    step.p = pos.p;
    step.g = opt.no_gaussian ? Vec(len, real(1)) : gaussian_vector(step.p, len, opt.window);

    Vec att_vec = matvec(params.value(idx.ud), hbar);
    add_inplace(att_vec, md_hg);
    AttentionStash att = attention_from_base(params, idx, H, att_rows, att_vec, step.g, opt);
    step.tanh_att = std::move(att.tanh_att);
    step.scores = std::move(att.result.scores);
    step.modulated = std::move(att.result.modulated);
    step.weights = std::move(att.result.weights);
    step.context = std::move(att.result.context);

    step.state = gru_cell_forward(params, idx.cell, step.context, hbar, &step.cell);
    hbar = step.state;
  }
  return run;
}

void dga_backward(const ModelParams& params, const DgaIdx& idx, const Matrix& H, const Vec& h_g,
                  const DgaOptions& opt, const DgaRun& run, const std::vector<Vec>& dstates,
                  GradStore& gs, Matrix& dH, Vec& dh_g) {
  const std::size_t len = H.rows;
  const std::size_t d = idx.dim;
  const real sigma = opt.window / real(2);
  const Vec& omega = params.value(idx.omega).data;
  const Vec zero_state(d, real(0));

  Vec dsum_h(d, real(0));
  Vec carry(d, real(0));  // gradient w.r.t. hbar_t flowing backward through steps

  for (std::size_t t = run.steps.size(); t-- > 0;) {
    const DgaStep& step = run.steps[t];
    const Vec& hbar_prev = t == 0 ? zero_state : run.steps[t - 1].state;

    Vec dh = dstates[t];
    add_inplace(dh, carry);

    Vec dcontext(d, real(0));
    Vec dhbar_prev(d, real(0));
    gru_cell_backward(params, idx.cell, step.context, hbar_prev, step.cell, dh, gs, dcontext,
                      dhbar_prev);

    // context = sum_i w[i] h_i
    Vec dw(len);
    for (std::size_t i = 0; i < len; ++i) {
      const real* hi = H[i];
      real acc = 0;
      for (std::size_t j = 0; j < d; ++j) acc += dcontext[j] * hi[j];
      dw[i] = acc;
      real* dhi = dH[i];
      const real wi = step.weights[i];
      for (std::size_t j = 0; j < d; ++j) dhi[j] += wi * dcontext[j];
    }

    // softmax over modulated scores
    real wmean = 0;
    for (std::size_t i = 0; i < len; ++i) wmean += step.weights[i] * dw[i];
    Vec dmod(len);
    for (std::size_t i = 0; i < len; ++i) dmod[i] = step.weights[i] * (dw[i] - wmean);

    // split modulation into raw-score and position parts
    Vec dscore(len);
    real dp = 0;
    if (opt.no_gaussian) {
      dscore = dmod;
    } else if (opt.log_mask) {
      for (std::size_t i = 0; i < len; ++i) {
        dscore[i] = dmod[i];
        dp += dmod[i] * (static_cast<real>(i) - step.p) / (sigma * sigma);
      }
    } else {
      for (std::size_t i = 0; i < len; ++i) {
        dscore[i] = dmod[i] * step.g[i];
        dp += dmod[i] * step.scores[i] * step.g[i] * (static_cast<real>(i) - step.p) / (sigma * sigma);
      }
    }

    // attention branch
    Vec sum_datt(idx.attn, real(0));
    for (std::size_t i = 0; i < len; ++i) {
      const real* th = step.tanh_att[i];
      const real ds = dscore[i];
      Vec datt(idx.attn);
      for (std::size_t j = 0; j < idx.attn; ++j) {
        gs[idx.omega].data[j] += th[j] * ds;
        datt[j] = omega[j] * ds * (real(1) - th[j] * th[j]);
        sum_datt[j] += datt[j];
      }
      add_outer(gs[idx.wd], datt, H.row(i));
      const Vec dhi = matvec_t(params.value(idx.wd), datt);
      real* row = dH[i];
      for (std::size_t j = 0; j < d; ++j) row[j] += dhi[j];
    }
    add_outer(gs[idx.ud], sum_datt, hbar_prev);
    add_inplace(dhbar_prev, matvec_t(params.value(idx.ud), sum_datt));
    add_outer(gs[idx.md], sum_datt, h_g);
    add_inplace(dh_g, matvec_t(params.value(idx.md), sum_datt));

    // position branch: p = len * sigmoid(v' tanh(Up m))
    const real dsig = dp * static_cast<real>(len) * step.sig * (real(1) - step.sig);
    Vec dtanh_pos(idx.attn);
    for (std::size_t j = 0; j < idx.attn; ++j) {
      gs[idx.vp].data[j] += step.tanh_pos[j] * dsig;
      dtanh_pos[j] =
          params.value(idx.vp).data[j] * dsig * (real(1) - step.tanh_pos[j] * step.tanh_pos[j]);
    }
    add_outer(gs[idx.up], dtanh_pos, step.m);
    Vec dm = matvec_t(params.value(idx.up), dtanh_pos);
    add_outer(gs[idx.w2p], dm, hbar_prev);
    add_inplace(dhbar_prev, matvec_t(params.value(idx.w2p), dm));
    add_outer(gs[idx.w1p], dm, run.sum_h);
    add_inplace(dsum_h, matvec_t(params.value(idx.w1p), dm));
    add_outer(gs[idx.w3p], dm, h_g);
    add_inplace(dh_g, matvec_t(params.value(idx.w3p), dm));

    carry = std::move(dhbar_prev);
  }

  // sum_h = sum_i h_i (or mean)
  const real scale = opt.mean_pool_position ? real(1) / static_cast<real>(len) : real(1);
  for (std::size_t i = 0; i < len; ++i) {
    real* row = dH[i];
    for (std::size_t j = 0; j < d; ++j) row[j] += scale * dsum_h[j];
  }
}

}  // namespace dga
