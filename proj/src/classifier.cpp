#include "dga/classifier.hpp"

#include <atomic>
#include <cmath>

#include "dga/errors.hpp"

namespace dga {

PoolIdx register_pool(ModelParams& params, std::size_t dim, std::size_t attn_size) {
  PoolIdx idx;
  idx.dim = dim;
  idx.attn = attn_size;
  idx.w = params.add("pool.w", attn_size, dim, Init::Xavier);
  idx.b = params.add("pool.b", attn_size, 1, Init::Zero);
  idx.omega = params.add("pool.omega", attn_size, 1, Init::Xavier);
  return idx;
}

PoolTrace attention_pool(const ModelParams& params, const PoolIdx& idx, const Matrix& states) {
  if (states.rows == 0) throw DimensionError("attention_pool: no states");
  if (states.cols != idx.dim)
    throw DimensionError("attention_pool: state dim " + std::to_string(states.cols) +
                         " != " + std::to_string(idx.dim));
  const std::size_t steps = states.rows;
  const Matrix& w = params.value(idx.w);
  const Vec& b = params.value(idx.b).data;
  const Vec& omega = params.value(idx.omega).data;

  PoolTrace out;
  out.tanh_wh = Matrix(steps, idx.attn);
  out.scores.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    Vec pre = matvec(w, states.row(t));
    real score = 0;
    real* th = out.tanh_wh[t];
    for (std::size_t j = 0; j < idx.attn; ++j) {
      th[j] = std::tanh(pre[j] + b[j]);
      score += omega[j] * th[j];
    }
    out.scores[t] = score;
  }
  out.weights = softmax(out.scores);
  out.pooled.assign(idx.dim, real(0));
  for (std::size_t t = 0; t < steps; ++t) axpy(out.weights[t], states.row(t), out.pooled);
  return out;
}

void pool_backward(const ModelParams& params, const PoolIdx& idx, const Matrix& states,
                   const PoolTrace& trace, const Vec& dpooled, GradStore& gs, Matrix& dstates) {
  const std::size_t steps = states.rows;
  const Vec& omega = params.value(idx.omega).data;

  Vec dw(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const real* st = states[t];
    real acc = 0;
    for (std::size_t j = 0; j < idx.dim; ++j) acc += dpooled[j] * st[j];
    dw[t] = acc;
    real* drow = dstates[t];
    const real wt = trace.weights[t];
    for (std::size_t j = 0; j < idx.dim; ++j) drow[j] += wt * dpooled[j];
  }

  real mean = 0;
  for (std::size_t t = 0; t < steps; ++t) mean += trace.weights[t] * dw[t];
  for (std::size_t t = 0; t < steps; ++t) {
    const real dscore = trace.weights[t] * (dw[t] - mean);
    const real* th = trace.tanh_wh[t];
    Vec dtanh(idx.attn);
    for (std::size_t j = 0; j < idx.attn; ++j) {
      gs[idx.omega].data[j] += th[j] * dscore;
      dtanh[j] = omega[j] * dscore * (real(1) - th[j] * th[j]);
      gs[idx.b].data[j] += dtanh[j];
    }
    add_outer(gs[idx.w], dtanh, states.row(t));
    const Vec ds = matvec_t(params.value(idx.w), dtanh);
    real* drow = dstates[t];
    for (std::size_t j = 0; j < idx.dim; ++j) drow[j] += ds[j];
  }
}

std::size_t match_dim(MatchMode mode, std::size_t dim) {
  return mode == MatchMode::Full ? 4 * dim : dim;
}

Vec match_vector(const Vec& h_g, const Vec& hbar, MatchMode mode) {
  if (h_g.size() != hbar.size())
    throw DimensionError("match_vector: dims " + std::to_string(h_g.size()) +
                         " != " + std::to_string(hbar.size()));
  if (mode == MatchMode::GlobalOnly) return h_g;
  if (mode == MatchMode::DetailOnly) return hbar;
  const std::size_t d = h_g.size();
  Vec u(4 * d);
  for (std::size_t j = 0; j < d; ++j) {
    u[j] = h_g[j];
    u[d + j] = hbar[j];
    u[2 * d + j] = h_g[j] * hbar[j];
    u[3 * d + j] = hbar[j] - h_g[j];
  }
  return u;
}

void match_backward(const Vec& h_g, const Vec& hbar, MatchMode mode, const Vec& du, Vec& dh_g,
                    Vec& dhbar) {
  const std::size_t d = h_g.size();
  if (mode == MatchMode::GlobalOnly) {
    for (std::size_t j = 0; j < d; ++j) dh_g[j] += du[j];
    return;
  }
  if (mode == MatchMode::DetailOnly) {
    for (std::size_t j = 0; j < d; ++j) dhbar[j] += du[j];
    return;
  }
  for (std::size_t j = 0; j < d; ++j) {
    dh_g[j] += du[j] + du[2 * d + j] * hbar[j] - du[3 * d + j];
    dhbar[j] += du[d + j] + du[2 * d + j] * h_g[j] + du[3 * d + j];
  }
}

MlpIdx register_mlp(ModelParams& params, std::size_t in_dim, std::size_t hidden,
                    std::size_t classes) {
  MlpIdx idx;
  idx.in_dim = in_dim;
  idx.hidden = hidden;
  idx.classes = classes;
  idx.w1 = params.add("mlp.w1", hidden, in_dim, Init::Xavier);
  idx.b1 = params.add("mlp.b1", hidden, 1, Init::Zero);
  idx.w2 = params.add("mlp.w2", classes, hidden, Init::Xavier);
  idx.b2 = params.add("mlp.b2", classes, 1, Init::Zero);
  return idx;
}

MlpTrace predict(const ModelParams& params, const MlpIdx& idx, const Vec& u) {
  if (u.size() != idx.in_dim)
    throw DimensionError("predict: input size " + std::to_string(u.size()) +
                         " != " + std::to_string(idx.in_dim));
  MlpTrace out;
  out.hidden = matvec(params.value(idx.w1), u);
  add_inplace(out.hidden, params.value(idx.b1).data);
  out.hidden = tanh_vec(out.hidden);
  Vec logits = matvec(params.value(idx.w2), out.hidden);
  add_inplace(logits, params.value(idx.b2).data);
  out.probs = softmax(logits);
  return out;
}

void predict_backward(const ModelParams& params, const MlpIdx& idx, const Vec& u,
                      const MlpTrace& trace, const Vec& dlogits, GradStore& gs, Vec& du) {
  add_outer(gs[idx.w2], dlogits, trace.hidden);
  add_inplace(gs[idx.b2].data, dlogits);
  Vec dhidden = matvec_t(params.value(idx.w2), dlogits);
  for (std::size_t j = 0; j < idx.hidden; ++j)
    dhidden[j] *= real(1) - trace.hidden[j] * trace.hidden[j];
  add_outer(gs[idx.w1], dhidden, u);
  add_inplace(gs[idx.b1].data, dhidden);
  const Vec dux = matvec_t(params.value(idx.w1), dhidden);
  add_inplace(du, dux);
}

namespace {
std::atomic<std::size_t> g_clamp_count{0};
}

real cross_entropy(const Vec& probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size())
    throw DimensionError("cross_entropy: label " + std::to_string(label) + " out of range");
  real p = probs[static_cast<std::size_t>(label)];
  if (p < real(1e-12)) {
    p = real(1e-12);
    g_clamp_count.fetch_add(1, std::memory_order_relaxed);
  }
  return -std::log(p);
}

std::size_t clamp_warning_count() { return g_clamp_count.load(std::memory_order_relaxed); }
void reset_clamp_warnings() { g_clamp_count.store(0, std::memory_order_relaxed); }

real l2_penalty(const ModelParams& params, real eps, bool exact_norm) {
  if (eps == real(0)) return real(0);
  real total = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    real sq = 0;
    for (real v : params[i].value.data) sq += v * v;
    total += exact_norm ? std::sqrt(sq) : sq;
  }
  return eps * total;
}

void l2_penalty_grad(ModelParams& params, real eps, bool exact_norm) {
  if (eps == real(0)) return;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params[i];
    if (exact_norm) {
      real sq = 0;
      for (real v : p.value.data) sq += v * v;
      const real norm = std::sqrt(sq);
      if (norm == real(0)) continue;  // subgradient 0 at the kink
      const real scale = eps / norm;
      for (std::size_t k = 0; k < p.value.data.size(); ++k)
        p.grad.data[k] += scale * p.value.data[k];
    } else {
      for (std::size_t k = 0; k < p.value.data.size(); ++k)
        p.grad.data[k] += real(2) * eps * p.value.data[k];
    }
  }
}

}  // namespace dga
