#pragma once

#include <cstddef>

#include "dga/params.hpp"

namespace dga {

// Attention pooling over the step states: score_t = omega' tanh(W s_t + b),
// pooled = sum_t softmax(score)_t s_t. The pooled vector is a convex
// combination of the states.
struct PoolIdx {
  std::size_t w = 0;      // attn x dim
  std::size_t b = 0;      // attn x 1
  std::size_t omega = 0;  // attn x 1
  std::size_t dim = 0;
  std::size_t attn = 0;
};

PoolIdx register_pool(ModelParams& params, std::size_t dim, std::size_t attn_size);

struct PoolTrace {
  Matrix tanh_wh;  // T x attn
  Vec scores;
  Vec weights;  // softmax(scores), sums to 1
  Vec pooled;
};

// states is T x dim, one row per step.
PoolTrace attention_pool(const ModelParams& params, const PoolIdx& idx, const Matrix& states);

// dstates (T x dim) accumulates +=.
void pool_backward(const ModelParams& params, const PoolIdx& idx, const Matrix& states,
                   const PoolTrace& trace, const Vec& dpooled, GradStore& gs, Matrix& dstates);

// Which blocks the fused match vector keeps. Full is
// [h_g, hbar, h_g . hbar, hbar - h_g]; the ablations drop everything but one
// of the two inputs (the classifier input shrinks with them).
enum class MatchMode { Full, GlobalOnly, DetailOnly };

std::size_t match_dim(MatchMode mode, std::size_t dim);
Vec match_vector(const Vec& h_g, const Vec& hbar, MatchMode mode);
// dh_g / dhbar accumulate +=.
void match_backward(const Vec& h_g, const Vec& hbar, MatchMode mode, const Vec& du, Vec& dh_g,
                    Vec& dhbar);

// Two-layer classification head: hidden = tanh(W1 u + b1),
// probs = softmax(W2 hidden + b2).
struct MlpIdx {
  std::size_t w1 = 0;  // hidden x in
  std::size_t b1 = 0;  // hidden x 1
  std::size_t w2 = 0;  // classes x hidden
  std::size_t b2 = 0;  // classes x 1
  std::size_t in_dim = 0;
  std::size_t hidden = 0;
  std::size_t classes = 0;
};

MlpIdx register_mlp(ModelParams& params, std::size_t in_dim, std::size_t hidden,
                    std::size_t classes);

struct MlpTrace {
  Vec hidden;  // post-tanh
  Vec probs;
};

MlpTrace predict(const ModelParams& params, const MlpIdx& idx, const Vec& u);

// dlogits is the gradient w.r.t. the pre-softmax outputs (for cross-entropy
// on label y that is probs - onehot(y)). du accumulates +=.
void predict_backward(const ModelParams& params, const MlpIdx& idx, const Vec& u,
                      const MlpTrace& trace, const Vec& dlogits, GradStore& gs, Vec& du);

// -log probs[label], with the probability clamped at 1e-12 first. Clamp hits
// are counted so training can surface them.
real cross_entropy(const Vec& probs, int label);
std::size_t clamp_warning_count();
void reset_clamp_warnings();

// eps * sum_p |theta_p|^2 by default; exact_norm uses the unsquared per-tensor
// norm eps * sum_p |theta_p| instead.
real l2_penalty(const ModelParams& params, real eps, bool exact_norm);
// Adds the penalty gradient straight into params.grad (2*eps*theta, or
// eps*theta/|theta| with zero-norm tensors contributing nothing).
void l2_penalty_grad(ModelParams& params, real eps, bool exact_norm);

}  // namespace dga
