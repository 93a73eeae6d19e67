#pragma once

#include <vector>

#include "dga/gru.hpp"
#include "dga/params.hpp"

namespace dga {

// Dynamic Gaussian attention unit. Each step predicts a continuous focus
// position over the token axis, modulates soft attention scores with a
// Gaussian centered there, and feeds the attended context into a recurrent
// state. The position stays continuous end to end; nothing rounds it.
struct DgaIdx {
  std::size_t w1p, w2p, w3p;  // position path, dim x dim
  std::size_t up;             // attn x dim
  std::size_t vp;             // attn x 1
  std::size_t wd, ud, md;     // attention path, attn x dim
  std::size_t omega;          // attn x 1
  GruCellIdx cell;            // input dim, state dim
  std::size_t dim = 0;
  std::size_t attn = 0;
};

DgaIdx register_dga(ModelParams& params, std::size_t dim, std::size_t attn_size);

struct DgaOptions {
  std::size_t steps = 4;  // T
  real window = real(4);  // D; Gaussian sigma is D/2
  bool no_gaussian = false;        // g == 1: plain dynamic attention
  bool log_mask = false;           // scores + log g instead of scores * g
  bool mean_pool_position = false; // mean over tokens instead of sum in the position mix
};

// Focus position in (0, len): len * sigmoid(v' tanh(U m)) with
// m = W1 (sum_i h_i) + W2 hbar_prev + W3 h_g.
real generate_position(const ModelParams& params, const DgaIdx& idx, const Matrix& H,
                       const Vec& hbar_prev, const Vec& h_g, bool mean_pool = false);

// g[i] = exp(-(i - p)^2 / (2 sigma^2)) over integer positions 0..len-1,
// sigma = window/2. Entries clamped to the smallest positive normal so the
// (0, 1] bound survives underflow at extreme distances.
Vec gaussian_vector(real p, std::size_t len, real window);

struct AttentionResult {
  Vec scores;     // raw per-token scores
  Vec modulated;  // after Gaussian modulation
  Vec weights;    // softmax(modulated), sums to 1
  Vec context;    // weighted sum of token vectors
};

AttentionResult gaussian_attention(const ModelParams& params, const DgaIdx& idx, const Matrix& H,
                                   const Vec& hbar_prev, const Vec& h_g, real p,
                                   const DgaOptions& opt);

struct DgaStep {
  real p = 0;
  Vec g, scores, modulated, weights;
  Vec context;
  Vec state;  // hbar_t
  // forward stashes for the backward pass
  Vec m, tanh_pos;
  real sig = 0;
  Matrix tanh_att;  // len x attn
  GruCellCache cell;
};

struct DgaRun {
  Vec sum_h;  // token sum (or mean) used by the position path
  std::vector<DgaStep> steps;
  const Vec& final_state() const { return steps.back().state; }
};

// hbar_0 = 0. Runs steps of generate_position -> gaussian_attention -> cell.
DgaRun run_dga(const ModelParams& params, const DgaIdx& idx, const Matrix& H, const Vec& h_g,
               const DgaOptions& opt);

// dstates[t] is the loss gradient w.r.t. hbar_{t+1}. Accumulates parameter
// gradients into gs and input gradients into dH / dh_g.
void dga_backward(const ModelParams& params, const DgaIdx& idx, const Matrix& H, const Vec& h_g,
                  const DgaOptions& opt, const DgaRun& run, const std::vector<Vec>& dstates,
                  GradStore& gs, Matrix& dH, Vec& dh_g);

}  // namespace dga
