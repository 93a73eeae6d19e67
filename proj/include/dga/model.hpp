#pragma once

#include <cstddef>
#include <cstdint>

#include "dga/classifier.hpp"
#include "dga/dga_unit.hpp"
#include "dga/encoder.hpp"
#include "dga/tokenizer.hpp"

namespace dga {

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t dim = 64;        // hidden/embedding size d
  std::size_t layers = 2;      // encoder depth L
  std::size_t attn = 200;      // attention size a
  std::size_t classes = 2;     // C
  std::size_t steps = 4;       // T
  real window = real(4);       // D
  std::size_t external_dim = 0;  // >0: encode caller-provided vectors instead of ids
  bool no_global = false;        // drop h_g from the match vector
  bool no_detail = false;        // drop hbar from the match vector
  bool no_gaussian = false;
  bool log_mask = false;
  bool mean_pool_position = false;

  MatchMode match_mode() const {
    if (no_global) return MatchMode::DetailOnly;
    if (no_detail) return MatchMode::GlobalOnly;
    return MatchMode::Full;
  }
  DgaOptions dga_options() const {
    DgaOptions o;
    o.steps = steps;
    o.window = window;
    o.no_gaussian = no_gaussian;
    o.log_mask = log_mask;
    o.mean_pool_position = mean_pool_position;
    return o;
  }
};

// Parameter registry plus the handles each stage needs. Parameters are
// allocated but not initialized; call init(seed) before use.
struct Model {
  ModelConfig cfg;
  ModelParams params;
  EncoderIdx enc;
  DgaIdx dga;
  PoolIdx pool;
  MlpIdx mlp;

  void init(std::uint64_t seed) { params.init_values(seed); }
};

Model build_model(const ModelConfig& cfg);

struct ForwardTrace {
  EncoderTrace enc;
  DgaRun dga;
  Matrix states;  // T x dim, the step states stacked for pooling
  PoolTrace pool;
  Vec u;
  MlpTrace mlp;
};

// Full pass over one tokenized pair (or raw vectors in external mode).
ForwardTrace model_forward(const Model& model, const TokenizedPair& pair);
ForwardTrace model_forward_vectors(const Model& model, const Matrix& inputs);

Vec predict_probs(const Model& model, const TokenizedPair& pair);

// Cross-entropy of one example; gradients accumulate into gs (the
// regularizer is a per-batch term and is added by the caller). The model is
// untouched, so examples can run concurrently with per-thread stores.
real example_loss_and_grad(const Model& model, const TokenizedPair& pair, GradStore& gs);

}  // namespace dga
