#pragma once

#include <vector>

#include "dga/gru.hpp"
#include "dga/params.hpp"
#include "dga/tokenizer.hpp"

namespace dga {

// Stacked unidirectional recurrent encoder. Layer l consumes layer l-1's
// full state sequence; per-token output is a softmax-weighted mix of the
// layer states and the global vector is the top layer's state at position 0.
//
// In external mode the embedding table and all layers below the top one are
// bypassed: a single cell runs directly over caller-provided vectors.
struct EncoderIdx {
  std::size_t emb = 0;  // vocab x dim; unused in external mode
  std::vector<GruCellIdx> layers;
  std::size_t mix = 0;  // L x 1 raw layer-mix weights
  std::size_t vocab_size = 0;
  std::size_t in_dim = 0;  // embedding dim, or external vector dim
  std::size_t dim = 0;     // hidden/state size
  bool external = false;
};

EncoderIdx register_encoder(ModelParams& params, std::size_t vocab_size, std::size_t dim,
                            std::size_t num_layers);
EncoderIdx register_external_encoder(ModelParams& params, std::size_t external_dim, std::size_t dim);

struct EncoderTrace {
  std::vector<int> ids;                          // empty in external mode
  Matrix x0;                                     // layer-0 inputs, len x in_dim
  std::vector<Matrix> states;                    // per layer, len x dim
  std::vector<std::vector<GruCellCache>> cells;  // [layer][t]
  Vec mix_weights;                               // softmax over layers, sums to 1
  Matrix H;                                      // len x dim, mixed per-token vectors
  Vec h_g;                                       // top-layer state at position 0
};

EncoderTrace encode(const ModelParams& params, const EncoderIdx& enc, const TokenizedPair& pair);
EncoderTrace encode_vectors(const ModelParams& params, const EncoderIdx& enc, const Matrix& inputs);

// dH is len x dim, dh_g length dim. Parameter gradients accumulate into gs.
void encoder_backward(const ModelParams& params, const EncoderIdx& enc, const EncoderTrace& trace,
                      const Matrix& dH, const Vec& dh_g, GradStore& gs);

}  // namespace dga
