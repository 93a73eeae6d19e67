#pragma once

#include <string>

#include "dga/params.hpp"

namespace dga {

// Handles into the registry for one gated recurrent cell:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   n = tanh(Wh x + Uh (r . h) + bh)
//   h' = (1 - z) . h + z . n
struct GruCellIdx {
  std::size_t wz, wr, wh;  // state x in
  std::size_t uz, ur, uh;  // state x state
  std::size_t bz, br, bh;  // state x 1
  std::size_t in_dim = 0;
  std::size_t state_dim = 0;
};

GruCellIdx register_gru_cell(ModelParams& params, const std::string& prefix,
                             std::size_t in_dim, std::size_t state_dim);

// Activations kept from the forward pass; enough, together with x and
// h_prev, to run the backward pass.
struct GruCellCache {
  Vec z, r, n;
};

Vec gru_cell_forward(const ModelParams& params, const GruCellIdx& c,
                     const Vec& x, const Vec& h_prev, GruCellCache* cache = nullptr);

// Accumulates parameter gradients into gs and input gradients into dx and
// dh_prev (both +=).
void gru_cell_backward(const ModelParams& params, const GruCellIdx& c,
                       const Vec& x, const Vec& h_prev, const GruCellCache& cache,
                       const Vec& dh, GradStore& gs, Vec& dx, Vec& dh_prev);

}  // namespace dga
