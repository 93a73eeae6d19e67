#include "dga/encoder.hpp"

#include <stdexcept>
#include <string>

#include "dga/errors.hpp"

namespace dga {

EncoderIdx register_encoder(ModelParams& params, std::size_t vocab_size, std::size_t dim,
                            std::size_t num_layers) {
  if (num_layers == 0) throw DimensionError("encoder needs at least one layer");
  EncoderIdx enc;
  enc.vocab_size = vocab_size;
  enc.in_dim = dim;
  enc.dim = dim;
  enc.emb = params.add("encoder.embedding", vocab_size, dim, Init::Xavier);
  for (std::size_t l = 0; l < num_layers; ++l)
    enc.layers.push_back(register_gru_cell(params, "encoder.layer" + std::to_string(l), l == 0 ? enc.in_dim : dim, dim));
  enc.mix = params.add("encoder.layer_mix", num_layers, 1, Init::Zero);
  return enc;
}

EncoderIdx register_external_encoder(ModelParams& params, std::size_t external_dim, std::size_t dim) {
  EncoderIdx enc;
  enc.external = true;
  enc.in_dim = external_dim;
  enc.dim = dim;
  enc.layers.push_back(register_gru_cell(params, "encoder.layer0", external_dim, dim));
  enc.mix = params.add("encoder.layer_mix", 1, 1, Init::Zero);
  return enc;
}

namespace {

EncoderTrace run_stack(const ModelParams& params, const EncoderIdx& enc, EncoderTrace trace) {
  const std::size_t len = trace.x0.rows;
  const std::size_t L = enc.layers.size();
  trace.states.resize(L);
  trace.cells.resize(L);

  for (std::size_t l = 0; l < L; ++l) {
    trace.states[l] = Matrix(len, enc.dim);
    trace.cells[l].resize(len);
    Vec h(enc.dim, real(0));
    for (std::size_t t = 0; t < len; ++t) {
      const Vec x = l == 0 ? trace.x0.row(t) : trace.states[l - 1].row(t);
      h = gru_cell_forward(params, enc.layers[l], x, h, &trace.cells[l][t]);
      trace.states[l].set_row(t, h);
    }
  }

  trace.mix_weights = softmax(params.value(enc.mix).data);
  trace.H = Matrix(len, enc.dim);
  for (std::size_t t = 0; t < len; ++t) {
    real* ht = trace.H[t];
    for (std::size_t l = 0; l < L; ++l) {
      const real w = trace.mix_weights[l];
      const real* st = trace.states[l][t];
      for (std::size_t j = 0; j < enc.dim; ++j) ht[j] += w * st[j];
    }
  }
  trace.h_g = trace.states[L - 1].row(0);
  return trace;
}

}  // namespace

EncoderTrace encode(const ModelParams& params, const EncoderIdx& enc, const TokenizedPair& pair) {
  if (enc.external) throw std::logic_error("encode: encoder is in external mode, use encode_vectors");
  EncoderTrace trace;
  trace.ids = pair.ids;
  trace.x0 = Matrix(pair.ids.size(), enc.in_dim);
  const Matrix& emb = params.value(enc.emb);
  for (std::size_t t = 0; t < pair.ids.size(); ++t) {
    const int id = pair.ids[t];
    if (id < 0 || static_cast<std::size_t>(id) >= enc.vocab_size)
      throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary of " +
                              std::to_string(enc.vocab_size));
    for (std::size_t j = 0; j < enc.in_dim; ++j) trace.x0.at(t, j) = emb.at(static_cast<std::size_t>(id), j);
  }
  return run_stack(params, enc, std::move(trace));
}

EncoderTrace encode_vectors(const ModelParams& params, const EncoderIdx& enc, const Matrix& inputs) {
  if (inputs.cols != enc.in_dim)
    throw DimensionError("encode_vectors: input dim " + std::to_string(inputs.cols) + ", encoder expects " +
                         std::to_string(enc.in_dim));
  EncoderTrace trace;
  trace.x0 = inputs;
  return run_stack(params, enc, std::move(trace));
}

void encoder_backward(const ModelParams& params, const EncoderIdx& enc, const EncoderTrace& trace,
                      const Matrix& dH, const Vec& dh_g, GradStore& gs) {
  const std::size_t len = trace.H.rows;
  const std::size_t L = enc.layers.size();
  const std::size_t d = enc.dim;

  // Mixed output: H[t] = sum_l mix[l] * states[l][t].
  std::vector<Matrix> dstates(L);
  for (std::size_t l = 0; l < L; ++l) dstates[l] = Matrix(len, d);
  Vec dmix(L, real(0));
  for (std::size_t l = 0; l < L; ++l) {
    const real w = trace.mix_weights[l];
    for (std::size_t t = 0; t < len; ++t) {
      const real* g = dH[t];
      const real* s = trace.states[l][t];
      real* ds = dstates[l][t];
      real acc = 0;
      for (std::size_t j = 0; j < d; ++j) {
        ds[j] += w * g[j];
        acc += g[j] * s[j];
      }
      dmix[l] += acc;
    }
  }
  // h_g taps the top layer directly.
  for (std::size_t j = 0; j < d; ++j) dstates[L - 1].at(0, j) += dh_g[j];

  // Softmax over raw mix weights.
  real mean = 0;
  for (std::size_t l = 0; l < L; ++l) mean += trace.mix_weights[l] * dmix[l];
  for (std::size_t l = 0; l < L; ++l)
    gs[enc.mix].data[l] += trace.mix_weights[l] * (dmix[l] - mean);

  Matrix dx0(trace.x0.rows, trace.x0.cols);
  const Vec zero_state(d, real(0));
  for (std::size_t li = L; li-- > 0;) {
    Vec carry(d, real(0));  // gradient flowing into h_prev of the next-earlier step
    for (std::size_t t = len; t-- > 0;) {
      Vec dh = dstates[li].row(t);
      add_inplace(dh, carry);
      const Vec x = li == 0 ? trace.x0.row(t) : trace.states[li - 1].row(t);
      const Vec h_prev = t == 0 ? zero_state : trace.states[li].row(t - 1);
      Vec dx(x.size(), real(0));
      Vec dh_prev(d, real(0));
      gru_cell_backward(params, enc.layers[li], x, h_prev, trace.cells[li][t], dh, gs, dx, dh_prev);
      carry = std::move(dh_prev);
      if (li == 0) {
        for (std::size_t j = 0; j < dx.size(); ++j) dx0.at(t, j) += dx[j];
      } else {
        real* below = dstates[li - 1][t];
        for (std::size_t j = 0; j < d; ++j) below[j] += dx[j];
      }
    }
  }

  if (!enc.external) {
    Matrix& demb = gs[enc.emb];
    for (std::size_t t = 0; t < len; ++t) {
      const auto id = static_cast<std::size_t>(trace.ids[t]);
      for (std::size_t j = 0; j < enc.in_dim; ++j) demb.at(id, j) += dx0.at(t, j);
    }
  }
}

}  // namespace dga
