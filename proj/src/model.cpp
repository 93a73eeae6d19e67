#include "dga/model.hpp"

#include "dga/errors.hpp"

namespace dga {

Model build_model(const ModelConfig& cfg) {
  if (cfg.dim == 0 || cfg.attn == 0 || cfg.classes == 0 || cfg.steps == 0 || cfg.layers == 0)
    throw FormatError("model config: all sizes must be >= 1");
  if (cfg.window <= real(0)) throw FormatError("model config: window must be positive");
  if (cfg.no_global && cfg.no_detail)
    throw FormatError("model config: no_global and no_detail cannot both be set");
  if (cfg.external_dim == 0 && cfg.vocab_size == 0)
    throw FormatError("model config: vocab size required unless external vectors are used");

  Model m;
  m.cfg = cfg;
  if (cfg.external_dim > 0)
    m.enc = register_external_encoder(m.params, cfg.external_dim, cfg.dim);
  else
    m.enc = register_encoder(m.params, cfg.vocab_size, cfg.dim, cfg.layers);
  m.dga = register_dga(m.params, cfg.dim, cfg.attn);
  m.pool = register_pool(m.params, cfg.dim, cfg.attn);
  m.mlp = register_mlp(m.params, match_dim(cfg.match_mode(), cfg.dim), cfg.dim, cfg.classes);
  return m;
}

namespace {

ForwardTrace finish_forward(const Model& model, EncoderTrace enc_trace) {
  ForwardTrace t;
  t.enc = std::move(enc_trace);
  t.dga = run_dga(model.params, model.dga, t.enc.H, t.enc.h_g, model.cfg.dga_options());
  t.states = Matrix(model.cfg.steps, model.cfg.dim);
  for (std::size_t s = 0; s < model.cfg.steps; ++s) t.states.set_row(s, t.dga.steps[s].state);
  t.pool = attention_pool(model.params, model.pool, t.states);
  t.u = match_vector(t.enc.h_g, t.pool.pooled, model.cfg.match_mode());
  t.mlp = predict(model.params, model.mlp, t.u);
  return t;
}

}  // namespace

ForwardTrace model_forward(const Model& model, const TokenizedPair& pair) {
  return finish_forward(model, encode(model.params, model.enc, pair));
}

ForwardTrace model_forward_vectors(const Model& model, const Matrix& inputs) {
  return finish_forward(model, encode_vectors(model.params, model.enc, inputs));
}

Vec predict_probs(const Model& model, const TokenizedPair& pair) {
  return model_forward(model, pair).mlp.probs;
}

real example_loss_and_grad(const Model& model, const TokenizedPair& pair, GradStore& gs) {
  const ForwardTrace t = model_forward(model, pair);
  const real loss = cross_entropy(t.mlp.probs, pair.label);

  // cross-entropy + softmax collapse to probs - onehot at the logits
  Vec dlogits = t.mlp.probs;
  dlogits[static_cast<std::size_t>(pair.label)] -= real(1);

  Vec du(t.u.size(), real(0));
  predict_backward(model.params, model.mlp, t.u, t.mlp, dlogits, gs, du);

  Vec dh_g(model.cfg.dim, real(0));
  Vec dpooled(model.cfg.dim, real(0));
  match_backward(t.enc.h_g, t.pool.pooled, model.cfg.match_mode(), du, dh_g, dpooled);

  Matrix dstates_mat(model.cfg.steps, model.cfg.dim);
  pool_backward(model.params, model.pool, t.states, t.pool, dpooled, gs, dstates_mat);
  std::vector<Vec> dstates(model.cfg.steps);
  for (std::size_t s = 0; s < model.cfg.steps; ++s) dstates[s] = dstates_mat.row(s);

  Matrix dH(t.enc.H.rows, t.enc.H.cols);
  dga_backward(model.params, model.dga, t.enc.H, t.enc.h_g, model.cfg.dga_options(), t.dga,
               dstates, gs, dH, dh_g);

  encoder_backward(model.params, model.enc, t.enc, dH, dh_g, gs);
  return loss;
}

}  // namespace dga
