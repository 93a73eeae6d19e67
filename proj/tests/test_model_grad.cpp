#include <doctest.h>

#include <string>

#include "dga/finite_diff.hpp"
#include "gradcheck_util.hpp"

using namespace dga;
using namespace dga::testutil;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.vocab_size = 20;
  cfg.dim = 8;
  cfg.layers = 2;
  cfg.attn = 6;
  cfg.classes = 3;
  cfg.steps = 2;
  cfg.window = real(4);
  return cfg;
}

void check_config(const ModelConfig& cfg, real eps, bool exact_norm, std::uint64_t seed) {
  Model model = build_model(cfg);
  model.init(seed);
  const auto batch = tiny_batch(cfg.vocab_size, cfg.classes);

  batch_grad(model, batch, eps, exact_norm);
  GradStore fd = finite_diff_grad(
      model.params, [&] { return batch_loss(model, batch, eps, exact_norm); });

  const GradCompare r = compare_grads(model.params, fd, real(1e-4), real(1e-7), real(1e-6));
  INFO("worst_rel=" << r.worst_rel << " worst_abs_small=" << r.worst_abs_small
                    << " param=" << r.worst_param << " entry=" << r.worst_entry);
  CHECK(r.ok);
}

}  // namespace

TEST_CASE("analytic gradients match finite differences: default configuration") {
  check_config(tiny_config(), real(1e-3), false, 99);
}

TEST_CASE("analytic gradients match finite differences: unsquared penalty") {
  check_config(tiny_config(), real(1e-3), true, 100);
}

TEST_CASE("analytic gradients match finite differences: zero weight decay") {
  check_config(tiny_config(), real(0), false, 101);
}

TEST_CASE("analytic gradients match finite differences: no Gaussian mask") {
  ModelConfig cfg = tiny_config();
  cfg.no_gaussian = true;
  check_config(cfg, real(1e-3), false, 102);
}

TEST_CASE("analytic gradients match finite differences: log-space mask") {
  ModelConfig cfg = tiny_config();
  cfg.log_mask = true;
  check_config(cfg, real(1e-3), false, 103);
}

TEST_CASE("analytic gradients match finite differences: mean-pooled position mix") {
  ModelConfig cfg = tiny_config();
  cfg.mean_pool_position = true;
  check_config(cfg, real(1e-3), false, 104);
}

TEST_CASE("analytic gradients match finite differences: match vector without global block") {
  ModelConfig cfg = tiny_config();
  cfg.no_global = true;
  check_config(cfg, real(1e-3), false, 105);
}

TEST_CASE("analytic gradients match finite differences: match vector without detail block") {
  ModelConfig cfg = tiny_config();
  cfg.no_detail = true;
  check_config(cfg, real(1e-3), false, 106);
}

TEST_CASE("analytic gradients match finite differences: single layer, single step") {
  ModelConfig cfg = tiny_config();
  cfg.layers = 1;
  cfg.steps = 1;
  check_config(cfg, real(1e-3), false, 107);
}

TEST_CASE("analytic gradients match finite differences: narrow window") {
  ModelConfig cfg = tiny_config();
  cfg.window = real(1);
  check_config(cfg, real(1e-3), false, 108);
}

TEST_CASE("analytic gradients match finite differences: external vectors") {
  ModelConfig cfg = tiny_config();
  cfg.vocab_size = 0;
  cfg.external_dim = 5;

  Model model = build_model(cfg);
  model.init(109);

  SplitMix64 rng(7);
  Matrix inputs(9, cfg.external_dim);
  for (real& v : inputs.data) v = rng.uniform(-1, 1);
  const int label = 1;

  auto loss_fn = [&] {
    const ForwardTrace t = model_forward_vectors(model, inputs);
    return cross_entropy(t.mlp.probs, label);
  };

  model.params.zero_grads();
  GradStore gs = make_grad_store(model.params);
  {
    const ForwardTrace t = model_forward_vectors(model, inputs);
    Vec dlogits = t.mlp.probs;
    dlogits[label] -= real(1);
    Vec du(t.u.size(), real(0));
    predict_backward(model.params, model.mlp, t.u, t.mlp, dlogits, gs, du);
    Vec dh_g(cfg.dim, real(0)), dpooled(cfg.dim, real(0));
    match_backward(t.enc.h_g, t.pool.pooled, cfg.match_mode(), du, dh_g, dpooled);
    Matrix dstates_mat(cfg.steps, cfg.dim);
    pool_backward(model.params, model.pool, t.states, t.pool, dpooled, gs, dstates_mat);
    std::vector<Vec> dstates(cfg.steps);
    for (std::size_t s = 0; s < cfg.steps; ++s) dstates[s] = dstates_mat.row(s);
    Matrix dH(t.enc.H.rows, t.enc.H.cols);
    dga_backward(model.params, model.dga, t.enc.H, t.enc.h_g, cfg.dga_options(), t.dga, dstates,
                 gs, dH, dh_g);
    encoder_backward(model.params, model.enc, t.enc, dH, dh_g, gs);
  }
  accumulate_grads(model.params, gs);

  GradStore fd = finite_diff_grad(model.params, loss_fn);
  const GradCompare r = compare_grads(model.params, fd, real(1e-4), real(1e-7), real(1e-6));
  INFO("worst_rel=" << r.worst_rel << " param=" << r.worst_param);
  CHECK(r.ok);
}
