// Acceptance gate: runs the checks that qualify a build, one PASS/FAIL line
// per criterion. Thresholds live here, next to the checks. Select subsets
// with --only; longer sections write their evidence under --artifacts.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include "dga/checkpoint.hpp"
#include "dga/classifier.hpp"
#include "dga/dataset.hpp"
#include "dga/dga_unit.hpp"
#include "dga/encoder.hpp"
#include "dga/errors.hpp"
#include "dga/finite_diff.hpp"
#include "dga/matrix.hpp"
#include "dga/model.hpp"
#include "dga/params.hpp"
#include "dga/rng.hpp"
#include "dga/synthetic.hpp"
#include "dga/tokenizer.hpp"
#include "dga/trainer.hpp"
#include "dga/vocab.hpp"

using namespace dga;

namespace {

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void randomize(ModelParams& params, std::uint64_t seed, real scale) {
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < params.size(); ++i)
    for (real& x : params[i].value.data) x = static_cast<real>(rng.uniform(-scale, scale));
}

Matrix random_matrix(SplitMix64& rng, std::size_t r, std::size_t c, real scale) {
  Matrix m(r, c);
  for (real& v : m.data) v = static_cast<real>(rng.uniform(-scale, scale));
  return m;
}

Vec random_vec(SplitMix64& rng, std::size_t n, real scale) {
  Vec v(n);
  for (real& x : v) x = static_cast<real>(rng.uniform(-scale, scale));
  return v;
}

// ---- independent long-double re-evaluations of the model formulas ----

long double position_oracle(const ModelParams& params, const DgaIdx& idx, const Matrix& H,
                            const Vec& hbar_prev, const Vec& h_g, bool mean_pool) {
  const std::size_t d = idx.dim, a = idx.attn;
  std::vector<long double> sum(d, 0.0L), m(d, 0.0L);
  for (std::size_t t = 0; t < H.rows; ++t)
    for (std::size_t j = 0; j < d; ++j) sum[j] += H.at(t, j);
  if (mean_pool)
    for (long double& s : sum) s /= static_cast<long double>(H.rows);
  for (std::size_t i = 0; i < d; ++i) {
    long double acc = 0;
    for (std::size_t j = 0; j < d; ++j)
      acc += static_cast<long double>(params.value(idx.w1p).at(i, j)) * sum[j] +
             static_cast<long double>(params.value(idx.w2p).at(i, j)) * hbar_prev[j] +
             static_cast<long double>(params.value(idx.w3p).at(i, j)) * h_g[j];
    m[i] = acc;
  }
  long double dot = 0;
  for (std::size_t i = 0; i < a; ++i) {
    long double acc = 0;
    for (std::size_t j = 0; j < d; ++j)
      acc += static_cast<long double>(params.value(idx.up).at(i, j)) * m[j];
    dot += static_cast<long double>(params.value(idx.vp).data[i]) * std::tanh(acc);
  }
  return static_cast<long double>(H.rows) / (1.0L + std::exp(-dot));
}

struct AttOracle {
  std::vector<long double> scores, g, weights, context;
};

AttOracle attention_oracle(const ModelParams& params, const DgaIdx& idx, const Matrix& H,
                           const Vec& hbar_prev, const Vec& h_g, long double p,
                           long double window) {
  const std::size_t len = H.rows, d = idx.dim, a = idx.attn;
  AttOracle o;
  o.scores.resize(len);
  o.g.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    long double s = 0;
    for (std::size_t k = 0; k < a; ++k) {
      long double acc = 0;
      for (std::size_t j = 0; j < d; ++j)
        acc += static_cast<long double>(params.value(idx.wd).at(k, j)) * H.at(i, j) +
               static_cast<long double>(params.value(idx.ud).at(k, j)) * hbar_prev[j] +
               static_cast<long double>(params.value(idx.md).at(k, j)) * h_g[j];
      s += static_cast<long double>(params.value(idx.omega).data[k]) * std::tanh(acc);
    }
    o.scores[i] = s;
    const long double sigma = window / 2.0L;
    const long double di = static_cast<long double>(i) - p;
    o.g[i] = std::exp(-(di * di) / (2.0L * sigma * sigma));
  }
  std::vector<long double> mod(len);
  for (std::size_t i = 0; i < len; ++i) mod[i] = o.scores[i] * o.g[i];
  long double mx = mod[0];
  for (long double v : mod) mx = std::max(mx, v);
  long double denom = 0;
  o.weights.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    o.weights[i] = std::exp(mod[i] - mx);
    denom += o.weights[i];
  }
  for (long double& w : o.weights) w /= denom;
  o.context.assign(d, 0.0L);
  for (std::size_t i = 0; i < len; ++i)
    for (std::size_t j = 0; j < d; ++j) o.context[j] += o.weights[i] * H.at(i, j);
  return o;
}

std::vector<long double> pool_oracle(const ModelParams& params, const PoolIdx& idx,
                                     const Matrix& states) {
  const std::size_t T = states.rows, d = idx.dim, a = idx.attn;
  std::vector<long double> scores(T);
  for (std::size_t t = 0; t < T; ++t) {
    long double s = 0;
    for (std::size_t i = 0; i < a; ++i) {
      long double acc = static_cast<long double>(params.value(idx.b).data[i]);
      for (std::size_t j = 0; j < d; ++j)
        acc += static_cast<long double>(params.value(idx.w).at(i, j)) * states.at(t, j);
      s += static_cast<long double>(params.value(idx.omega).data[i]) * std::tanh(acc);
    }
    scores[t] = s;
  }
  long double mx = scores[0];
  for (long double s : scores) mx = std::max(mx, s);
  long double denom = 0;
  std::vector<long double> w(T);
  for (std::size_t t = 0; t < T; ++t) {
    w[t] = std::exp(scores[t] - mx);
    denom += w[t];
  }
  std::vector<long double> pooled(d, 0.0L);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < d; ++j) pooled[j] += (w[t] / denom) * states.at(t, j);
  return pooled;
}

std::vector<long double> mlp_oracle(const ModelParams& params, const MlpIdx& idx, const Vec& u) {
  std::vector<long double> hidden(idx.hidden);
  for (std::size_t i = 0; i < idx.hidden; ++i) {
    long double acc = static_cast<long double>(params.value(idx.b1).data[i]);
    for (std::size_t j = 0; j < idx.in_dim; ++j)
      acc += static_cast<long double>(params.value(idx.w1).at(i, j)) * u[j];
    hidden[i] = std::tanh(acc);
  }
  std::vector<long double> logits(idx.classes);
  for (std::size_t i = 0; i < idx.classes; ++i) {
    long double acc = static_cast<long double>(params.value(idx.b2).data[i]);
    for (std::size_t j = 0; j < idx.hidden; ++j)
      acc += static_cast<long double>(params.value(idx.w2).at(i, j)) * hidden[j];
    logits[i] = acc;
  }
  long double mx = logits[0];
  for (long double v : logits) mx = std::max(mx, v);
  long double denom = 0;
  std::vector<long double> probs(idx.classes);
  for (std::size_t i = 0; i < idx.classes; ++i) {
    probs[i] = std::exp(logits[i] - mx);
    denom += probs[i];
  }
  for (long double& p : probs) p /= denom;
  return probs;
}

// ---- shared state across criteria ----

struct Context {
  std::string artifacts = "acceptance_artifacts";

  // tokenized window task, built on first use (criteria 5, 6, 7)
  bool have_window = false;
  Vocabulary window_vocab;
  std::vector<TokenizedPair> train, valid, test;

  std::vector<real> full_d4_test_accs;  // filled by criterion 5, reused by 6
};

std::vector<TokenizedPair> tokenize_all(const std::vector<LabeledPair>& pairs,
                                        const Vocabulary& vocab) {
  std::vector<TokenizedPair> out;
  out.reserve(pairs.size());
  for (const LabeledPair& p : pairs) {
    TokenizedPair t = tokenize_pair(p.sentence_a, p.sentence_b, vocab, 64);
    t.label = p.label == "1" ? 1 : 0;
    out.push_back(std::move(t));
  }
  return out;
}

void ensure_window_data(Context& ctx) {
  if (ctx.have_window) return;
  SyntheticSpec spec;
  spec.task = "shared-window";
  spec.train_n = 8000;
  spec.valid_n = 1000;
  spec.test_n = 1000;
  spec.seed = 7;
  std::printf("  generating window task (8000/1000/1000, seed 7)\n");
  std::fflush(stdout);
  SyntheticData data = generate_synthetic(spec);
  ctx.window_vocab = Vocabulary::from_tokens(data.vocab_words);
  ctx.train = tokenize_all(data.train, ctx.window_vocab);
  ctx.valid = tokenize_all(data.valid, ctx.window_vocab);
  ctx.test = tokenize_all(data.test, ctx.window_vocab);
  ctx.have_window = true;
}

ModelConfig pinned_config(const Context& ctx) {
  ModelConfig cfg;
  cfg.vocab_size = ctx.window_vocab.size();
  cfg.dim = 64;
  cfg.layers = 2;
  cfg.attn = 200;
  cfg.classes = 2;
  cfg.steps = 4;
  cfg.window = real(4);
  return cfg;
}

TrainOptions pinned_options(std::uint64_t seed) {
  TrainOptions opt;
  opt.lr = real(1e-4);
  opt.batch_size = 32;
  opt.max_epochs = 30;
  opt.patience = 30;  // always use the full epoch budget; keep the best epoch
  opt.seed = seed;
  return opt;
}

// ---- criterion 1: analytic gradients vs central differences ----

bool criterion_gradients() {
  const double t0 = now_s();
  std::vector<std::string> words;
  for (int i = 1; i <= 16; ++i) words.push_back("w" + std::to_string(i));
  const Vocabulary vocab = Vocabulary::from_tokens(words);  // 16 + 4 reserved = 20

  ModelConfig cfg;
  cfg.vocab_size = vocab.size();
  cfg.dim = 8;
  cfg.attn = 6;
  cfg.layers = 2;
  cfg.steps = 2;
  cfg.window = real(4);
  cfg.classes = 3;

  const real eps_penalty = real(1e-3);
  double worst = 0;
  SplitMix64 rng(404);

  for (int inst = 0; inst < 3; ++inst) {
    Model model = build_model(cfg);
    randomize(model.params, 900 + static_cast<std::uint64_t>(inst), real(0.4));

    std::string sa, sb;
    for (int i = 0; i < 5; ++i) sa += (i ? " " : "") + words[rng.next_below(words.size())];
    for (int i = 0; i < 4; ++i) sb += (i ? " " : "") + words[rng.next_below(words.size())];
    TokenizedPair pair = tokenize_pair(sa, sb, vocab, 12);
    pair.label = static_cast<int>(rng.next_below(3));

    model.params.zero_grads();
    GradStore gs = make_grad_store(model.params);
    example_loss_and_grad(model, pair, gs);
    accumulate_grads(model.params, gs);
    l2_penalty_grad(model.params, eps_penalty, false);

    auto loss_fn = [&]() {
      const ForwardTrace tr = model_forward(model, pair);
      return cross_entropy(tr.mlp.probs, pair.label) +
             l2_penalty(model.params, eps_penalty, false);
    };
    GradStore fd = finite_diff_grad(model.params, loss_fn, real(1e-5));

    for (std::size_t p = 0; p < model.params.size(); ++p) {
      const Matrix& a = model.params[p].grad;
      for (std::size_t k = 0; k < a.data.size(); ++k) {
        const double av = a.data[k], fv = fd[p].data[k];
        const double diff = std::abs(av - fv);
        if (std::abs(av) < 1e-6) {
          if (diff > 1e-7) {
            std::printf("criterion 1 FAIL  tiny-gradient deviation %.3e at %s[%zu]\n", diff,
                        model.params[p].name.c_str(), k);
            return false;
          }
        } else {
          worst = std::max(worst, diff / std::max(std::abs(av), std::abs(fv)));
        }
      }
    }
  }
  const double dt = now_s() - t0;
  const bool ok = worst < 1e-4 && dt < 60.0;
  std::printf("criterion 1 %s  full-loss gradients vs central differences: max rel err %.3e "
              "(limit 1e-4), %.1f s (limit 60)\n",
              ok ? "PASS" : "FAIL", worst, dt);
  return ok;
}

// ---- criterion 2: forward operations vs direct formula oracles ----

bool criterion_formulas() {
  SplitMix64 rng(505);
  long double worst = 0;
  const char* worst_op = "none";
  auto track = [&](const char* op, long double d) {
    if (d > worst) {
      worst = d;
      worst_op = op;
    }
  };

  for (int rep = 0; rep < 100; ++rep) {
    ModelParams params;
    DgaIdx idx = register_dga(params, 6, 5);
    randomize(params, 600 + static_cast<std::uint64_t>(rep), real(0.8));
    const std::size_t len = 2 + rng.next_below(9);
    Matrix H = random_matrix(rng, len, 6, real(1.0));
    Vec hbar = random_vec(rng, 6, real(1.0));
    Vec h_g = random_vec(rng, 6, real(1.0));
    const bool mean_pool = rep % 2 == 1;

    const real p = generate_position(params, idx, H, hbar, h_g, mean_pool);
    track("generate_position",
          std::abs(static_cast<long double>(p) - position_oracle(params, idx, H, hbar, h_g,
                                                                 mean_pool)));

    const real window = real(1) + static_cast<real>(rng.next_below(6));
    Vec g = gaussian_vector(p, len, window);
    for (std::size_t i = 0; i < len; ++i) {
      const long double sigma = static_cast<long double>(window) / 2.0L;
      const long double di = static_cast<long double>(i) - static_cast<long double>(p);
      track("gaussian_vector",
            std::abs(static_cast<long double>(g[i]) - std::exp(-(di * di) / (2 * sigma * sigma))));
    }

    DgaOptions opt;
    opt.window = window;
    AttentionResult att = gaussian_attention(params, idx, H, hbar, h_g, p, opt);
    AttOracle ao = attention_oracle(params, idx, H, hbar, h_g, p, window);
    for (std::size_t i = 0; i < len; ++i) {
      track("attention scores", std::abs(static_cast<long double>(att.scores[i]) - ao.scores[i]));
      track("attention weights",
            std::abs(static_cast<long double>(att.weights[i]) - ao.weights[i]));
    }
    for (std::size_t j = 0; j < 6; ++j)
      track("attention context",
            std::abs(static_cast<long double>(att.context[j]) - ao.context[j]));
  }

  for (int rep = 0; rep < 100; ++rep) {
    ModelParams params;
    PoolIdx pidx = register_pool(params, 7, 4);
    MlpIdx midx = register_mlp(params, 8, 6, 3);
    randomize(params, 700 + static_cast<std::uint64_t>(rep), real(0.9));

    Matrix states = random_matrix(rng, 1 + rng.next_below(6), 7, real(1.2));
    PoolTrace pt = attention_pool(params, pidx, states);
    auto po = pool_oracle(params, pidx, states);
    for (std::size_t j = 0; j < 7; ++j)
      track("attention_pool", std::abs(static_cast<long double>(pt.pooled[j]) - po[j]));

    Vec h_g = random_vec(rng, 4, real(1.0)), hbar = random_vec(rng, 4, real(1.0));
    Vec u = match_vector(h_g, hbar, MatchMode::Full);
    for (std::size_t j = 0; j < 4; ++j) {
      track("heuristic_match", std::abs(static_cast<long double>(u[j]) - h_g[j]));
      track("heuristic_match", std::abs(static_cast<long double>(u[4 + j]) - hbar[j]));
      track("heuristic_match", std::abs(static_cast<long double>(u[8 + j]) -
                                        static_cast<long double>(h_g[j]) * hbar[j]));
      track("heuristic_match", std::abs(static_cast<long double>(u[12 + j]) -
                                        (static_cast<long double>(hbar[j]) - h_g[j])));
    }

    Vec mu = random_vec(rng, 8, real(1.5));
    MlpTrace mt = predict(params, midx, mu);
    auto mo = mlp_oracle(params, midx, mu);
    for (std::size_t i = 0; i < 3; ++i)
      track("predict", std::abs(static_cast<long double>(mt.probs[i]) - mo[i]));
  }

  const bool ok = worst < 1e-10L;
  std::printf("criterion 2 %s  forward ops vs direct evaluation on 100 instances each: "
              "max |delta| %.3Le (limit 1e-10) in %s\n",
              ok ? "PASS" : "FAIL", worst, worst_op);
  return ok;
}

// ---- criterion 3: randomized invariants, >= 1000 cases each ----

bool criterion_invariants() {
  SplitMix64 rng(808);
  bool ok = true;
  auto fail = [&](const char* what, int rep) {
    std::printf("criterion 3 FAIL  %s violated at case %d\n", what, rep);
    ok = false;
  };

  for (int rep = 0; rep < 1200 && ok; ++rep) {
    ModelParams params;
    DgaIdx idx = register_dga(params, 5, 4);
    randomize(params, 1000 + static_cast<std::uint64_t>(rep), real(2.0));
    const std::size_t len = 1 + rng.next_below(12);
    Matrix H = random_matrix(rng, len, 5, real(2.5));
    Vec hbar = random_vec(rng, 5, real(2.5));
    Vec h_g = random_vec(rng, 5, real(2.5));

    const real p = generate_position(params, idx, H, hbar, h_g);
    if (!(p > real(0) && p < static_cast<real>(len))) fail("position bound", rep);

    const real window = real(1) + static_cast<real>(rng.next_below(8));
    Vec g = gaussian_vector(p, len, window);
    real gmax = 0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < len; ++i) {
      if (!(g[i] > real(0) && g[i] <= real(1))) fail("gaussian range", rep);
      if (g[i] > gmax) {
        gmax = g[i];
        arg = i;
      }
    }
    const real frac = p - std::floor(p);
    if (std::abs(frac - real(0.5)) > real(1e-6)) {
      const auto nearest = static_cast<std::size_t>(std::min<long long>(
          static_cast<long long>(len) - 1, std::max<long long>(0, std::llround(p))));
      if (arg != nearest) fail("gaussian peak at nearest position", rep);
    }

    DgaOptions opt;
    opt.steps = 1 + rng.next_below(3);
    opt.window = window;
    DgaRun run = run_dga(params, idx, H, h_g, opt);
    for (const DgaStep& st : run.steps) {
      real sum = 0;
      for (real w : st.weights) sum += w;
      if (std::abs(sum - real(1)) > real(1e-12)) fail("step weight normalization", rep);
    }
  }

  // integer focus position: the decay is exactly symmetric around it
  for (int rep = 0; rep < 1000 && ok; ++rep) {
    const std::size_t len = 5 + rng.next_below(8);
    const real p = static_cast<real>(2 + rng.next_below(len - 4));
    Vec g = gaussian_vector(p, len, real(1) + static_cast<real>(rng.next_below(6)));
    const auto c = static_cast<std::size_t>(p);
    for (std::size_t k = 1; c >= k && c + k < len; ++k)
      if (g[c - k] != g[c + k]) fail("gaussian symmetry", rep);
  }

  for (int rep = 0; rep < 1200 && ok; ++rep) {
    ModelParams params;
    PoolIdx idx = register_pool(params, 6, 4);
    randomize(params, 3000 + static_cast<std::uint64_t>(rep), real(2.0));
    Matrix states = random_matrix(rng, 1 + rng.next_below(6), 6, real(3.0));
    PoolTrace tr = attention_pool(params, idx, states);
    real sum = 0;
    for (real w : tr.weights) sum += w;
    if (std::abs(sum - real(1)) > real(1e-12)) fail("pooling weight normalization", rep);
    for (std::size_t j = 0; j < 6; ++j) {
      real lo = states.at(0, j), hi = states.at(0, j);
      for (std::size_t t = 1; t < states.rows; ++t) {
        lo = std::min(lo, states.at(t, j));
        hi = std::max(hi, states.at(t, j));
      }
      if (tr.pooled[j] < lo - real(1e-12) || tr.pooled[j] > hi + real(1e-12))
        fail("pooled state inside the state envelope", rep);
    }
  }

  for (int rep = 0; rep < 1200 && ok; ++rep) {
    ModelParams params;
    MlpIdx idx = register_mlp(params, 5, 4, 2 + rng.next_below(4));
    randomize(params, 4000 + static_cast<std::uint64_t>(rep), real(3.0));
    Vec u = random_vec(rng, 5, real(20.0));  // includes saturated inputs
    MlpTrace tr = predict(params, idx, u);
    real sum = 0;
    for (real p : tr.probs) {
      if (!(p > real(0) && p < real(1))) fail("prediction probability range", rep);
      sum += p;
    }
    if (std::abs(sum - real(1)) > real(1e-12)) fail("prediction normalization", rep);
  }

  if (ok)
    std::printf("criterion 3 PASS  position/gaussian/normalization/envelope/probability "
                "invariants over >=1000 randomized cases each\n");
  return ok;
}

// ---- criterion 4: exact degeneracies ----

bool criterion_degeneracies() {
  SplitMix64 rng(909);
  bool ok = true;

  // disabling the decay equals multiplying scores by exactly one
  for (int rep = 0; rep < 200 && ok; ++rep) {
    ModelParams params;
    DgaIdx idx = register_dga(params, 6, 4);
    randomize(params, 5000 + static_cast<std::uint64_t>(rep), real(1.0));
    const std::size_t len = 1 + rng.next_below(10);
    Matrix H = random_matrix(rng, len, 6, real(1.5));
    Vec hbar = random_vec(rng, 6, real(1.5));
    Vec h_g = random_vec(rng, 6, real(1.5));
    const real p = generate_position(params, idx, H, hbar, h_g);

    DgaOptions plain;
    plain.no_gaussian = true;
    AttentionResult att = gaussian_attention(params, idx, H, hbar, h_g, p, plain);
    Vec ones_mod(len);
    for (std::size_t i = 0; i < len; ++i) ones_mod[i] = att.scores[i] * real(1);
    const Vec want_w = softmax(ones_mod);
    for (std::size_t i = 0; i < len; ++i) {
      if (std::memcmp(&att.modulated[i], &ones_mod[i], sizeof(real)) != 0 ||
          std::memcmp(&att.weights[i], &want_w[i], sizeof(real)) != 0) {
        std::printf("criterion 4 FAIL  masked-off attention differs from unit decay at %d\n",
                    rep);
        ok = false;
        break;
      }
    }
  }

  // a single step state pools to itself, bit for bit
  for (int rep = 0; rep < 200 && ok; ++rep) {
    ModelParams params;
    PoolIdx idx = register_pool(params, 7, 5);
    randomize(params, 6000 + static_cast<std::uint64_t>(rep), real(1.5));
    Matrix states = random_matrix(rng, 1, 7, real(2.0));
    PoolTrace tr = attention_pool(params, idx, states);
    if (std::memcmp(tr.pooled.data(), states.data.data(), 7 * sizeof(real)) != 0) {
      std::printf("criterion 4 FAIL  single-step pooling is not the identity at %d\n", rep);
      ok = false;
    }
  }

  // a one-layer encoder's mixed output is that layer's states, bit for bit
  std::vector<std::string> words;
  for (int i = 1; i <= 8; ++i) words.push_back("t" + std::to_string(i));
  const Vocabulary vocab = Vocabulary::from_tokens(words);
  for (int rep = 0; rep < 50 && ok; ++rep) {
    ModelParams params;
    EncoderIdx enc = register_encoder(params, vocab.size(), 6, 1);
    randomize(params, 7000 + static_cast<std::uint64_t>(rep), real(0.8));
    std::string sa, sb;
    for (int i = 0; i < 4; ++i) sa += (i ? " " : "") + words[rng.next_below(words.size())];
    for (int i = 0; i < 3; ++i) sb += (i ? " " : "") + words[rng.next_below(words.size())];
    const TokenizedPair pair = tokenize_pair(sa, sb, vocab, 16);
    EncoderTrace tr = encode(params, enc, pair);
    if (std::memcmp(tr.H.data.data(), tr.states[0].data.data(),
                    tr.H.data.size() * sizeof(real)) != 0 ||
        std::memcmp(tr.h_g.data(), tr.states[0][0], 6 * sizeof(real)) != 0) {
      std::printf("criterion 4 FAIL  one-layer mix is not the identity at %d\n", rep);
      ok = false;
    }
  }

  if (ok)
    std::printf("criterion 4 PASS  unit-decay equivalence, single-step pooling identity, "
                "one-layer mix identity (bitwise)\n");
  return ok;
}

// ---- criterion 5: window-task convergence at the pinned settings ----

bool criterion_convergence(Context& ctx) {
  ensure_window_data(ctx);
  std::ofstream log(ctx.artifacts + "/convergence.txt");
  auto note = [&](const std::string& line) {
    std::printf("  %s\n", line.c_str());
    std::fflush(stdout);
    log << line << '\n';
    log.flush();
  };

  std::vector<real> full_acc, plain_acc;
  double worst_wall = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (const bool plain : {false, true}) {
      ModelConfig cfg = pinned_config(ctx);
      cfg.no_gaussian = plain;
      Model model = build_model(cfg);
      model.init(seed);
      TrainReport rep = train_model(model, ctx.train, ctx.valid, pinned_options(seed));
      const real acc = evaluate_model(model, ctx.test).accuracy;
      (plain ? plain_acc : full_acc).push_back(acc);
      if (!plain) worst_wall = std::max(worst_wall, rep.wall_seconds);
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "%s seed %llu: test_acc %.4f (best epoch %zu, valid %.4f, %.0f s)",
                    plain ? "no-decay " : "full model", static_cast<unsigned long long>(seed),
                    static_cast<double>(acc), rep.best_epoch,
                    static_cast<double>(rep.best_valid_acc), rep.wall_seconds);
      note(buf);
    }
  }

  const real mean_full = std::accumulate(full_acc.begin(), full_acc.end(), real(0)) / 5;
  const real mean_plain = std::accumulate(plain_acc.begin(), plain_acc.end(), real(0)) / 5;
  {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "mean over 5 seeds: full %.4f, no-decay %.4f, margin %+.4f "
                  "(directional, logged only)",
                  static_cast<double>(mean_full), static_cast<double>(mean_plain),
                  static_cast<double>(mean_full - mean_plain));
    note(buf);
  }

  ctx.full_d4_test_accs = full_acc;

  const bool ok = mean_full >= real(0.90) && worst_wall < 600.0;
  std::printf("criterion 5 %s  window task at d=64 L=2 D=4 T=4 lr=1e-4 batch=32: mean test "
              "accuracy %.4f over 5 seeds (need >= 0.90) within 30 epochs, slowest run %.0f s "
              "(limit 600)\n",
              ok ? "PASS" : "FAIL", static_cast<double>(mean_full), worst_wall);
  return ok;
}

// Control comparison, logged only: on the bag-overlap task the decay should
// neither help nor hurt.
void control_comparison(Context& ctx) {
  SyntheticSpec spec;
  spec.task = "keyword-overlap";
  spec.train_n = 4000;
  spec.valid_n = 500;
  spec.test_n = 500;
  spec.seed = 11;
  SyntheticData data = generate_synthetic(spec);
  const Vocabulary vocab = Vocabulary::from_tokens(data.vocab_words);
  const auto train = tokenize_all(data.train, vocab);
  const auto valid = tokenize_all(data.valid, vocab);
  const auto test = tokenize_all(data.test, vocab);

  std::ofstream log(ctx.artifacts + "/control.txt");
  std::vector<real> full_acc, plain_acc;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (const bool plain : {false, true}) {
      ModelConfig cfg = pinned_config(ctx);
      cfg.vocab_size = vocab.size();
      cfg.no_gaussian = plain;
      Model model = build_model(cfg);
      model.init(seed);
      TrainOptions opt = pinned_options(seed);
      opt.max_epochs = 12;
      opt.patience = 12;
      train_model(model, train, valid, opt);
      const real acc = evaluate_model(model, test).accuracy;
      (plain ? plain_acc : full_acc).push_back(acc);
      char buf[120];
      std::snprintf(buf, sizeof buf, "control %s seed %llu: test_acc %.4f",
                    plain ? "no-decay" : "full    ", static_cast<unsigned long long>(seed),
                    static_cast<double>(acc));
      std::printf("  %s\n", buf);
      std::fflush(stdout);
      log << buf << '\n';
    }
  }
  const real mf = std::accumulate(full_acc.begin(), full_acc.end(), real(0)) / 5;
  const real mp = std::accumulate(plain_acc.begin(), plain_acc.end(), real(0)) / 5;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "control means over 5 seeds: full %.4f, no-decay %.4f, |gap| %.4f "
                "(expected <= 0.02; logged only)",
                static_cast<double>(mf), static_cast<double>(mp),
                static_cast<double>(std::abs(mf - mp)));
  std::printf("  %s\n", buf);
  log << buf << '\n';
}

// ---- criterion 6: sensitivity grid and window-size ordering ----

bool criterion_sweep(Context& ctx) {
  ensure_window_data(ctx);

  // part 1: the default 6x8 grid completes with well-formed rows (small
  // budget; the grid machinery, not the attainable accuracy, is under test)
  ModelConfig grid_cfg = pinned_config(ctx);
  grid_cfg.dim = 32;
  grid_cfg.attn = 64;
  TrainOptions grid_opt;
  grid_opt.lr = real(3e-4);
  grid_opt.batch_size = 32;
  grid_opt.max_epochs = 4;
  grid_opt.patience = 4;
  grid_opt.seed = 1;
  SweepPlan plan;
  for (int w = 1; w <= 6; ++w) plan.windows.push_back(static_cast<real>(w));
  for (std::size_t t = 1; t <= 8; ++t) plan.steps.push_back(t);
  plan.seeds = 1;

  const std::vector<TokenizedPair> train(ctx.train.begin(), ctx.train.begin() + 1500);
  const std::vector<TokenizedPair> valid(ctx.valid.begin(), ctx.valid.begin() + 400);
  const std::vector<TokenizedPair> test(ctx.test.begin(), ctx.test.begin() + 400);
  std::printf("  running the 6x8 grid at reduced budget (d=32, 1500 pairs, 4 epochs)\n");
  std::fflush(stdout);
  const auto rows = run_sweep(grid_cfg, grid_opt, plan, train, valid, test);
  const std::string csv = ctx.artifacts + "/sweep.csv";
  write_sweep_csv(csv, rows);
  const auto back = read_sweep_csv(csv);

  bool grid_ok = rows.size() == 48 && back.size() == 48;
  std::size_t k = 0;
  for (int w = 1; w <= 6 && grid_ok; ++w)
    for (std::size_t t = 1; t <= 8 && grid_ok; ++t, ++k) {
      const SweepRow& r = back[k];
      grid_ok = r.window == static_cast<real>(w) && r.steps == t && r.status == "ok" &&
                r.valid_acc >= real(0) && r.valid_acc <= real(1) && r.test_acc >= real(0) &&
                r.test_acc <= real(1);
    }
  std::printf("  grid: %zu rows, %s (%s)\n", rows.size(),
              grid_ok ? "all ok and round-tripped" : "malformed or failed rows", csv.c_str());
  std::fflush(stdout);

  // part 2: mean accuracy ordering between window sizes 4 and 1, 5 seeds
  // each.  Both widths train to convergence (early stopping under a raised
  // epoch cap) rather than to a fixed epoch count: the widths converge at
  // different speeds, and a fixed budget would clip the slower one mid-climb
  // and measure speed instead of attainable accuracy.
  std::vector<real> d4_accs, d1_accs;
  for (const real width : {real(4), real(1)}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ModelConfig cfg = pinned_config(ctx);
      cfg.window = width;
      Model model = build_model(cfg);
      model.init(seed);
      TrainOptions opt = pinned_options(seed);
      opt.max_epochs = 60;
      opt.patience = 8;
      TrainReport rep = train_model(model, ctx.train, ctx.valid, opt);
      const real acc = evaluate_model(model, ctx.test).accuracy;
      (width == real(4) ? d4_accs : d1_accs).push_back(acc);
      std::printf("  width %.0f seed %llu: test_acc %.4f (best epoch %zu, ran %zu)\n",
                  static_cast<double>(width), static_cast<unsigned long long>(seed),
                  static_cast<double>(acc), rep.best_epoch, rep.epochs_run);
      std::fflush(stdout);
    }
  }
  const real mean4 = std::accumulate(d4_accs.begin(), d4_accs.end(), real(0)) / 5;
  const real mean1 = std::accumulate(d1_accs.begin(), d1_accs.end(), real(0)) / 5;

  const bool ok = grid_ok && mean4 >= mean1;
  std::printf("criterion 6 %s  48-row grid well-formed; converged mean test accuracy width 4 = "
              "%.4f >= width 1 = %.4f over 5 seeds: %s\n",
              ok ? "PASS" : "FAIL", static_cast<double>(mean4), static_cast<double>(mean1),
              mean4 >= mean1 ? "yes" : "no");
  return ok;
}

// ---- criterion 7: bitwise reruns and checkpoint persistence ----

bool criterion_determinism(Context& ctx) {
  ensure_window_data(ctx);
  const std::vector<TokenizedPair> train(ctx.train.begin(), ctx.train.begin() + 2000);
  const std::vector<TokenizedPair> valid(ctx.valid.begin(), ctx.valid.begin() + 500);

  TrainOptions opt = pinned_options(42);
  opt.max_epochs = 2;
  opt.patience = 99;

  TrainReport reps[2];
  Model models[2] = {build_model(pinned_config(ctx)), build_model(pinned_config(ctx))};
  for (int i = 0; i < 2; ++i) {
    models[i].init(42);
    reps[i] = train_model(models[i], train, valid, opt);
  }
  const bool bitwise =
      reps[0].train_loss.size() == reps[1].train_loss.size() &&
      std::memcmp(reps[0].train_loss.data(), reps[1].train_loss.data(),
                  reps[0].train_loss.size() * sizeof(real)) == 0 &&
      reps[0].valid_acc == reps[1].valid_acc;

  const std::string path = ctx.artifacts + "/persist.bin";
  save_checkpoint(path, models[0].params);
  Model loaded = build_model(pinned_config(ctx));
  load_checkpoint(path, loaded.params);
  const real acc_orig = evaluate_model(models[0], valid).accuracy;
  const real acc_loaded = evaluate_model(loaded, valid).accuracy;

  const bool ok = bitwise && acc_orig == acc_loaded;
  std::printf("criterion 7 %s  identical reruns bit-identical from the first epoch (loss %.17g), "
              "checkpoint reload reproduces accuracy %.4f exactly\n",
              ok ? "PASS" : "FAIL", static_cast<double>(reps[0].train_loss[0]),
              static_cast<double>(acc_loaded));
  return ok;
}

// ---- criterion 8: corpus-format ingestion smoke, scale disclosure ----

bool criterion_ingestion(Context& ctx) {
  std::printf(
      "  scale disclosure: published results for this architecture on the standard pair\n"
      "  corpora (SNLI 90.72, hard-split SNLI 81.44, SICK 88.36, Quora 91.7, MSRP 84.5)\n"
      "  rest on pretrained-transformer token vectors and full-corpus training budgets.\n"
      "  This build targets desk-scale verification; those figures are NOT acceptance\n"
      "  targets here. The ingestion path below is checked as a smoke test only.\n");
  std::fflush(stdout);
  try {
    // fabricate a corpus-shaped tab-separated file: three-way labels,
    // natural-ish sentences, a couple of malformed rows
    const std::vector<std::string> nouns = {"man",  "woman", "dog",  "child", "rider",
                                            "crowd", "boat",  "horse", "player", "band"};
    const std::vector<std::string> verbs = {"walks", "rides", "watches", "holds", "follows",
                                            "passes", "carries", "leads"};
    const std::vector<std::string> mods = {"in the park", "on the beach", "near the road",
                                           "at night",    "in the rain",  "by the river"};
    const std::vector<std::string> labels = {"entailment", "neutral", "contradiction"};
    SplitMix64 rng(2024);
    const std::string tsv_path = ctx.artifacts + "/corpus_sample.tsv";
    {
      std::ofstream tsv(tsv_path);
      for (int i = 0; i < 1100; ++i) {
        const std::string a = "the " + nouns[rng.next_below(nouns.size())] + " " +
                              verbs[rng.next_below(verbs.size())] + " " +
                              mods[rng.next_below(mods.size())];
        const std::string b = "the " + nouns[rng.next_below(nouns.size())] + " " +
                              verbs[rng.next_below(verbs.size())] + " " +
                              mods[rng.next_below(mods.size())];
        tsv << a << '\t' << b << '\t' << labels[rng.next_below(labels.size())] << '\n';
        if (i == 300 || i == 700) tsv << "short line without tabs\n";
      }
    }

    const std::vector<LabeledPair> pairs = read_tsv_pairs(tsv_path);
    if (pairs.size() < 1000) throw FormatError("converter kept too few rows");
    const std::string jsonl_path = ctx.artifacts + "/corpus_sample.jsonl";
    write_jsonl(jsonl_path, pairs);

    const std::vector<std::string> label_set = collect_labels(pairs);
    const Vocabulary vocab = Vocabulary::from_tokens(collect_tokens(pairs));
    const DatasetSplit split = load_dataset(jsonl_path, label_set, vocab, 64, false, "sample");

    std::vector<TokenizedPair> sub(split.pairs.begin(), split.pairs.begin() + 1000);
    const std::vector<TokenizedPair> train(sub.begin(), sub.begin() + 900);
    const std::vector<TokenizedPair> valid(sub.begin() + 900, sub.end());

    ModelConfig cfg;
    cfg.vocab_size = vocab.size();
    cfg.dim = 16;
    cfg.layers = 1;
    cfg.attn = 16;
    cfg.classes = label_set.size();
    cfg.steps = 2;
    cfg.window = real(4);
    Model model = build_model(cfg);
    model.init(1);
    TrainOptions opt;
    opt.lr = real(1e-3);
    opt.batch_size = 32;
    opt.max_epochs = 1;
    opt.patience = 1;
    train_model(model, train, valid, opt);
    const real acc = evaluate_model(model, valid).accuracy;

    std::printf("criterion 8 PASS  1000-pair corpus-format subsample converted, loaded and "
                "trained end to end (1 epoch, holdout accuracy %.3f — smoke only)\n",
                static_cast<double>(acc));
    return true;
  } catch (const std::exception& e) {
    std::printf("criterion 8 FAIL  ingestion smoke raised: %s\n", e.what());
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance gate"};
  std::string only;
  Context ctx;
  bool with_control = false;
  app.add_option("--only", only, "comma-separated criterion numbers (default: all)");
  app.add_option("--artifacts", ctx.artifacts, "directory for logs, CSVs and checkpoints");
  app.add_flag("--with-control", with_control,
               "also run the logged bag-overlap control comparison (criterion 5 section)");
  CLI11_PARSE(app, argc, argv);

  std::vector<int> selected;
  if (only.empty()) {
    selected = {1, 2, 3, 4, 5, 6, 7, 8};
  } else {
    std::stringstream ss(only);
    std::string tok;
    while (std::getline(ss, tok, ',')) selected.push_back(std::stoi(tok));
  }
  std::filesystem::create_directories(ctx.artifacts);

  bool all_ok = true;
  for (int c : selected) {
    bool ok = false;
    switch (c) {
      case 1: ok = criterion_gradients(); break;
      case 2: ok = criterion_formulas(); break;
      case 3: ok = criterion_invariants(); break;
      case 4: ok = criterion_degeneracies(); break;
      case 5:
        ok = criterion_convergence(ctx);
        if (with_control) control_comparison(ctx);
        break;
      case 6: ok = criterion_sweep(ctx); break;
      case 7: ok = criterion_determinism(ctx); break;
      case 8: ok = criterion_ingestion(ctx); break;
      default:
        std::printf("unknown criterion %d\n", c);
        return 2;
    }
    all_ok = all_ok && ok;
    std::fflush(stdout);
  }
  std::printf("acceptance: %s\n", all_ok ? "ALL SELECTED CRITERIA PASS" : "FAILURES PRESENT");
  return all_ok ? 0 : 1;
}
