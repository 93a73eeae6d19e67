#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dga/model.hpp"

namespace dga {

struct TrainOptions {
  real lr = real(1e-4);
  real beta1 = real(0.9);
  real beta2 = real(0.999);
  real weight_decay = real(1e-5);  // epsilon in the objective
  bool exact_norm = false;         // unsquared per-tensor norms in the penalty
  std::size_t batch_size = 32;
  std::size_t max_epochs = 30;
  std::size_t patience = 3;  // extra epochs tolerated past the best one
  std::uint64_t seed = 42;
  bool verbose = false;  // per-epoch lines on stderr
};

struct TrainReport {
  std::vector<real> train_loss;  // mean per-example objective, one per epoch
  std::vector<real> valid_acc;
  std::size_t best_epoch = 0;
  real best_valid_acc = 0;
  std::size_t epochs_run = 0;
  double wall_seconds = 0;
  std::size_t clamp_warnings = 0;
};

// Minibatch Adam on mean cross-entropy plus the weight penalty. Examples in
// a batch are processed in parallel into per-example gradient slots and
// reduced in index order, so the result is bit-identical at any thread
// count. The epoch-k shuffle is derived from (seed, k) alone. On return the
// model holds the parameters of the best validation epoch. Non-finite loss
// or gradients abort with a DivergenceError naming epoch and step.
TrainReport train_model(Model& model, const std::vector<TokenizedPair>& train,
                        const std::vector<TokenizedPair>& valid, const TrainOptions& opt);

struct EvalResult {
  real accuracy = 0;
  Matrix confusion;  // rows: true class, cols: argmax prediction
};

// Argmax prediction per pair, ties broken toward the lower class index.
// Empty splits are an error, not accuracy zero.
EvalResult evaluate_model(const Model& model, const std::vector<TokenizedPair>& split);

struct SweepRow {
  real window = 0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  real valid_acc = 0;
  real test_acc = 0;
  std::string status;  // "ok" or a failure note; failures do not stop the sweep
};

struct SweepPlan {
  std::vector<real> windows;      // default 1..6
  std::vector<std::size_t> steps;  // default 1..8
  std::size_t seeds = 1;           // runs per grid point
};

// Trains one fresh model per (window, steps, seed) point; grid points may
// run concurrently, each with its own model. Rows come back row-major:
// window outer, steps inner, seed innermost.
std::vector<SweepRow> run_sweep(const ModelConfig& base_cfg, const TrainOptions& base_opt,
                                const SweepPlan& plan, const std::vector<TokenizedPair>& train,
                                const std::vector<TokenizedPair>& valid,
                                const std::vector<TokenizedPair>& test);

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::string& path);

}  // namespace dga
