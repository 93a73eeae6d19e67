#include "dga/trainer.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dga/adam.hpp"
#include "dga/classifier.hpp"
#include "dga/errors.hpp"
#include "dga/rng.hpp"

namespace dga {

namespace {

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng = SplitMix64(seed).split("shuffle").split(epoch);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.next_below(i)]);
  return order;
}

std::vector<Matrix> snapshot_values(const ModelParams& params) {
  std::vector<Matrix> snap(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) snap[i] = params[i].value;
  return snap;
}

void restore_values(ModelParams& params, const std::vector<Matrix>& snap) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i].value = snap[i];
}

}  // namespace

TrainReport train_model(Model& model, const std::vector<TokenizedPair>& train,
                        const std::vector<TokenizedPair>& valid, const TrainOptions& opt) {
  if (train.empty()) throw FormatError("training split is empty");
  if (valid.empty()) throw FormatError("validation split is empty");
  if (opt.batch_size == 0 || opt.max_epochs == 0) throw FormatError("batch size and epochs must be >= 1");

  const double t0 = omp_get_wtime();
  reset_clamp_warnings();

  AdamState adam = AdamState::create(model.params, opt.lr);
  adam.beta1 = opt.beta1;
  adam.beta2 = opt.beta2;

  const std::size_t n = train.size();
  const std::size_t bs = std::min(opt.batch_size, n);
  std::vector<GradStore> slots(bs);
  for (GradStore& s : slots) s = make_grad_store(model.params);
  std::vector<real> losses(bs);

  TrainReport report;
  std::vector<Matrix> best_values = snapshot_values(model.params);
  report.best_valid_acc = real(-1);

  for (std::size_t epoch = 0; epoch < opt.max_epochs; ++epoch) {
    const std::vector<std::size_t> order = epoch_order(n, opt.seed, epoch);
    real epoch_obj = 0;

    for (std::size_t base = 0, step = 0; base < n; base += bs, ++step) {
      const std::size_t b = std::min(bs, n - base);

#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < b; ++i) {
        zero_grad_store(slots[i]);
        losses[i] = example_loss_and_grad(model, train[order[base + i]], slots[i]);
      }

      real ce = 0;
      for (std::size_t i = 0; i < b; ++i) ce += losses[i];
      ce /= static_cast<real>(b);
      const real penalty = l2_penalty(model.params, opt.weight_decay, opt.exact_norm);
      const real batch_obj = ce + penalty;
      if (!std::isfinite(batch_obj))
        throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) + " step " +
                              std::to_string(step));

      for (std::size_t i = 0; i < b; ++i) accumulate_grads(model.params, slots[i]);
      for (std::size_t p = 0; p < model.params.size(); ++p)
        scale_inplace(model.params.grad(p), real(1) / static_cast<real>(b));
      l2_penalty_grad(model.params, opt.weight_decay, opt.exact_norm);
      try {
        adam_step(model.params, adam);
      } catch (const DivergenceError& e) {
        throw DivergenceError(std::string(e.what()) + " at epoch " + std::to_string(epoch) +
                              " step " + std::to_string(step));
      }

      epoch_obj += batch_obj * static_cast<real>(b);
    }

    report.train_loss.push_back(epoch_obj / static_cast<real>(n));
    const real acc = evaluate_model(model, valid).accuracy;
    report.valid_acc.push_back(acc);
    report.epochs_run = epoch + 1;
    if (opt.verbose)
      std::fprintf(stderr, "epoch %zu  loss %.6f  valid_acc %.4f\n", epoch,
                   static_cast<double>(report.train_loss.back()), static_cast<double>(acc));

    if (acc > report.best_valid_acc) {
      report.best_valid_acc = acc;
      report.best_epoch = epoch;
      best_values = snapshot_values(model.params);
    } else if (epoch - report.best_epoch > opt.patience) {
      break;
    }
  }

  restore_values(model.params, best_values);
  report.wall_seconds = omp_get_wtime() - t0;
  report.clamp_warnings = clamp_warning_count();
  return report;
}

EvalResult evaluate_model(const Model& model, const std::vector<TokenizedPair>& split) {
  if (split.empty()) throw FormatError("evaluation split is empty");
  const std::size_t c = model.cfg.classes;
  EvalResult result;
  result.confusion = Matrix(c, c);
  std::size_t correct = 0;

#pragma omp parallel
  {
    Matrix local(c, c);
    std::size_t local_correct = 0;
#pragma omp for schedule(static) nowait
    for (std::size_t i = 0; i < split.size(); ++i) {
      const Vec probs = predict_probs(model, split[i]);
      std::size_t pred = 0;
      for (std::size_t k = 1; k < probs.size(); ++k)
        if (probs[k] > probs[pred]) pred = k;
      local.at(static_cast<std::size_t>(split[i].label), pred) += real(1);
      if (pred == static_cast<std::size_t>(split[i].label)) ++local_correct;
    }
#pragma omp critical
    {
      add_inplace(result.confusion, local);
      correct += local_correct;
    }
  }

  result.accuracy = static_cast<real>(correct) / static_cast<real>(split.size());
  return result;
}

std::vector<SweepRow> run_sweep(const ModelConfig& base_cfg, const TrainOptions& base_opt,
                                const SweepPlan& plan, const std::vector<TokenizedPair>& train,
                                const std::vector<TokenizedPair>& valid,
                                const std::vector<TokenizedPair>& test) {
  if (plan.windows.empty() || plan.steps.empty() || plan.seeds == 0)
    throw FormatError("sweep grid is empty");

  std::vector<SweepRow> rows(plan.windows.size() * plan.steps.size() * plan.seeds);
  const std::ptrdiff_t total = static_cast<std::ptrdiff_t>(rows.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < total; ++k) {
    const std::size_t ti = (static_cast<std::size_t>(k) / plan.seeds) % plan.steps.size();
    const std::size_t wi = static_cast<std::size_t>(k) / (plan.seeds * plan.steps.size());

    SweepRow& row = rows[static_cast<std::size_t>(k)];
    row.window = plan.windows[wi];
    row.steps = plan.steps[ti];
    row.seed = base_opt.seed + 1000 * static_cast<std::uint64_t>(k);

    try {
      ModelConfig cfg = base_cfg;
      cfg.window = row.window;
      cfg.steps = row.steps;
      Model model = build_model(cfg);
      model.init(row.seed);
      TrainOptions opt = base_opt;
      opt.seed = row.seed;
      opt.verbose = false;
      train_model(model, train, valid, opt);
      row.valid_acc = evaluate_model(model, valid).accuracy;
      row.test_acc = evaluate_model(model, test).accuracy;
      row.status = "ok";
    } catch (const std::exception& e) {
      row.valid_acc = std::nan("");
      row.test_acc = std::nan("");
      std::string note = e.what();
      for (char& ch : note)
        if (ch == ',' || ch == '\n') ch = ';';
      row.status = "failed: " + note;
    }
  }
  return rows;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write sweep csv: " + path);
  out << "D,T,seed,valid_acc,test_acc,status\n";
  char buf[64];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%g,%zu,%llu,", static_cast<double>(r.window), r.steps,
                  static_cast<unsigned long long>(r.seed));
    out << buf;
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,", static_cast<double>(r.valid_acc),
                  static_cast<double>(r.test_acc));
    out << buf << r.status << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open sweep csv: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "D,T,seed,valid_acc,test_acc,status")
    throw FormatError("bad sweep csv header in " + path);
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    SweepRow r;
    auto next = [&](const char* what) {
      if (!std::getline(ss, field, ','))
        throw FormatError(std::string("sweep csv missing field ") + what + ": " + line);
      return field;
    };
    r.window = static_cast<real>(std::stod(next("D")));
    r.steps = static_cast<std::size_t>(std::stoul(next("T")));
    r.seed = std::stoull(next("seed"));
    r.valid_acc = static_cast<real>(std::stod(next("valid_acc")));
    r.test_acc = static_cast<real>(std::stod(next("test_acc")));
    std::getline(ss, r.status);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace dga
