// Command-line front end: train/eval/sweep the sentence-pair matcher, plus
// synthetic data generation, TSV conversion and attention-trace dumps.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dga/checkpoint.hpp"
#include "dga/dataset.hpp"
#include "dga/embeddings.hpp"
#include "dga/errors.hpp"
#include "dga/run_config.hpp"
#include "dga/synthetic.hpp"
#include "dga/trainer.hpp"

using namespace dga;
using nlohmann::ordered_json;

namespace {

void add_model_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--window-size", cfg.window, "Gaussian window size D (sigma = D/2)");
  cmd->add_option("--attention-length", cfg.steps, "dynamic attention steps T");
  cmd->add_option("--attention-size", cfg.attn, "attention hidden size a");
  cmd->add_option("--hidden", cfg.dim, "hidden/state size d");
  cmd->add_option("--layers", cfg.layers, "encoder layer count L");
  cmd->add_option("--max-len", cfg.max_len, "maximum tokens per pair, boundaries included");
  cmd->add_flag("--no-global", cfg.no_global, "drop the global vector from the match vector");
  cmd->add_flag("--no-detail", cfg.no_detail, "drop the pooled detail vector from the match vector");
  cmd->add_flag("--no-gaussian", cfg.no_gaussian, "disable the Gaussian mask (plain dynamic attention)");
  cmd->add_flag("--mean-pool-position", cfg.mean_pool_position,
                "mean instead of sum over tokens in the position mix");
  cmd->add_flag("--log-mask", cfg.log_mask, "add log g to scores instead of multiplying by g");
  cmd->add_flag("--single-cls", cfg.single_cls, "conventional boundary layout (trailing separator)");
}

void add_train_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--learning-rate", cfg.lr, "Adam learning rate");
  cmd->add_option("--beta1", cfg.beta1, "Adam beta1");
  cmd->add_option("--beta2", cfg.beta2, "Adam beta2");
  cmd->add_option("--weight-decay", cfg.weight_decay, "L2 penalty coefficient");
  cmd->add_flag("--l2-norm-exact", cfg.l2_norm_exact, "penalize unsquared per-tensor norms");
  cmd->add_option("--batch-size", cfg.batch_size, "minibatch size");
  cmd->add_option("--max-epochs", cfg.max_epochs, "epoch cap");
  cmd->add_option("--patience", cfg.patience, "non-improving epochs tolerated past the best");
  cmd->add_option("--seed", cfg.seed, "run seed");
}

void add_data_flags(CLI::App* cmd, RunConfig& cfg, bool need_train) {
  cmd->add_option("--train", cfg.train_path, "training JSONL")->required(need_train);
  cmd->add_option("--valid", cfg.valid_path, "validation JSONL")->required(need_train);
  cmd->add_option("--test", cfg.test_path, "test JSONL");
  cmd->add_option("--labels", cfg.labels_path, "ordered label list, one per line")->required();
  cmd->add_option("--vocab", cfg.vocab_path, "vocabulary file")->required();
}

// --config is applied before the normal flag pass so explicit flags win.
void preload_config(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "key=value config file; flags override it");
  cmd->preparse_callback([&cfg, &config_path](std::size_t) {
    if (!config_path.empty()) apply_config_file(config_path, cfg);
  });
}

ordered_json config_echo(const RunConfig& cfg) {
  return ordered_json{{"window_size", cfg.window},
                      {"attention_length", cfg.steps},
                      {"attention_size", cfg.attn},
                      {"hidden", cfg.dim},
                      {"layers", cfg.layers},
                      {"max_len", cfg.max_len},
                      {"learning_rate", cfg.lr},
                      {"beta1", cfg.beta1},
                      {"beta2", cfg.beta2},
                      {"weight_decay", cfg.weight_decay},
                      {"l2_norm_exact", cfg.l2_norm_exact},
                      {"batch_size", cfg.batch_size},
                      {"max_epochs", cfg.max_epochs},
                      {"patience", cfg.patience},
                      {"seed", cfg.seed},
                      {"no_global", cfg.no_global},
                      {"no_detail", cfg.no_detail},
                      {"no_gaussian", cfg.no_gaussian},
                      {"mean_pool_position", cfg.mean_pool_position},
                      {"log_mask", cfg.log_mask},
                      {"single_cls", cfg.single_cls},
                      {"train", cfg.train_path},
                      {"valid", cfg.valid_path},
                      {"test", cfg.test_path},
                      {"labels", cfg.labels_path},
                      {"vocab", cfg.vocab_path}};
}

void write_report(const std::string& path, const RunConfig& cfg, const TrainReport& rep,
                  double test_acc, bool have_test) {
  ordered_json j;
  j["config"] = config_echo(cfg);
  j["seed"] = cfg.seed;
  j["train_loss"] = rep.train_loss;
  j["valid_acc"] = rep.valid_acc;
  j["best_epoch"] = rep.best_epoch;
  j["best_valid_acc"] = rep.best_valid_acc;
  j["epochs_run"] = rep.epochs_run;
  j["test_acc"] = have_test ? ordered_json(test_acc) : ordered_json(nullptr);
  j["wall_seconds"] = rep.wall_seconds;
  j["clamp_warnings"] = rep.clamp_warnings;
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write report: " + path);
  out << j.dump(2) << '\n';
}

void dump_trace_file(const Model& model, const std::vector<TokenizedPair>& pairs,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write trace: " + path);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const ForwardTrace t = model_forward(model, pairs[i]);
    for (std::size_t s = 0; s < t.dga.steps.size(); ++s) {
      const DgaStep& step = t.dga.steps[s];
      ordered_json rec{{"pair", i}, {"step", s + 1}, {"p", step.p}, {"weights", step.weights},
                       {"g", step.g}};
      out << rec.dump() << '\n';
    }
  }
}

struct LoadedData {
  Vocabulary vocab;
  std::vector<std::string> labels;
  DatasetSplit train, valid, test;
  bool have_train = false, have_test = false;
};

LoadedData load_data(const RunConfig& cfg, bool need_train) {
  LoadedData d;
  d.vocab = Vocabulary::load(cfg.vocab_path);
  d.labels = load_labels(cfg.labels_path);
  if (need_train) {
    d.train = load_dataset(cfg.train_path, d.labels, d.vocab, cfg.max_len, cfg.single_cls, "train");
    d.valid = load_dataset(cfg.valid_path, d.labels, d.vocab, cfg.max_len, cfg.single_cls, "valid");
    d.have_train = true;
  }
  if (!cfg.test_path.empty()) {
    d.test = load_dataset(cfg.test_path, d.labels, d.vocab, cfg.max_len, cfg.single_cls, "test");
    d.have_test = true;
  }
  return d;
}

int cmd_train(RunConfig& cfg, const std::string& trace_path) {
  validate(cfg);
  LoadedData data = load_data(cfg, true);

  Model model = build_model(to_model_config(cfg, data.vocab.size(), data.labels.size()));
  model.init(cfg.seed);
  if (!cfg.checkpoint_in.empty()) load_checkpoint(cfg.checkpoint_in, model.params);

  TrainOptions opt = to_train_options(cfg);
  opt.verbose = true;
  const TrainReport rep = train_model(model, data.train.pairs, data.valid.pairs, opt);

  double test_acc = 0;
  if (data.have_test) test_acc = evaluate_model(model, data.test.pairs).accuracy;

  if (!cfg.checkpoint_out.empty()) save_checkpoint(cfg.checkpoint_out, model.params);
  if (!cfg.report_path.empty()) write_report(cfg.report_path, cfg, rep, test_acc, data.have_test);
  if (!trace_path.empty()) dump_trace_file(model, data.valid.pairs, trace_path);

  std::printf("epochs %zu  best_epoch %zu  best_valid_acc %.4f", rep.epochs_run, rep.best_epoch,
              static_cast<double>(rep.best_valid_acc));
  if (data.have_test) std::printf("  test_acc %.4f", test_acc);
  std::printf("  wall %.1fs\n", rep.wall_seconds);
  if (rep.clamp_warnings > 0)
    std::fprintf(stderr, "warning: %zu clamped log-probabilities\n", rep.clamp_warnings);
  return 0;
}

int cmd_eval(RunConfig& cfg, const std::string& data_path, const std::string& trace_path) {
  validate(cfg);
  const Vocabulary vocab = Vocabulary::load(cfg.vocab_path);
  const auto labels = load_labels(cfg.labels_path);
  const DatasetSplit split =
      load_dataset(data_path, labels, vocab, cfg.max_len, cfg.single_cls, "eval");

  Model model = build_model(to_model_config(cfg, vocab.size(), labels.size()));
  model.init(cfg.seed);
  load_checkpoint(cfg.checkpoint_in, model.params);

  const EvalResult r = evaluate_model(model, split.pairs);
  std::printf("accuracy %.6f on %zu pairs\n", static_cast<double>(r.accuracy),
              split.pairs.size());
  std::printf("confusion (rows true, cols predicted):\n");
  for (std::size_t i = 0; i < r.confusion.rows; ++i) {
    std::printf("  %-10s", labels[i].c_str());
    for (std::size_t j = 0; j < r.confusion.cols; ++j)
      std::printf(" %6.0f", static_cast<double>(r.confusion.at(i, j)));
    std::printf("\n");
  }
  if (!cfg.report_path.empty()) {
    ordered_json j;
    j["accuracy"] = r.accuracy;
    j["pairs"] = split.pairs.size();
    std::vector<std::vector<double>> conf(r.confusion.rows,
                                          std::vector<double>(r.confusion.cols));
    for (std::size_t i = 0; i < r.confusion.rows; ++i)
      for (std::size_t k = 0; k < r.confusion.cols; ++k) conf[i][k] = r.confusion.at(i, k);
    j["confusion"] = conf;
    j["labels"] = labels;
    std::ofstream out(cfg.report_path);
    if (!out) throw FormatError("cannot write report: " + cfg.report_path);
    out << j.dump(2) << '\n';
  }
  if (!trace_path.empty()) dump_trace_file(model, split.pairs, trace_path);
  return 0;
}

int cmd_sweep(RunConfig& cfg, std::vector<double>& windows, std::vector<std::size_t>& steps,
              std::size_t seeds, const std::string& out_path) {
  validate(cfg);
  LoadedData data = load_data(cfg, true);
  if (!data.have_test) throw FormatError("sweep needs --test for per-point test accuracy");

  SweepPlan plan;
  plan.windows.assign(windows.begin(), windows.end());
  plan.steps = steps;
  plan.seeds = seeds;

  const ModelConfig base = to_model_config(cfg, data.vocab.size(), data.labels.size());
  const std::vector<SweepRow> rows = run_sweep(base, to_train_options(cfg), plan,
                                               data.train.pairs, data.valid.pairs,
                                               data.test.pairs);
  write_sweep_csv(out_path, rows);
  std::size_t ok = 0;
  for (const SweepRow& r : rows) ok += r.status == "ok";
  std::printf("sweep: %zu rows (%zu ok) -> %s\n", rows.size(), ok, out_path.c_str());
  return 0;
}

int cmd_gen_synth(const SyntheticSpec& spec, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const SyntheticData data = generate_synthetic(spec);
  write_synthetic(data, out_dir);
  std::printf("%s: train %zu  valid %zu  test %zu -> %s\n", spec.task.c_str(), data.train.size(),
              data.valid.size(), data.test.size(), out_dir.c_str());
  return 0;
}

int cmd_convert(const std::string& in_path, const std::string& out_path,
                const std::string& labels_out, const std::string& vocab_out) {
  const std::vector<LabeledPair> pairs = read_tsv_pairs(in_path);
  write_jsonl(out_path, pairs);
  if (!labels_out.empty()) save_labels(labels_out, collect_labels(pairs));
  if (!vocab_out.empty()) Vocabulary::from_tokens(collect_tokens(pairs)).save(vocab_out);
  std::printf("converted %zu pairs -> %s\n", pairs.size(), out_path.c_str());
  return 0;
}

int cmd_dump_trace(RunConfig& cfg, const std::string& data_path, const std::string& out_path,
                   std::size_t limit) {
  validate(cfg);
  if (!cfg.embeddings_path.empty()) {
    const Matrix vectors = load_embeddings(cfg.embeddings_path);
    ModelConfig mc = to_model_config(cfg, /*vocab_size=*/0, /*classes=*/2);
    mc.external_dim = vectors.cols;
    Model model = build_model(mc);
    model.init(cfg.seed);
    if (!cfg.checkpoint_in.empty()) load_checkpoint(cfg.checkpoint_in, model.params);

    std::ofstream out(out_path);
    if (!out) throw FormatError("cannot write trace: " + out_path);
    const ForwardTrace t = model_forward_vectors(model, vectors);
    for (std::size_t s = 0; s < t.dga.steps.size(); ++s) {
      const DgaStep& step = t.dga.steps[s];
      ordered_json rec{{"pair", 0}, {"step", s + 1}, {"p", step.p}, {"weights", step.weights},
                       {"g", step.g}};
      out << rec.dump() << '\n';
    }
    std::printf("trace: 1 sequence x %zu steps -> %s\n", t.dga.steps.size(), out_path.c_str());
    return 0;
  }

  const Vocabulary vocab = Vocabulary::load(cfg.vocab_path);
  const auto labels = load_labels(cfg.labels_path);
  DatasetSplit split = load_dataset(data_path, labels, vocab, cfg.max_len, cfg.single_cls, "trace");
  if (limit > 0 && split.pairs.size() > limit) split.pairs.resize(limit);

  Model model = build_model(to_model_config(cfg, vocab.size(), labels.size()));
  model.init(cfg.seed);
  if (!cfg.checkpoint_in.empty()) load_checkpoint(cfg.checkpoint_in, model.params);
  dump_trace_file(model, split.pairs, out_path);
  std::printf("trace: %zu pairs -> %s\n", split.pairs.size(), out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic Gaussian attention sentence-pair matcher"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path, trace_path, data_path, out_path;
  std::string conv_in, conv_out, conv_labels, conv_vocab;
  std::vector<double> sweep_windows{1, 2, 3, 4, 5, 6};
  std::vector<std::size_t> sweep_steps{1, 2, 3, 4, 5, 6, 7, 8};
  std::size_t sweep_seeds = 1, trace_limit = 0;
  SyntheticSpec synth;
  std::string synth_dir = "synth";

  CLI::App* train = app.add_subcommand("train", "train a model");
  preload_config(train, cfg, config_path);
  add_data_flags(train, cfg, true);
  add_model_flags(train, cfg);
  add_train_flags(train, cfg);
  train->add_option("--checkpoint-in", cfg.checkpoint_in, "warm-start checkpoint");
  train->add_option("--checkpoint-out", cfg.checkpoint_out, "where to save the best model");
  train->add_option("--report", cfg.report_path, "write a JSON run report here");
  train->add_option("--dump-trace", trace_path, "attention trace JSONL for the validation set");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  preload_config(eval, cfg, config_path);
  eval->add_option("--checkpoint", cfg.checkpoint_in, "model checkpoint")->required();
  eval->add_option("--data", data_path, "JSONL to evaluate")->required();
  eval->add_option("--labels", cfg.labels_path, "ordered label list")->required();
  eval->add_option("--vocab", cfg.vocab_path, "vocabulary file")->required();
  add_model_flags(eval, cfg);
  eval->add_option("--seed", cfg.seed, "init seed for parameters the checkpoint leaves out");
  eval->add_option("--report", cfg.report_path, "write a JSON eval report here");
  eval->add_option("--dump-trace", trace_path, "attention trace JSONL for the evaluated pairs");

  CLI::App* sweep = app.add_subcommand("sweep", "window-size / attention-length grid");
  preload_config(sweep, cfg, config_path);
  add_data_flags(sweep, cfg, true);
  add_model_flags(sweep, cfg);
  add_train_flags(sweep, cfg);
  sweep->add_option("--window-values", sweep_windows, "window sizes to sweep")->delimiter(',');
  sweep->add_option("--step-values", sweep_steps, "attention lengths to sweep")->delimiter(',');
  sweep->add_option("--sweep-seeds", sweep_seeds, "independent seeds per grid point");
  sweep->add_option("--out", out_path, "CSV output path")->required();

  CLI::App* gen = app.add_subcommand("gen-synth", "generate a synthetic task");
  gen->add_option("--task", synth.task, "shared-window or keyword-overlap")->required();
  gen->add_option("--train-n", synth.train_n, "training pairs");
  gen->add_option("--valid-n", synth.valid_n, "validation pairs");
  gen->add_option("--test-n", synth.test_n, "test pairs");
  gen->add_option("--seed", synth.seed, "generation seed");
  gen->add_option("--out-dir", synth_dir, "output directory");

  CLI::App* convert = app.add_subcommand("convert", "TSV pairs -> JSONL records");
  convert->add_option("--in", conv_in, "sentence_a<TAB>sentence_b<TAB>label")->required();
  convert->add_option("--out", conv_out, "JSONL output")->required();
  convert->add_option("--labels-out", conv_labels, "also write the label set");
  convert->add_option("--vocab-out", conv_vocab, "also write a vocabulary");

  CLI::App* trace = app.add_subcommand("dump-trace", "per-step attention trace");
  preload_config(trace, cfg, config_path);
  trace->add_option("--data", data_path, "JSONL input pairs");
  trace->add_option("--labels", cfg.labels_path, "ordered label list");
  trace->add_option("--vocab", cfg.vocab_path, "vocabulary file");
  trace->add_option("--embeddings-file", cfg.embeddings_path,
                    "per-token vector file for one sequence (bypasses --data/--vocab)");
  trace->add_option("--checkpoint", cfg.checkpoint_in, "model checkpoint (random init if absent)");
  add_model_flags(trace, cfg);
  trace->add_option("--seed", cfg.seed, "init seed when no checkpoint is given");
  trace->add_option("--limit", trace_limit, "trace at most this many pairs (0 = all)");
  trace->add_option("--out", out_path, "trace JSONL output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const FormatError& e) {  // config file problems surface in preparse
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*train) return cmd_train(cfg, trace_path);
    if (*eval) return cmd_eval(cfg, data_path, trace_path);
    if (*sweep) return cmd_sweep(cfg, sweep_windows, sweep_steps, sweep_seeds, out_path);
    if (*gen) return cmd_gen_synth(synth, synth_dir);
    if (*convert) return cmd_convert(conv_in, conv_out, conv_labels, conv_vocab);
    if (*trace) {
      if (cfg.embeddings_path.empty() && (data_path.empty() || cfg.vocab_path.empty() ||
                                          cfg.labels_path.empty()))
        throw FormatError("dump-trace needs --data/--labels/--vocab or --embeddings-file");
      return cmd_dump_trace(cfg, data_path, out_path, trace_limit);
    }
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return 3;
  } catch (const CheckpointError& e) {
    std::cerr << "checkpoint: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
