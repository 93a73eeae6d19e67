#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "dga/checkpoint.hpp"
#include "dga/dataset.hpp"
#include "dga/errors.hpp"
#include "dga/model.hpp"
#include "dga/synthetic.hpp"
#include "dga/tokenizer.hpp"
#include "dga/trainer.hpp"
#include "dga/vocab.hpp"

using namespace dga;

namespace {

struct TempDir {
  std::string path;
  explicit TempDir(const std::string& name) : path(name) {
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::vector<TokenizedPair> tokenize_all(const std::vector<LabeledPair>& pairs,
                                        const Vocabulary& vocab) {
  std::vector<TokenizedPair> out;
  out.reserve(pairs.size());
  for (const LabeledPair& p : pairs) {
    TokenizedPair t = tokenize_pair(p.sentence_a, p.sentence_b, vocab, 32);
    t.label = p.label == "1" ? 1 : 0;
    out.push_back(std::move(t));
  }
  return out;
}

// Small tokenized train/valid slice of the window task, shared across the
// training-behavior tests.
struct TinyTask {
  SyntheticData data;
  Vocabulary vocab;
  std::vector<TokenizedPair> train, valid;
  ModelConfig cfg;

  TinyTask() {
    SyntheticSpec spec;
    spec.task = "shared-window";
    spec.train_n = 64;
    spec.valid_n = 20;
    spec.test_n = 20;
    spec.seed = 9;
    data = generate_synthetic(spec);
    vocab = Vocabulary::from_tokens(data.vocab_words);
    train = tokenize_all(data.train, vocab);
    valid = tokenize_all(data.valid, vocab);
    cfg.vocab_size = vocab.size();
    cfg.dim = 8;
    cfg.layers = 1;
    cfg.attn = 8;
    cfg.classes = 2;
    cfg.steps = 2;
    cfg.window = real(4);
  }
};

const TinyTask& tiny_task() {
  static const TinyTask t;
  return t;
}

int count_label(const std::vector<LabeledPair>& pairs, const std::string& label) {
  return static_cast<int>(std::count_if(pairs.begin(), pairs.end(),
                                        [&](const LabeledPair& p) { return p.label == label; }));
}

std::set<std::string> words_with_prefix(const std::string& sentence, const std::string& prefix) {
  std::set<std::string> out;
  for (const std::string& w : whitespace_tokens(sentence))
    if (w.rfind(prefix, 0) == 0) out.insert(w);
  return out;
}

}  // namespace

TEST_CASE("window task splits are balanced, disjoint and agree with the audit rule") {
  SyntheticSpec spec;
  spec.task = "shared-window";
  spec.train_n = 400;
  spec.valid_n = 100;
  spec.test_n = 100;
  spec.seed = 5;
  SyntheticData data = generate_synthetic(spec);

  REQUIRE(data.train.size() == 400);
  REQUIRE(data.valid.size() == 100);
  REQUIRE(data.test.size() == 100);
  CHECK(data.labels == std::vector<std::string>{"0", "1"});
  CHECK(data.vocab_words.size() == 18);

  std::set<std::string> keys;
  for (const auto* split : {&data.train, &data.valid, &data.test}) {
    const int ones = count_label(*split, "1");
    const int zeros = count_label(*split, "0");
    CHECK(std::abs(ones - zeros) <= 1);
    for (const LabeledPair& p : *split) {
      CHECK(keys.insert(p.sentence_a + "|" + p.sentence_b).second);
      const int want = shared_window_label(whitespace_tokens(p.sentence_a),
                                           whitespace_tokens(p.sentence_b));
      CHECK(std::to_string(want) == p.label);
    }
  }
}

TEST_CASE("window task sentences carry one trigger and one modifier each") {
  SyntheticSpec spec;
  spec.task = "shared-window";
  spec.train_n = 200;
  spec.valid_n = 10;
  spec.test_n = 10;
  spec.seed = 17;
  SyntheticData data = generate_synthetic(spec);

  int vocab_contrast = 0, placement_contrast = 0, negatives = 0;
  for (const LabeledPair& p : data.train) {
    for (const std::string* s : {&p.sentence_a, &p.sentence_b}) {
      const auto toks = whitespace_tokens(*s);
      CHECK(toks.size() >= 6);
      CHECK(toks.size() <= 7);
      int trig = 0, mod = 0;
      for (const std::string& w : toks) {
        trig += w.rfind("trig", 0) == 0;
        mod += w.rfind("mod", 0) == 0;
      }
      CHECK(trig == 1);
      CHECK(mod == 1);
    }
    CHECK(words_with_prefix(p.sentence_a, "trig") == words_with_prefix(p.sentence_b, "trig"));
    if (p.label == "0") {
      ++negatives;
      if (words_with_prefix(p.sentence_a, "mod") == words_with_prefix(p.sentence_b, "mod"))
        ++placement_contrast;
      else
        ++vocab_contrast;
    }
  }
  // Negatives mix the two contrast kinds; both must show up in force or the
  // task collapses into a pure vocabulary or pure placement check.
  CHECK(negatives == 100);
  CHECK(vocab_contrast >= 15);
  CHECK(placement_contrast >= 40);
}

TEST_CASE("synthetic generation is reproducible and seed-sensitive") {
  SyntheticSpec spec;
  spec.task = "shared-window";
  spec.train_n = 50;
  spec.valid_n = 10;
  spec.test_n = 10;
  spec.seed = 33;
  SyntheticData a = generate_synthetic(spec);
  SyntheticData b = generate_synthetic(spec);
  REQUIRE(a.train.size() == b.train.size());
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    CHECK(a.train[i].sentence_a == b.train[i].sentence_a);
    CHECK(a.train[i].sentence_b == b.train[i].sentence_b);
    CHECK(a.train[i].label == b.train[i].label);
  }

  spec.seed = 34;
  SyntheticData c = generate_synthetic(spec);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.train.size(); ++i)
    any_diff = any_diff || a.train[i].sentence_a != c.train[i].sentence_a;
  CHECK(any_diff);
}

TEST_CASE("synthetic generator rejects unknown tasks and empty splits") {
  SyntheticSpec spec;
  spec.task = "word-salad";
  CHECK_THROWS_AS(generate_synthetic(spec), FormatError);
  spec.task = "shared-window";
  spec.valid_n = 0;
  CHECK_THROWS_AS(generate_synthetic(spec), FormatError);
}

TEST_CASE("overlap control pairs share four words for label one and one for label zero") {
  SyntheticSpec spec;
  spec.task = "keyword-overlap";
  spec.train_n = 100;
  spec.valid_n = 10;
  spec.test_n = 10;
  spec.seed = 3;
  SyntheticData data = generate_synthetic(spec);
  CHECK(data.vocab_words.size() == 30);
  for (const LabeledPair& p : data.train) {
    const auto ta = whitespace_tokens(p.sentence_a);
    const auto tb = whitespace_tokens(p.sentence_b);
    const std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
    REQUIRE(sa.size() == 6);
    REQUIRE(sb.size() == 6);
    std::size_t shared = 0;
    for (const std::string& w : sa) shared += sb.count(w);
    CHECK(shared == (p.label == "1" ? 4 : 1));
  }
}

TEST_CASE("written synthetic files load back through the dataset path") {
  TempDir dir("synth_rt_dir");
  SyntheticSpec spec;
  spec.task = "shared-window";
  spec.train_n = 30;
  spec.valid_n = 10;
  spec.test_n = 10;
  spec.seed = 8;
  SyntheticData data = generate_synthetic(spec);
  write_synthetic(data, dir.path);

  const Vocabulary vocab = Vocabulary::load(dir.path + "/vocab.txt");
  CHECK(vocab.size() == 22);  // 18 task words + 4 reserved
  const auto labels = load_labels(dir.path + "/labels.txt");
  REQUIRE(labels == data.labels);
  const DatasetSplit split =
      load_dataset(dir.path + "/train.jsonl", labels, vocab, 64, false, "train");
  CHECK(split.pairs.size() == 30);
  CHECK(split.skipped == 0);
  for (const TokenizedPair& t : split.pairs) {
    CHECK(t.label >= 0);
    for (int id : t.ids) CHECK(id != Vocabulary::kUnk);  // every word in vocab
  }
}

TEST_CASE("a short training run reports coherent statistics") {
  const TinyTask& tt = tiny_task();
  Model model = build_model(tt.cfg);
  model.init(1);
  TrainOptions opt;
  opt.lr = real(1e-3);
  opt.batch_size = 8;
  opt.max_epochs = 3;
  opt.patience = 99;
  opt.seed = 1;
  TrainReport rep = train_model(model, tt.train, tt.valid, opt);

  CHECK(rep.epochs_run == 3);
  REQUIRE(rep.train_loss.size() == 3);
  REQUIRE(rep.valid_acc.size() == 3);
  for (real l : rep.train_loss) {
    CHECK(std::isfinite(l));
    CHECK(l > real(0));
  }
  for (real a : rep.valid_acc) {
    CHECK(a >= real(0));
    CHECK(a <= real(1));
  }
  CHECK(rep.best_epoch < 3);
  CHECK(rep.best_valid_acc == *std::max_element(rep.valid_acc.begin(), rep.valid_acc.end()));
  CHECK(rep.wall_seconds > 0);
}

TEST_CASE("identical config, seed and data reproduce the loss trajectory bitwise") {
  const TinyTask& tt = tiny_task();
  TrainOptions opt;
  opt.lr = real(1e-3);
  opt.batch_size = 8;
  opt.max_epochs = 2;
  opt.patience = 99;
  opt.seed = 7;

  TrainReport reps[2];
  for (TrainReport& rep : reps) {
    Model model = build_model(tt.cfg);
    model.init(7);
    rep = train_model(model, tt.train, tt.valid, opt);
  }
  REQUIRE(reps[0].train_loss.size() == reps[1].train_loss.size());
  CHECK(std::memcmp(reps[0].train_loss.data(), reps[1].train_loss.data(),
                    reps[0].train_loss.size() * sizeof(real)) == 0);
  CHECK(reps[0].valid_acc == reps[1].valid_acc);
}

TEST_CASE("training stops once the patience window passes without improvement") {
  const TinyTask& tt = tiny_task();
  Model model = build_model(tt.cfg);
  model.init(3);
  TrainOptions opt;
  opt.lr = real(0);  // accuracy frozen, so nothing ever improves on epoch 0
  opt.batch_size = 16;
  opt.max_epochs = 10;
  opt.patience = 0;
  TrainReport rep = train_model(model, tt.train, tt.valid, opt);
  CHECK(rep.epochs_run == 2);
  CHECK(rep.best_epoch == 0);
}

TEST_CASE("training rejects empty splits and zero-sized settings") {
  const TinyTask& tt = tiny_task();
  Model model = build_model(tt.cfg);
  model.init(1);
  std::vector<TokenizedPair> empty;
  TrainOptions opt;
  CHECK_THROWS_AS(train_model(model, empty, tt.valid, opt), FormatError);
  CHECK_THROWS_AS(train_model(model, tt.train, empty, opt), FormatError);
  opt.batch_size = 0;
  CHECK_THROWS_AS(train_model(model, tt.train, tt.valid, opt), FormatError);
}

TEST_CASE("an all-zero model predicts the first class everywhere") {
  const TinyTask& tt = tiny_task();
  Model model = build_model(tt.cfg);  // registered values start at zero
  EvalResult res = evaluate_model(model, tt.valid);

  std::size_t zeros = 0;
  for (const TokenizedPair& t : tt.valid) zeros += t.label == 0;
  CHECK(res.accuracy ==
        static_cast<real>(zeros) / static_cast<real>(tt.valid.size()));
  REQUIRE(res.confusion.rows == 2);
  REQUIRE(res.confusion.cols == 2);
  CHECK(res.confusion.at(0, 0) == static_cast<real>(zeros));
  CHECK(res.confusion.at(1, 0) == static_cast<real>(tt.valid.size() - zeros));
  CHECK(res.confusion.at(0, 1) == real(0));
  CHECK(res.confusion.at(1, 1) == real(0));

  std::vector<TokenizedPair> empty;
  CHECK_THROWS_AS(evaluate_model(model, empty), FormatError);
}

TEST_CASE("checkpoint round trip reproduces evaluation exactly") {
  const TinyTask& tt = tiny_task();
  Model model = build_model(tt.cfg);
  model.init(11);
  TrainOptions opt;
  opt.lr = real(1e-3);
  opt.batch_size = 16;
  opt.max_epochs = 1;
  TrainReport rep = train_model(model, tt.train, tt.valid, opt);
  (void)rep;

  TempDir dir("ckpt_rt_dir");
  const std::string path = dir.path + "/model.bin";
  save_checkpoint(path, model.params);

  Model loaded = build_model(tt.cfg);
  load_checkpoint(path, loaded.params);
  for (std::size_t i = 0; i < model.params.size(); ++i)
    CHECK(std::memcmp(model.params.value(i).data.data(), loaded.params.value(i).data.data(),
                      model.params.value(i).data.size() * sizeof(real)) == 0);

  EvalResult a = evaluate_model(model, tt.valid);
  EvalResult b = evaluate_model(loaded, tt.valid);
  CHECK(a.accuracy == b.accuracy);
}

TEST_CASE("sweep rows come back row-major and failed points do not stop the grid") {
  const TinyTask& tt = tiny_task();
  const auto test_pairs = tokenize_all(tt.data.test, tt.vocab);

  TrainOptions opt;
  opt.lr = real(1e-3);
  opt.batch_size = 16;
  opt.max_epochs = 1;
  opt.seed = 100;
  SweepPlan plan;
  plan.windows = {real(2), real(4)};
  plan.steps = {0, 1};  // zero steps is an invalid model: that point must fail
  plan.seeds = 2;

  auto rows = run_sweep(tt.cfg, opt, plan, tt.train, tt.valid, test_pairs);
  REQUIRE(rows.size() == 8);
  const real want_window[] = {2, 2, 2, 2, 4, 4, 4, 4};
  const std::size_t want_steps[] = {0, 0, 1, 1, 0, 0, 1, 1};
  for (std::size_t k = 0; k < 8; ++k) {
    CHECK(rows[k].window == want_window[k]);
    CHECK(rows[k].steps == want_steps[k]);
    CHECK(rows[k].seed == 100 + 1000 * k);
    if (rows[k].steps == 0) {
      CHECK(rows[k].status.rfind("failed", 0) == 0);
      CHECK(std::isnan(rows[k].valid_acc));
    } else {
      CHECK(rows[k].status == "ok");
      CHECK(rows[k].valid_acc >= real(0));
      CHECK(rows[k].valid_acc <= real(1));
      CHECK(rows[k].test_acc >= real(0));
      CHECK(rows[k].test_acc <= real(1));
    }
  }

  SweepPlan empty;
  empty.windows.clear();
  empty.steps = {1};
  CHECK_THROWS_AS(run_sweep(tt.cfg, opt, empty, tt.train, tt.valid, test_pairs), FormatError);
}

TEST_CASE("sweep results survive the csv round trip") {
  std::vector<SweepRow> rows(3);
  rows[0] = {real(1), 2, 42, real(0.8125), real(0.79), "ok"};
  rows[1] = {real(2.5), 4, 1042, real(0.5), real(0.5), "ok"};
  rows[2] = {real(6), 8, 2042, std::nan(""), std::nan(""), "failed: model config; sizes"};

  TempDir dir("sweep_rt_dir");
  const std::string path = dir.path + "/rows.csv";
  write_sweep_csv(path, rows);
  auto back = read_sweep_csv(path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].window == rows[i].window);
    CHECK(back[i].steps == rows[i].steps);
    CHECK(back[i].seed == rows[i].seed);
    CHECK(back[i].status == rows[i].status);
    if (std::isnan(rows[i].valid_acc)) {
      CHECK(std::isnan(back[i].valid_acc));
      CHECK(std::isnan(back[i].test_acc));
    } else {
      CHECK(back[i].valid_acc == doctest::Approx(rows[i].valid_acc).epsilon(1e-6));
      CHECK(back[i].test_acc == doctest::Approx(rows[i].test_acc).epsilon(1e-6));
    }
  }

  std::ofstream bad(dir.path + "/bad.csv");
  bad << "window,steps\n1,2\n";
  bad.close();
  CHECK_THROWS_AS(read_sweep_csv(dir.path + "/bad.csv"), FormatError);
}
