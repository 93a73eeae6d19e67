#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dga/dataset.hpp"
#include "dga/errors.hpp"
#include "dga/run_config.hpp"
#include "dga/tokenizer.hpp"
#include "dga/vocab.hpp"

using namespace dga;

namespace {

Vocabulary toy_vocab() {
  return Vocabulary::from_tokens({"a", "b", "c", "d", "e", "f", "g", "h"});
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name, const std::string& content) : path(name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("vocabulary: reserved tokens pinned, unknown words map to the unknown id") {
  const Vocabulary v = toy_vocab();
  CHECK(v.size() == 12);  // 4 reserved + 8 words
  CHECK(v.lookup("[PAD]") == Vocabulary::kPad);
  CHECK(v.lookup("[UNK]") == Vocabulary::kUnk);
  CHECK(v.lookup("[CLS]") == Vocabulary::kCls);
  CHECK(v.lookup("[SEP]") == Vocabulary::kSep);
  CHECK(v.lookup("a") == 4);
  CHECK(v.lookup("zebra") == Vocabulary::kUnk);
  CHECK(v.token(4) == "a");
}

TEST_CASE("vocabulary: file round trip and reserved-prefix validation") {
  const Vocabulary v = toy_vocab();
  v.save("vocab_rt.txt");
  const Vocabulary loaded = Vocabulary::load("vocab_rt.txt");
  CHECK(loaded.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(loaded.token(static_cast<int>(i)) == v.token(static_cast<int>(i)));
  std::remove("vocab_rt.txt");

  TempFile bad("vocab_bad.txt", "[PAD]\n[UNK]\nwrong\n[SEP]\nword\n");
  CHECK_THROWS_AS(Vocabulary::load(bad.path), FormatError);

  TempFile dup("vocab_dup.txt", "[PAD]\n[UNK]\n[CLS]\n[SEP]\nword\nword\n");
  CHECK_THROWS_AS(Vocabulary::load(dup.path), FormatError);
}

TEST_CASE("tokenize: boundary layout and the documented toy example") {
  const Vocabulary v = toy_vocab();
  const TokenizedPair p = tokenize_pair("a b", "c", v);
  CHECK(p.ids == std::vector<int>{Vocabulary::kCls, 4, 5, Vocabulary::kSep, 6, Vocabulary::kCls});
  CHECK(p.total_len() == 6);
  CHECK(p.len_a == 2);
  CHECK(p.len_b == 1);
  CHECK(p.total_len() == p.len_a + p.len_b + 3);
}

TEST_CASE("tokenize: trailing token switches under the conventional layout") {
  const Vocabulary v = toy_vocab();
  const TokenizedPair p = tokenize_pair("a b", "c", v, 64, /*single_cls=*/true);
  CHECK(p.ids == std::vector<int>{Vocabulary::kCls, 4, 5, Vocabulary::kSep, 6, Vocabulary::kSep});
}

TEST_CASE("tokenize: identical sentences give identical id runs on both sides") {
  const Vocabulary v = toy_vocab();
  const TokenizedPair p = tokenize_pair("a c e", "a c e", v);
  const std::vector<int> left(p.ids.begin() + 1, p.ids.begin() + 4);
  const std::vector<int> right(p.ids.begin() + 5, p.ids.begin() + 8);
  CHECK(left == right);
}

TEST_CASE("tokenize: out-of-vocabulary and uppercase words") {
  const Vocabulary v = toy_vocab();
  const TokenizedPair p = tokenize_pair("a zebra", "B", v);
  CHECK(p.ids[2] == Vocabulary::kUnk);
  CHECK(p.ids[4] == v.lookup("b"));  // lowercased before lookup
}

TEST_CASE("tokenize: truncation drops the longer sentence's tail, keeps boundaries") {
  const Vocabulary v = toy_vocab();
  const TokenizedPair p = tokenize_pair("a b c d e f", "g h", v, 8);
  CHECK(p.total_len() == 8);
  CHECK(p.ids.front() == Vocabulary::kCls);
  CHECK(p.ids.back() == Vocabulary::kCls);
  CHECK(p.len_b == 2);            // short sentence untouched
  CHECK(p.len_a == 3);            // long one truncated from the tail
  CHECK(p.ids[1] == v.lookup("a"));
  CHECK(p.ids[3] == v.lookup("c"));

  // extreme budget: one token per sentence survives
  const TokenizedPair tight = tokenize_pair("a b c d e f", "g h", v, 5);
  CHECK(tight.total_len() == 5);
  CHECK(tight.len_a == 1);
  CHECK(tight.len_b == 1);
}

TEST_CASE("tokenize: empty sentences and tiny budgets are input errors") {
  const Vocabulary v = toy_vocab();
  CHECK_THROWS_AS(tokenize_pair("", "a", v), FormatError);
  CHECK_THROWS_AS(tokenize_pair("a", "   ", v), FormatError);
  CHECK_THROWS_AS(tokenize_pair("a", "b", v, 4), FormatError);
}

TEST_CASE("labels: ordered load, duplicates rejected, empty rejected") {
  TempFile ok("labels_ok.txt", "entailment\nneutral\ncontradiction\n");
  const auto labels = load_labels(ok.path);
  CHECK(labels == std::vector<std::string>{"entailment", "neutral", "contradiction"});

  TempFile dup("labels_dup.txt", "yes\nno\nyes\n");
  CHECK_THROWS_AS(load_labels(dup.path), FormatError);
  TempFile empty("labels_empty.txt", "");
  CHECK_THROWS_AS(load_labels(empty.path), FormatError);
}

TEST_CASE("dataset: two valid lines load as two pairs") {
  const Vocabulary v = toy_vocab();
  TempFile data("data_ok.jsonl",
                R"({"sentence_a": "a b", "sentence_b": "c", "label": "yes"})"
                "\n"
                R"({"sentence_a": "d", "sentence_b": "e f", "label": "no"})"
                "\n");
  const DatasetSplit split = load_dataset(data.path, {"yes", "no"}, v, 64, false, "train");
  CHECK(split.pairs.size() == 2);
  CHECK(split.skipped == 0);
  CHECK(split.pairs[0].label == 0);
  CHECK(split.pairs[1].label == 1);
}

TEST_CASE("dataset: a line missing its label is skipped and counted") {
  const Vocabulary v = toy_vocab();
  std::string content;
  for (int i = 0; i < 120; ++i)
    content += R"({"sentence_a": "a", "sentence_b": "b", "label": "yes"})"
               "\n";
  content += R"({"sentence_a": "a", "sentence_b": "b"})"
             "\n";
  TempFile data("data_skip.jsonl", content);
  const DatasetSplit split = load_dataset(data.path, {"yes"}, v, 64, false, "train");
  CHECK(split.skipped == 1);
  CHECK(split.pairs.size() == 120);
}

TEST_CASE("dataset: a record with an undeclared label fails, naming it") {
  const Vocabulary v = toy_vocab();
  TempFile data("data_label.jsonl",
                R"({"sentence_a": "a", "sentence_b": "b", "label": "maybe"})"
                "\n");
  try {
    load_dataset(data.path, {"yes", "no"}, v, 64, false, "train");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("maybe") != std::string::npos);
  }
}

TEST_CASE("dataset: more than one percent malformed lines aborts") {
  const Vocabulary v = toy_vocab();
  std::string content;
  for (int i = 0; i < 100; ++i) {
    content += R"({"sentence_a": "a", "sentence_b": "b", "label": "yes"})"
               "\n";
    if (i % 20 == 0) content += "not json at all\n";
  }
  TempFile data("data_broken.jsonl", content);
  CHECK_THROWS_AS(load_dataset(data.path, {"yes"}, v, 64, false, "train"), FormatError);
}

TEST_CASE("dataset: empty and missing files are errors") {
  const Vocabulary v = toy_vocab();
  TempFile data("data_empty.jsonl", "\n\n");
  CHECK_THROWS_AS(load_dataset(data.path, {"yes"}, v, 64, false, "t"), FormatError);
  CHECK_THROWS_AS(load_dataset("no_such_file.jsonl", {"yes"}, v, 64, false, "t"), FormatError);
}

TEST_CASE("tsv conversion round-trips through the record format") {
  const Vocabulary v = toy_vocab();
  TempFile tsv("pairs.tsv", "a b\tc d\tyes\ne f\tg\tno\n");
  const auto pairs = read_tsv_pairs(tsv.path);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].sentence_a == "a b");
  CHECK(pairs[0].sentence_b == "c d");
  CHECK(pairs[0].label == "yes");

  write_jsonl("pairs_rt.jsonl", pairs);
  const DatasetSplit split = load_dataset("pairs_rt.jsonl", {"no", "yes"}, v, 64, false, "rt");
  CHECK(split.pairs.size() == 2);
  CHECK(split.pairs[0].label == 1);
  CHECK(split.pairs[1].label == 0);
  std::remove("pairs_rt.jsonl");

  CHECK(collect_labels(pairs) == std::vector<std::string>{"no", "yes"});
  const auto tokens = collect_tokens(pairs);
  CHECK(tokens == std::vector<std::string>{"a", "b", "c", "d", "e", "f", "g"});
}

TEST_CASE("config file: values load, flags would override, junk is rejected") {
  TempFile conf("run.conf",
                "# comment line\n"
                "window-size = 6\n"
                "attention-length=2\n"
                "no-gaussian = true\n"
                "learning-rate = 0.001\n"
                "train = data/train.jsonl\n");
  RunConfig cfg;
  apply_config_file(conf.path, cfg);
  CHECK(cfg.window == real(6));
  CHECK(cfg.steps == 2);
  CHECK(cfg.no_gaussian);
  CHECK(cfg.lr == doctest::Approx(0.001));
  CHECK(cfg.train_path == "data/train.jsonl");
  CHECK(cfg.dim == 64);  // untouched fields keep their defaults

  TempFile unknown("run_bad.conf", "window-sizes = 6\n");
  RunConfig c2;
  CHECK_THROWS_AS(apply_config_file(unknown.path, c2), FormatError);

  TempFile badval("run_badval.conf", "patience = soon\n");
  CHECK_THROWS_AS(apply_config_file(badval.path, c2), FormatError);

  TempFile noeq("run_noeq.conf", "patience 3\n");
  CHECK_THROWS_AS(apply_config_file(noeq.path, c2), FormatError);
}

TEST_CASE("run config validation catches contradictory and degenerate settings") {
  RunConfig ok;
  CHECK_NOTHROW(validate(ok));

  RunConfig both = ok;
  both.no_global = both.no_detail = true;
  CHECK_THROWS_AS(validate(both), FormatError);

  RunConfig tiny = ok;
  tiny.max_len = 4;
  CHECK_THROWS_AS(validate(tiny), FormatError);

  RunConfig zero = ok;
  zero.steps = 0;
  CHECK_THROWS_AS(validate(zero), FormatError);

  RunConfig badw = ok;
  badw.window = real(0);
  CHECK_THROWS_AS(validate(badw), FormatError);
}
