#include "dga/synthetic.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>
#include <unordered_set>

#include "dga/errors.hpp"
#include "dga/rng.hpp"

namespace dga {

namespace {

std::vector<std::string> make_words(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    std::ostringstream ss;
    ss << prefix << (i < 10 ? "0" : "") << i;
    out.push_back(ss.str());
  }
  return out;
}

const std::vector<std::string>& fillers() {
  static const auto v = make_words("fill", 12);
  return v;
}
const std::vector<std::string>& triggers() {
  static const auto v = make_words("trig", 3);
  return v;
}
const std::vector<std::string>& modifiers() {
  static const auto v = make_words("mod", 3);
  return v;
}
const std::vector<std::string>& keywords() {
  static const auto v = make_words("key", 30);
  return v;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += tokens[i];
  }
  return s;
}

template <class T>
const T& pick(SplitMix64& rng, const std::vector<T>& v) {
  return v[rng.next_below(v.size())];
}

// One sentence of `len` tokens: `trig` somewhere, `mod` within two positions
// of it (near) or at least three away (far), fillers elsewhere.
std::vector<std::string> window_sentence(SplitMix64& rng, const std::string& trig,
                                         const std::string& mod, bool near, std::size_t len) {
  const std::size_t pt = rng.next_below(len);
  std::vector<std::size_t> slots;
  for (std::size_t i = 0; i < len; ++i) {
    if (i == pt) continue;
    const std::size_t dist = i > pt ? i - pt : pt - i;
    if (near ? (dist <= 2) : (dist >= 3)) slots.push_back(i);
  }
  const std::size_t mp = pick(rng, slots);
  std::vector<std::string> toks(len);
  for (std::size_t i = 0; i < len; ++i)
    toks[i] = i == pt ? trig : i == mp ? mod : pick(rng, fillers());
  return toks;
}

// Each trigger has a companion modifier with the same index, so "the right
// modifier sits next to the trigger" is a detectable local pattern rather
// than an open-ended token comparison. Positives show the pattern in both
// sentences. Negatives alternate between a vocabulary contrast (another
// trigger's modifier sits near instead — same trigger, different modifiers)
// and a placement contrast (the right modifier, but far from the trigger in
// one sentence); only the placement kind forces models to read local
// context, so bag-of-words shortcuts top out well below perfect. Placement
// contrasts get the larger share since they carry the harder signal.
LabeledPair window_pair(SplitMix64& rng, int label) {
  const std::size_t k = rng.next_below(triggers().size());
  std::size_t j = rng.next_below(modifiers().size() - 1);
  if (j >= k) ++j;
  const std::string& trig = triggers()[k];
  const std::string& mk = modifiers()[k];
  const std::string& mj = modifiers()[j];

  const std::size_t len_a = 6 + rng.next_below(2);
  const std::size_t len_b = 6 + rng.next_below(2);
  LabeledPair p;
  if (label == 1) {
    p.sentence_a = join(window_sentence(rng, trig, mk, true, len_a));
    p.sentence_b = join(window_sentence(rng, trig, mk, true, len_b));
  } else if (rng.next_below(10) < 3) {
    p.sentence_a = join(window_sentence(rng, trig, mk, true, len_a));
    p.sentence_b = join(window_sentence(rng, trig, mj, true, len_b));
  } else {
    const bool far_in_a = rng.next_below(2) == 0;
    p.sentence_a = join(window_sentence(rng, trig, mk, !far_in_a, len_a));
    p.sentence_b = join(window_sentence(rng, trig, mk, far_in_a, len_b));
  }
  p.label = label == 1 ? "1" : "0";
  return p;
}

LabeledPair overlap_pair(SplitMix64& rng, int label) {
  const auto& words = keywords();
  std::vector<std::size_t> perm(words.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  // partial Fisher-Yates: the first 12 entries are a random sample
  for (std::size_t i = 0; i < 12; ++i)
    std::swap(perm[i], perm[i + rng.next_below(perm.size() - i)]);

  const std::size_t k = 6;
  std::vector<std::string> a, b;
  for (std::size_t i = 0; i < k; ++i) a.push_back(words[perm[i]]);
  const std::size_t shared = label == 1 ? 4 : 1;
  for (std::size_t i = 0; i < shared; ++i) b.push_back(words[perm[i]]);
  for (std::size_t i = 0; i < k - shared; ++i) b.push_back(words[perm[k + i]]);

  for (std::size_t i = a.size(); i > 1; --i) std::swap(a[i - 1], a[rng.next_below(i)]);
  for (std::size_t i = b.size(); i > 1; --i) std::swap(b[i - 1], b[rng.next_below(i)]);

  LabeledPair p;
  p.sentence_a = join(a);
  p.sentence_b = join(b);
  p.label = label == 1 ? "1" : "0";
  return p;
}

std::vector<LabeledPair> fill_split(SplitMix64& rng, const std::string& task, std::size_t n,
                                    std::unordered_set<std::string>& seen) {
  std::vector<LabeledPair> out;
  out.reserve(n);
  int label = 0;
  std::size_t stale = 0;
  while (out.size() < n) {
    LabeledPair p = task == "shared-window" ? window_pair(rng, label) : overlap_pair(rng, label);
    const std::string key = p.sentence_a + "\x01" + p.sentence_b;
    if (!seen.insert(key).second) {
      if (++stale > 1000 * n) throw FormatError("synthetic generation stalled; lower the count");
      continue;  // duplicate; redraw with the same label
    }
    out.push_back(std::move(p));
    label ^= 1;
    stale = 0;
  }
  // deterministic shuffle so the file order does not alternate labels
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.next_below(i)]);
  return out;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.task != "shared-window" && spec.task != "keyword-overlap")
    throw FormatError("unknown synthetic task: " + spec.task);
  if (spec.train_n == 0 || spec.valid_n == 0 || spec.test_n == 0)
    throw FormatError("synthetic split sizes must be >= 1");

  SplitMix64 rng = SplitMix64(spec.seed).split("synthetic." + spec.task);
  SyntheticData data;
  data.labels = {"0", "1"};
  if (spec.task == "shared-window") {
    data.vocab_words = fillers();
    data.vocab_words.insert(data.vocab_words.end(), triggers().begin(), triggers().end());
    data.vocab_words.insert(data.vocab_words.end(), modifiers().begin(), modifiers().end());
  } else {
    data.vocab_words = keywords();
  }

  std::unordered_set<std::string> seen;
  data.train = fill_split(rng, spec.task, spec.train_n, seen);
  data.valid = fill_split(rng, spec.task, spec.valid_n, seen);
  data.test = fill_split(rng, spec.task, spec.test_n, seen);
  return data;
}

int shared_window_label(const std::vector<std::string>& tokens_a,
                        const std::vector<std::string>& tokens_b) {
  auto near_mods = [](const std::vector<std::string>& toks, const std::string& trig) {
    std::set<std::string> mods;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (toks[i] != trig) continue;
      for (std::size_t j = i >= 2 ? i - 2 : 0; j < toks.size() && j <= i + 2; ++j) {
        if (std::find(modifiers().begin(), modifiers().end(), toks[j]) != modifiers().end())
          mods.insert(toks[j]);
      }
    }
    return mods;
  };
  for (const std::string& trig : triggers()) {
    const bool in_a = std::find(tokens_a.begin(), tokens_a.end(), trig) != tokens_a.end();
    const bool in_b = std::find(tokens_b.begin(), tokens_b.end(), trig) != tokens_b.end();
    if (!in_a || !in_b) continue;
    const auto ma = near_mods(tokens_a, trig);
    const auto mb = near_mods(tokens_b, trig);
    for (const std::string& m : ma)
      if (mb.count(m)) return 1;
  }
  return 0;
}

void write_synthetic(const SyntheticData& data, const std::string& dir) {
  write_jsonl(dir + "/train.jsonl", data.train);
  write_jsonl(dir + "/valid.jsonl", data.valid);
  write_jsonl(dir + "/test.jsonl", data.test);
  save_labels(dir + "/labels.txt", data.labels);
  Vocabulary::from_tokens(data.vocab_words).save(dir + "/vocab.txt");
}

}  // namespace dga
