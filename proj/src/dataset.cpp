#include "dga/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "dga/errors.hpp"

namespace dga {

using nlohmann::json;

std::vector<std::string> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open label file: " + path);
  std::vector<std::string> labels;
  std::unordered_set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen.insert(line).second)
      throw FormatError("duplicate label '" + line + "' in " + path);
    labels.push_back(line);
  }
  if (labels.empty()) throw FormatError("label file is empty: " + path);
  return labels;
}

void save_labels(const std::string& path, const std::vector<std::string>& labels) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write label file: " + path);
  for (const std::string& l : labels) out << l << '\n';
}

namespace {

// More than 1% malformed lines is a broken file, but a single bad line in a
// tiny file is tolerated (the counter still reports it).
void check_malformed_cap(std::size_t skipped, std::size_t total, const std::string& path) {
  if (skipped > std::max<std::size_t>(1, total / 100))
    throw FormatError("too many malformed lines in " + path + ": " + std::to_string(skipped) +
                      " of " + std::to_string(total));
}

}  // namespace

DatasetSplit load_dataset(const std::string& path, const std::vector<std::string>& labels,
                          const Vocabulary& vocab, std::size_t max_len, bool single_cls,
                          const std::string& name) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset: " + path);

  DatasetSplit split;
  split.name = name;
  split.labels = labels;

  std::string line;
  std::size_t total = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++total;
    json rec = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("sentence_a") ||
        !rec.contains("sentence_b") || !rec.contains("label") ||
        !rec["sentence_a"].is_string() || !rec["sentence_b"].is_string() ||
        !rec["label"].is_string()) {
      ++split.skipped;
      continue;
    }
    const std::string label = rec["label"].get<std::string>();
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
      throw FormatError("unknown label '" + label + "' in " + path + " line " +
                        std::to_string(total));
    TokenizedPair pair;
    try {
      pair = tokenize_pair(rec["sentence_a"].get<std::string>(),
                           rec["sentence_b"].get<std::string>(), vocab, max_len, single_cls);
    } catch (const FormatError&) {
      ++split.skipped;  // e.g. an empty sentence
      continue;
    }
    pair.label = static_cast<int>(it - labels.begin());
    split.pairs.push_back(std::move(pair));
  }
  check_malformed_cap(split.skipped, total, path);
  if (split.pairs.empty()) throw FormatError("dataset has no usable records: " + path);
  return split;
}

void write_jsonl(const std::string& path, const std::vector<LabeledPair>& pairs) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write dataset: " + path);
  for (const LabeledPair& p : pairs) {
    json rec = {{"sentence_a", p.sentence_a}, {"sentence_b", p.sentence_b}, {"label", p.label}};
    out << rec.dump() << '\n';
  }
}

std::vector<LabeledPair> read_tsv_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open file: " + path);
  std::vector<LabeledPair> pairs;
  std::string line;
  std::size_t total = 0, skipped = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++total;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      ++skipped;
      continue;
    }
    LabeledPair p;
    p.sentence_a = line.substr(0, t1);
    p.sentence_b = line.substr(t1 + 1, t2 - t1 - 1);
    p.label = line.substr(t2 + 1);
    if (p.sentence_a.empty() || p.sentence_b.empty() || p.label.empty()) {
      ++skipped;
      continue;
    }
    pairs.push_back(std::move(p));
  }
  check_malformed_cap(skipped, total, path);
  if (pairs.empty()) throw FormatError("no usable rows in " + path);
  return pairs;
}

std::vector<std::string> collect_tokens(const std::vector<LabeledPair>& pairs) {
  std::set<std::string> uniq;
  for (const LabeledPair& p : pairs) {
    for (const std::string& t : whitespace_tokens(p.sentence_a)) uniq.insert(t);
    for (const std::string& t : whitespace_tokens(p.sentence_b)) uniq.insert(t);
  }
  return {uniq.begin(), uniq.end()};
}

std::vector<std::string> collect_labels(const std::vector<LabeledPair>& pairs) {
  std::set<std::string> uniq;
  for (const LabeledPair& p : pairs) uniq.insert(p.label);
  return {uniq.begin(), uniq.end()};
}

}  // namespace dga
