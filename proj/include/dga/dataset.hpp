#pragma once

#include <string>
#include <vector>

#include "dga/tokenizer.hpp"
#include "dga/vocab.hpp"

namespace dga {

struct LabeledPair {
  std::string sentence_a;
  std::string sentence_b;
  std::string label;
};

struct DatasetSplit {
  std::string name;
  std::vector<TokenizedPair> pairs;
  std::vector<std::string> labels;  // ordered label set the indices refer to
  std::size_t skipped = 0;          // malformed lines dropped during loading
};

// One label per line, order defines the class indices. Errors on empty
// files and duplicates.
std::vector<std::string> load_labels(const std::string& path);
void save_labels(const std::string& path, const std::vector<std::string>& labels);

// Line-delimited records {"sentence_a": ..., "sentence_b": ..., "label": ...}.
// Malformed lines are counted and skipped; more than 1% malformed (beyond a
// one-line allowance for tiny files) aborts. A well-formed record carrying a
// label outside `labels` aborts immediately, naming the label.
DatasetSplit load_dataset(const std::string& path, const std::vector<std::string>& labels,
                          const Vocabulary& vocab, std::size_t max_len, bool single_cls,
                          const std::string& name);

void write_jsonl(const std::string& path, const std::vector<LabeledPair>& pairs);

// Tab-separated "sentence_a<TAB>sentence_b<TAB>label" -> the record format
// above. Returns the converted rows; same malformed-line policy as loading.
std::vector<LabeledPair> read_tsv_pairs(const std::string& path);

// Sorted unique whitespace tokens across both sentences of every pair.
std::vector<std::string> collect_tokens(const std::vector<LabeledPair>& pairs);
std::vector<std::string> collect_labels(const std::vector<LabeledPair>& pairs);

}  // namespace dga
