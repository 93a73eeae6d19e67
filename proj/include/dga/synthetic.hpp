#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dga/dataset.hpp"

namespace dga {

// Two generated pair-classification tasks.
//
// shared-window: both sentences carry one trigger word and one modifier
// word among fillers; label 1 iff the same trigger appears in both
// sentences with the same modifier within two positions of it. Each
// trigger has a companion modifier, positives use that pairing, and
// negatives split between a vocabulary contrast (another trigger's
// modifier near instead) and a placement contrast (right modifier, wrong
// position), so bag statistics alone leave a gap that only reading local
// context closes. keyword-overlap is the control: label = high vs. low
// bag overlap, positions irrelevant.
struct SyntheticSpec {
  std::string task;  // "shared-window" or "keyword-overlap"
  std::size_t train_n = 8000;
  std::size_t valid_n = 1000;
  std::size_t test_n = 1000;
  std::uint64_t seed = 42;
};

struct SyntheticData {
  std::vector<LabeledPair> train, valid, test;
  std::vector<std::string> labels;       // {"0", "1"}
  std::vector<std::string> vocab_words;  // task words, reserved tokens excluded
};

// Balanced within one pair of each label per draw; splits are disjoint by
// construction (global dedup on the sentence pair). Unknown task names are a
// FormatError.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Independent statement of the shared-window rule, used to audit generated
// data: 1 iff some trigger occurs in both sentences and the modifier sets
// within +-2 of its occurrences intersect.
int shared_window_label(const std::vector<std::string>& tokens_a,
                        const std::vector<std::string>& tokens_b);

// Writes train/valid/test JSONL, labels.txt and vocab.txt under dir.
void write_synthetic(const SyntheticData& data, const std::string& dir);

}  // namespace dga
