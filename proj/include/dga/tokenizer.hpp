#pragma once

#include <string>
#include <vector>

#include "dga/vocab.hpp"

namespace dga {

// Concatenated id sequence for one sentence pair. ids.size() is the token
// count the model sees (l_a + l_b + 3 in the default layout).
struct TokenizedPair {
  std::vector<int> ids;
  std::size_t len_a = 0;  // source tokens kept from sentence a
  std::size_t len_b = 0;
  int label = -1;

  std::size_t total_len() const { return ids.size(); }
};

std::vector<std::string> whitespace_tokens(const std::string& text);

// Default layout: [CLS] a... [SEP] b... [CLS]; h_g is read at position 0 and
// the closing boundary token stays attendable. single_cls switches to the
// conventional [CLS] a... [SEP] b... [SEP]. Unknown words map to [UNK].
// Truncation drops tail tokens of the longer sentence until the sequence
// fits max_len, never touching position 0, the separator, or the final
// boundary token, and keeping at least one token per sentence.
// Empty sentences (after tokenization) are a FormatError; max_len < 5 too.
TokenizedPair tokenize_pair(const std::string& sentence_a, const std::string& sentence_b,
                            const Vocabulary& vocab, std::size_t max_len = 64,
                            bool single_cls = false);

}  // namespace dga
