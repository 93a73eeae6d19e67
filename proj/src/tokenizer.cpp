#include "dga/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "dga/errors.hpp"

namespace dga {

std::vector<std::string> whitespace_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    std::transform(tok.begin(), tok.end(), tok.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.push_back(tok);
  }
  return out;
}

TokenizedPair tokenize_pair(const std::string& sentence_a, const std::string& sentence_b,
                            const Vocabulary& vocab, std::size_t max_len, bool single_cls) {
  if (max_len < 5) throw FormatError("max_len must be at least 5");
  auto toks_a = whitespace_tokens(sentence_a);
  auto toks_b = whitespace_tokens(sentence_b);
  if (toks_a.empty()) throw FormatError("sentence_a is empty after tokenization");
  if (toks_b.empty()) throw FormatError("sentence_b is empty after tokenization");

  // Three structural tokens regardless of layout.
  while (toks_a.size() + toks_b.size() + 3 > max_len) {
    if (toks_b.size() >= toks_a.size() && toks_b.size() > 1)
      toks_b.pop_back();
    else if (toks_a.size() > 1)
      toks_a.pop_back();
    else
      toks_b.pop_back();  // both already at one token cannot happen with max_len >= 5
  }

  TokenizedPair out;
  out.len_a = toks_a.size();
  out.len_b = toks_b.size();
  out.ids.reserve(toks_a.size() + toks_b.size() + 3);
  out.ids.push_back(Vocabulary::kCls);
  for (const auto& t : toks_a) out.ids.push_back(vocab.lookup(t));
  out.ids.push_back(Vocabulary::kSep);
  for (const auto& t : toks_b) out.ids.push_back(vocab.lookup(t));
  out.ids.push_back(single_cls ? Vocabulary::kSep : Vocabulary::kCls);
  return out;
}

}  // namespace dga
