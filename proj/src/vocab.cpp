#include "dga/vocab.hpp"

#include <fstream>

#include "dga/errors.hpp"

namespace dga {

namespace {
const char* kReserved[4] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
}

void Vocabulary::append(const std::string& token) {
  if (index_.count(token)) throw FormatError("duplicate vocabulary token: " + token);
  index_[token] = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open vocabulary file: " + path);
  Vocabulary v;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    v.append(line);
  }
  if (v.size() < 4) throw FormatError("vocabulary has fewer than the four reserved tokens");
  for (int i = 0; i < 4; ++i)
    if (v.tokens_[static_cast<std::size_t>(i)] != kReserved[i])
      throw FormatError("vocabulary line " + std::to_string(i) + " must be " + kReserved[i] + ", got '" +
                        v.tokens_[static_cast<std::size_t>(i)] + "'");
  return v;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
  Vocabulary v;
  for (const char* r : kReserved) v.append(r);
  for (const auto& t : tokens) v.append(t);
  return v;
}

int Vocabulary::lookup(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError("cannot write vocabulary file: " + path);
  for (const auto& t : tokens_) os << t << '\n';
}

}  // namespace dga
