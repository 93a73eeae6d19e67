#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace dga {

// Token ids are dense 0..size()-1 with the four reserved tokens pinned to the
// first four slots. Vocabulary files are UTF-8, one token per line, line
// number = id.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;

  static Vocabulary load(const std::string& path);
  // Reserved tokens are prepended automatically.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens);

  int lookup(const std::string& token) const;  // kUnk if absent
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }

  void save(const std::string& path) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;

  void append(const std::string& token);
};

}  // namespace dga
