#pragma once

#include <cstdint>
#include <string_view>

namespace dga {

// splitmix64: 64-bit state, equidistributed, and cheap to fork. Every random
// decision in the project (init, shuffling, data generation) goes through one
// of these so that runs are bit-reproducible given a seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // n > 0; uniform in [0, n). Modulo bias is irrelevant at our n.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // Forks an independent stream keyed by a label. Derived streams do not
  // disturb the parent's state, so adding a parameter never reorders the
  // randomness any other parameter sees.
  SplitMix64 split(std::string_view label) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : label) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    SplitMix64 child(state_ ^ h);
    child.next_u64();
    return child;
  }

  SplitMix64 split(std::uint64_t label) const {
    SplitMix64 child(state_ ^ (label * 0xff51afd7ed558ccdULL + 0x2545f4914f6cdd1dULL));
    child.next_u64();
    return child;
  }

 private:
  std::uint64_t state_;
};

}  // namespace dga
