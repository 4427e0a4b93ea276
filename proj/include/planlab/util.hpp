// Small shared helpers: deterministic RNG, FNV hashing, string utilities.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace planlab {

// mt19937 wrapper with hand-rolled bounded sampling so that sequences are
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(static_cast<uint32_t>(seed ^ (seed >> 32))) {}

  uint32_t next_u32() { return gen_(); }

  // Uniform in [0, n). n must be > 0.
  uint32_t below(uint32_t n) {
    // Rejection sampling to avoid modulo bias.
    uint32_t limit = UINT32_MAX - (UINT32_MAX % n);
    uint32_t v = gen_();
    while (v >= limit) v = gen_();
    return v % n;
  }

  bool chance(double p) {
    return static_cast<double>(gen_()) / 4294967296.0 < p;
  }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(static_cast<uint32_t>(xs.size()))];
  }

  template <typename T>
  void shuffle(std::vector<T>& xs) {
    for (size_t i = xs.size(); i > 1; --i) {
      size_t j = below(static_cast<uint32_t>(i));
      std::swap(xs[i - 1], xs[j]);
    }
  }

 private:
  std::mt19937 gen_;
};

inline uint64_t fnv1a(const std::string& s, uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string to_hex(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

inline std::string lowercased(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// "block-of-cheese" <-> "block of cheese" (PDDL constants vs. game text).
inline std::string dashes_to_spaces(std::string s) {
  std::replace(s.begin(), s.end(), '-', ' ');
  return s;
}

inline std::string spaces_to_dashes(std::string s) {
  std::replace(s.begin(), s.end(), ' ', '-');
  return s;
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::string join(const std::vector<std::string>& xs, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += xs[i];
  }
  return out;
}

}  // namespace planlab
