#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcevo {

// Seeded random stream used everywhere randomness is needed.
//
// The generator is std::mt19937_64 (the 64-bit Mersenne Twister, whose output
// sequence is fixed by the C++ standard), but none of the std::*_distribution
// adaptors are used: their mapping from raw engine output to values is
// implementation-defined and would break run reproducibility across standard
// libraries. Instead:
//
//   uniform()        -> (x >> 11) * 2^-53, the standard 53-bit double in [0,1)
//   uniform_int(n)   -> unbiased via rejection sampling on the top bits
//
// All draw helpers below are defined in terms of those two, so a (seed, draw
// sequence) pair produces identical results on any conforming platform.
class RngStream {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+rejection";

  explicit RngStream(std::uint64_t seed = 0) : engine_(seed) {}

  // Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    if ((n & (n - 1)) == 0) return engine_() & (n - 1);  // power of two
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  int index(std::size_t n) { return static_cast<int>(uniform_int(n)); }

  bool bernoulli(double p) { return uniform() < p; }

  // Index drawn from explicit weights (need not sum to 1).
  int weighted(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw std::invalid_argument("weighted: no positive mass");
    double r = uniform() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      r -= weights[i];
      if (r < 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;  // r landed on the edge
  }

  // Fisher-Yates shuffle driven by uniform_int (std::shuffle is not portable).
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_int(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Engine state round-trip, used by checkpoint/resume.
  std::string save_state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
  }

  void load_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
    if (is.fail()) throw std::invalid_argument("RngStream: bad saved state");
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qcevo
