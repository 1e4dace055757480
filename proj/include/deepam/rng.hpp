#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace deepam {

// mt19937_64 is bit-specified by the standard; the distributions below are
// hand-rolled because std::uniform_*_distribution output is
// implementation-defined and the pipeline promises byte-identical runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double next_unit() {
    return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
  }

  // uniform in [lo, hi)
  double next_real(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // uniform in [0, n), unbiased rejection sampling
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace deepam
