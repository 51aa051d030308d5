#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace specnet {

/// Seeded random source with explicit variate transforms. The std engines are
/// bit-reproducible across platforms but the std distributions are not, so the
/// transforms are spelled out here; every seeded run is then bit-identical.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(6.283185307179586476925286766559 * u2);
    have_spare_ = true;
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  /// Unbiased integer in [0, n) by rejection on a power-of-two mask.
  uint64_t index(uint64_t n) {
    if (n <= 1) return 0;
    uint64_t mask = ~uint64_t{0} >> __builtin_clzll(n - 1 | 1);
    uint64_t v;
    do {
      v = eng_() & mask;
    } while (v >= n);
    return v;
  }

  template <class T>
  void shuffle(std::vector<T>& xs) {
    for (size_t i = xs.size(); i > 1; --i) {
      size_t j = index(i);
      std::swap(xs[i - 1], xs[j]);
    }
  }

  /// k distinct indices from [0, n), order random (partial Fisher-Yates).
  std::vector<int> sample(int n, int k) {
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    if (k > n) k = n;
    for (int i = 0; i < k; ++i) {
      size_t j = i + index(n - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace specnet
