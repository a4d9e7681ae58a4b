#pragma once

// Counter-based random generator. Output i of a stream depends only on
// (seed, stream, i), so trials scheduled on different threads draw identical
// numbers as long as each trial owns its stream id.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace nonsig {

namespace detail {

// SplitMix64 finalizer. Passes BigCrush as a counter mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(detail::mix64(seed ^ detail::mix64(stream + 0x5851f42d4c957f2dull))) {}

  std::uint64_t next_u64() {
    return detail::mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ull);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound). Fixed-point multiply; bias is O(bound / 2^64).
  int next_int(int bound) {
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<unsigned __int128>(bound)) >> 64);
  }

  // Index into a cumulative distribution, cdf.back() == total mass.
  std::size_t next_from_cdf(std::span<const double> cdf) {
    double u = next_unit() * cdf.back();
    std::size_t lo = 0, hi = cdf.size() - 1;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cdf[mid] <= u) lo = mid + 1; else hi = mid;
    }
    return lo;
  }

  // Fisher-Yates, identical on every platform.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_int(static_cast<int>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    shuffle(p);
    return p;
  }

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline std::vector<double> cumulative(std::span<const double> weights) {
  std::vector<double> cdf(weights.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    cdf[i] = acc;
  }
  return cdf;
}

}  // namespace nonsig
