#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace kbo {

/// Reproducible random stream.
///
/// The engine is MT19937-64 (std::mt19937_64), whose output sequence is fixed
/// by the C++ standard. The standard distributions are not, so bounded draws
/// use rejection sampling over the raw 64-bit output. Independent streams for
/// the scheduler, the k-SA oracle and the channel daemon are derived from one
/// scenario seed with SplitMix64.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  static constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  static Prng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Prng(splitmix64(seed ^ splitmix64(stream_id)));
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool coin() { return below(2) == 1; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kbo
