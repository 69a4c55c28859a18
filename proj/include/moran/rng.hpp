#ifndef MORAN_RNG_HPP
#define MORAN_RNG_HPP

#include <cstdint>
#include <limits>

namespace moran {

// Counter-based 64-bit generator (SplitMix64). Cheap to seed, cheap to fork:
// replica i of a master seed gets an independent stream via substream(), so
// parallel runs reproduce bit-identically regardless of scheduling.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static SplitMix64 substream(std::uint64_t master, std::uint64_t index) {
    return SplitMix64(mix(master + 0x9e3779b97f4a7c15ULL * (index + 1)));
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0,1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound), bound >= 1, unbiased via rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  bool next_bernoulli(double p) { return next_unit() < p; }

  // UniformRandomBitGenerator interface.
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

 private:
  std::uint64_t state_;
};

}  // namespace moran

#endif
