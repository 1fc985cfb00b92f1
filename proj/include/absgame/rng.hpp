#ifndef ABSGAME_RNG_HPP
#define ABSGAME_RNG_HPP

#include <cstdint>

namespace absgame {

// Deterministic, platform-stable generator (splitmix64). The standard
// library's distributions are not bit-stable across implementations, and
// replayable traces need identical streams everywhere, so we roll the few
// primitives we need by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, n), n >= 1 (rejection sampling).
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Numerator of a dyadic fraction k/2^53 uniform in [0, 1).
  std::uint64_t next_dyadic53() { return next_u64() >> 11; }

 private:
  std::uint64_t state_;
};

}  // namespace absgame

#endif  // ABSGAME_RNG_HPP
