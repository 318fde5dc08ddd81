#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>

namespace bridgekit {

/*
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * The 64-bit key is (seed, stream) folded; each 128-bit counter value maps
 * to four 32-bit outputs. Distinct streams of one seed are independent,
 * which is what per-trajectory seeding in the Monte Carlo code relies on.
 * Satisfies UniformRandomBitGenerator.
 */
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// One application of the bijection; exposed for known-answer tests.
  static Counter block(Counter counter, Key key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  Key key_;
  Counter counter_{};
  Counter buffer_{};
  int index_ = 4;
};

/// Standard normal draws; complex scalars get independent N(0, 1) real and
/// imaginary parts (the state is treated as R^{2n}).
template <typename Scalar>
struct StandardNormal {
  template <typename Rng>
  Scalar operator()(Rng &rng) {
    return dist(rng);
  }
  std::normal_distribution<double> dist;
};

template <typename T>
struct StandardNormal<std::complex<T>> {
  template <typename Rng>
  std::complex<T> operator()(Rng &rng) {
    const T re = dist(rng);
    const T im = dist(rng);
    return {re, im};
  }
  std::normal_distribution<T> dist;
};

} // namespace bridgekit
