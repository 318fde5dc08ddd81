#include "bridgekit/rng.hpp"

namespace bridgekit {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t &hi,
                    std::uint32_t &lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

// splitmix64 finalizer, used only to fold (seed, stream) into the key.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

} // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  const std::uint64_t folded = mix64(seed ^ mix64(stream));
  key_ = {static_cast<std::uint32_t>(folded),
          static_cast<std::uint32_t>(folded >> 32)};
}

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void Philox4x32::refill() {
  buffer_ = block(counter_, key_);
  for (auto &word : counter_) {
    if (++word != 0) {
      break;
    }
  }
  index_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() {
  if (index_ == 4) {
    refill();
  }
  return buffer_[index_++];
}

} // namespace bridgekit
