// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace tsa {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Stateless counter-based generator: the output depends only on
/// (seed, stream, counter), so callers can draw from independent substreams
/// in any order and still reproduce the same values.
constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t stream,
                                     std::uint64_t counter) noexcept {
  std::uint64_t x = mix64(seed);
  x = mix64(x ^ (stream * 0xd1b54a32d192ed03ULL));
  x = mix64(x ^ (counter * 0x8cb92ba72f3d8dd7ULL));
  return x;
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t counter) noexcept {
  return static_cast<double>(counter_bits(seed, stream, counter) >> 11) *
         0x1.0p-53;
}

/// Child seed for trial/chunk `index` of a run seeded with `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept {
  return counter_bits(master, 0x747269616cULL, index);
}

/// Sequential view over one counter-based substream.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream) {}

  double uniform() noexcept { return counter_uniform(seed_, stream_, next_++); }
  std::uint64_t bits() noexcept { return counter_bits(seed_, stream_, next_++); }
  std::uint64_t position() const noexcept { return next_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t next_ = 0;
};

}  // namespace tsa
