// Copyright 2026 The qkdrate Authors
// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random streams: the stream for packet i depends only on
// (seed, i), so any partition of the packet range yields the same draws.

#pragma once

#include <cstdint>

namespace qkd::sim {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class PacketRng {
 public:
  PacketRng(std::uint64_t seed, std::uint64_t index) : state_(mix64(mix64(seed ^ kSeedSalt) + index)) {}

  std::uint64_t next() {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); multiply-shift on the top 32 bits.
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(((next() >> 32) * static_cast<std::uint64_t>(n)) >> 32);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSeedSalt = 0x6a09e667f3bcc909ULL;
  std::uint64_t state_;
};

}  // namespace qkd::sim
