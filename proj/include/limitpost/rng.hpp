#pragma once

#include <array>
#include <cstdint>

namespace limitpost {

// Philox4x32-10 counter-based generator. Each (seed, stream_id, counter)
// maps to four independent 32-bit words, so any draw is addressable directly.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  // Uniform in the open interval (0, 1); lane in {0,1,2,3}.
  double uniform(std::uint64_t step, unsigned lane = 0) const noexcept;
  // Standard normal via Box-Muller on lanes (0,1) of `step`.
  double normal(std::uint64_t step) const noexcept;
  // Two independent standard normals from the same counter block.
  std::array<double, 2> normal_pair(std::uint64_t step) const noexcept;

  RngStream substream(std::uint64_t salt) const noexcept;
};

}  // namespace limitpost
