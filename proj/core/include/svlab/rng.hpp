#pragma once

// Counter-based Philox4x32-10. Every random number is a pure function of
// (master seed, path, step, block), so ensembles do not depend on how paths
// are scheduled across threads.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace svlab {

using Philox4x32 = std::array<std::uint32_t, 4>;

namespace detail {

inline void philox_round(Philox4x32& ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint64_t m0 = 0xD2511F53u;
  constexpr std::uint64_t m1 = 0xCD9E8D57u;
  const std::uint64_t p0 = m0 * ctr[0];
  const std::uint64_t p1 = m1 * ctr[2];
  ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
         std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
}

}  // namespace detail

inline Philox4x32 philox4x32_10(Philox4x32 ctr, std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    detail::philox_round(ctr, key);
  }
  return ctr;
}

/// Step index reserved for initial-condition draws.
inline constexpr std::uint32_t kInitialStep = 0xFFFFFFFFu;

/// Stream of variates for one (seed, path) pair.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
        path_lo_(std::uint32_t(path)),
        path_hi_(std::uint32_t(path >> 32)) {}

  Philox4x32 block(std::uint32_t step, std::uint32_t index) const {
    return philox4x32_10({index, step, path_lo_, path_hi_}, key_);
  }

  /// Uniforms in [0, 1) with 53 random bits, two per block.
  void uniforms(std::uint32_t step, std::span<double> out) const {
    for (std::size_t i = 0; i < out.size(); i += 2) {
      const Philox4x32 b = block(step, std::uint32_t(i / 2));
      out[i] = to_unit(b[0], b[1]);
      if (i + 1 < out.size()) out[i + 1] = to_unit(b[2], b[3]);
    }
  }

  /// Standard normals by Box–Muller, two per block.
  void normals(std::uint32_t step, std::span<double> out) const {
    for (std::size_t i = 0; i < out.size(); i += 2) {
      const Philox4x32 b = block(step, std::uint32_t(i / 2));
      const double u1 = 1.0 - to_unit(b[0], b[1]);  // (0, 1]
      const double u2 = to_unit(b[2], b[3]);
      const double r = std::sqrt(-2.0 * std::log(u1));
      const double a = 2.0 * std::numbers::pi * u2;
      out[i] = r * std::cos(a);
      if (i + 1 < out.size()) out[i + 1] = r * std::sin(a);
    }
  }

  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (std::uint64_t(hi >> 5) << 26) | std::uint64_t(lo >> 6);
    return double(bits) * 0x1.0p-53;
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
};

}  // namespace svlab
