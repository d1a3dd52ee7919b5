//------------------------------------------------------------------------------
//
//   Copyright 2026 The popsim Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "popsim/random.hpp"

namespace popsim {

using ResponseBit = std::uint8_t;

inline constexpr unsigned kMaxWidth = 64;

/// A W-bit challenge (c_0 ... c_{W-1}), 1 <= W <= 64. Bit c_i lives in bit i
/// of the packed word; c_0 is the stage farthest from the arbiter.
class Challenge
{
public:
  Challenge() = default;
  explicit Challenge(unsigned width, std::uint64_t word = 0);

  static Challenge from_bits(std::span<std::uint8_t const> bits);

  /// Uniform draw from {0,1}^W.
  template <typename Urbg>
  static Challenge random(unsigned width, Urbg &rng)
  {
    std::uint64_t const w = static_cast<std::uint64_t>(rng());
    return Challenge(width, w & mask_for(width));
  }

  /// Hex text, big-endian, c_0 as the most significant of the W bits.
  /// ceil(W/4) digits, lowercase.
  std::string      to_hex() const;
  static Challenge from_hex(std::string_view text, unsigned width);

  unsigned width() const noexcept
  {
    return width_;
  }
  std::uint64_t word() const noexcept
  {
    return word_;
  }

  int operator[](unsigned i) const noexcept
  {
    return static_cast<int>((word_ >> i) & 1u);
  }

  void set(unsigned i, int value);
  void flip(unsigned i);

  unsigned hamming_weight() const noexcept;

  Challenge operator^(Challenge const &other) const;

  friend bool operator==(Challenge const &, Challenge const &) = default;

  static constexpr std::uint64_t mask_for(unsigned width) noexcept
  {
    return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
  }

private:
  std::uint64_t word_{0};
  unsigned      width_{0};
};

unsigned hamming_distance(Challenge const &a, Challenge const &b);

}  // namespace popsim
