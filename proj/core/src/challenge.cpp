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

#include "popsim/challenge.hpp"

#include <bit>

#include "popsim/error.hpp"

namespace popsim {

namespace {

void check_width(unsigned width)
{
  detail::require(width >= 1 && width <= kMaxWidth, [&] { return "challenge width must be in [1, 64], got " + std::to_string(width); });
}

int hex_value(char ch)
{
  if (ch >= '0' && ch <= '9')
  {
    return ch - '0';
  }
  if (ch >= 'a' && ch <= 'f')
  {
    return ch - 'a' + 10;
  }
  if (ch >= 'A' && ch <= 'F')
  {
    return ch - 'A' + 10;
  }
  return -1;
}

}  // namespace

Challenge::Challenge(unsigned width, std::uint64_t word)
  : word_{word}
  , width_{width}
{
  check_width(width);
  detail::require((word & ~mask_for(width)) == 0, "challenge word has bits set beyond its width");
}

Challenge Challenge::from_bits(std::span<std::uint8_t const> bits)
{
  check_width(static_cast<unsigned>(bits.size()));
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
  {
    detail::require(bits[i] <= 1, "challenge bits must be 0 or 1");
    word |= std::uint64_t{bits[i]} << i;
  }
  return Challenge(static_cast<unsigned>(bits.size()), word);
}

std::string Challenge::to_hex() const
{
  // value = sum c_i * 2^(W-1-i)
  std::uint64_t value = 0;
  for (unsigned i = 0; i < width_; ++i)
  {
    value = (value << 1) | ((word_ >> i) & 1u);
  }
  unsigned const digits = (width_ + 3) / 4;
  std::string    out(digits, '0');
  static constexpr char kDigits[] = "0123456789abcdef";
  for (unsigned d = 0; d < digits; ++d)
  {
    out[digits - 1 - d] = kDigits[(value >> (4 * d)) & 0xf];
  }
  return out;
}

Challenge Challenge::from_hex(std::string_view text, unsigned width)
{
  check_width(width);
  unsigned const digits = (width + 3) / 4;
  detail::require(text.size() == digits, [&] { return "challenge hex must have " + std::to_string(digits) + " digits, got " +
                                             std::to_string(text.size()); });
  std::uint64_t value = 0;
  for (char ch : text)
  {
    int const v = hex_value(ch);
    detail::require(v >= 0, [&] { return std::string("invalid hex digit '") + ch + "'"; });
    value = (value << 4) | static_cast<std::uint64_t>(v);
  }
  detail::require((value & ~mask_for(width)) == 0, "challenge hex value exceeds the challenge width");
  std::uint64_t word = 0;
  for (unsigned i = 0; i < width; ++i)
  {
    word |= ((value >> (width - 1 - i)) & 1u) << i;
  }
  return Challenge(width, word);
}

void Challenge::set(unsigned i, int value)
{
  detail::require(i < width_, "challenge bit index out of range");
  detail::require(value == 0 || value == 1, "challenge bits must be 0 or 1");
  word_ = (word_ & ~(std::uint64_t{1} << i)) | (std::uint64_t(value) << i);
}

void Challenge::flip(unsigned i)
{
  detail::require(i < width_, "challenge bit index out of range");
  word_ ^= std::uint64_t{1} << i;
}

unsigned Challenge::hamming_weight() const noexcept
{
  return static_cast<unsigned>(std::popcount(word_));
}

Challenge Challenge::operator^(Challenge const &other) const
{
  detail::require(width_ == other.width_, "challenge width mismatch in xor");
  return Challenge(width_, word_ ^ other.word_);
}

unsigned hamming_distance(Challenge const &a, Challenge const &b)
{
  return (a ^ b).hamming_weight();
}

}  // namespace popsim
