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
#include <limits>
#include <random>
#include <string_view>

namespace popsim {

/// SplitMix64 generator. Small state, cheap to seed, so every Monte Carlo task
/// can own a private stream derived from the master seed.
class SplitMix64
{
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept
    : state_{seed}
  {}

  static constexpr result_type min() noexcept
  {
    return 0;
  }
  static constexpr result_type max() noexcept
  {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

private:
  std::uint64_t state_;
};

/// Stafford variant-13 finalizer used by SplitMix64.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Stable seed derivation:
///   derive_seed(m, tag, i) = mix64(mix64(m ^ fnv1a64(tag)) + mix64(i + 0x9e3779b97f4a7c15))
/// The result depends only on its arguments, never on thread count or
/// scheduling. Changing this function changes every generated dataset.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) noexcept;

/// Source of Gaussian samples for noisy evaluation.
class NoiseSource
{
public:
  explicit NoiseSource(std::uint64_t seed)
    : engine_{seed}
  {}

  double gaussian(double sigma)
  {
    return sigma * normal_(engine_);
  }

  SplitMix64 &engine() noexcept
  {
    return engine_;
  }

private:
  SplitMix64                       engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace popsim
