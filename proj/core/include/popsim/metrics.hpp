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
#include <vector>

#include "popsim/apuf.hpp"
#include "popsim/pop.hpp"

namespace popsim {

using BitSequence = std::vector<ResponseBit>;

/// Mean of the response bits.
double uniformity(std::span<ResponseBit const> responses);

/// Mean pairwise normalized hamming distance over all unordered pairs of
/// instances evaluated on a shared challenge set.
double uniqueness(std::span<BitSequence const> instance_responses);

/// Mean fraction of bits that differ from the enrolled value, pooled over all
/// re-evaluations.
double ber(std::span<ResponseBit const> enrolled, std::span<BitSequence const> reevaluations);

double normalized_hamming_distance(std::span<ResponseBit const> a, std::span<ResponseBit const> b);

/// Authentication passes when at least threshold() of n_crps responses match.
struct AuthPolicy
{
  unsigned n_crps{200};
  double   ber_assumed{0.1};
  double   margin{0.05};

  /// ceil((1 - ber_assumed - margin) * n_crps), with a 1e-9 guard so that
  /// products like 0.85 * 200 land on 170 rather than 171.
  unsigned threshold() const;

  void validate() const;
};

struct Estimate
{
  double        value{0.0};
  double        std_error{0.0};
  std::uint64_t samples{0};
};

/// Monte Carlo: correct ~ Binomial(n_crps, 1 - true_ber) per trial, failure when
/// correct < threshold. Trials run in fixed blocks with derived seeds, so the
/// estimate does not depend on `threads`.
Estimate auth_failure_prob(AuthPolicy const &policy, double true_ber, std::uint64_t trials, std::uint64_t seed,
                           unsigned threads = 1);

/// Exact P(Binomial(n_crps, 1 - true_ber) < threshold).
double auth_failure_exact(AuthPolicy const &policy, double true_ber);

/// Uniformity and uniqueness of noiseless final POP responses over fresh
/// instances (master seed of instance m: derive_seed(seed, "quality", m)).
struct QualityReport
{
  double uniformity{0.0};
  double uniformity_stderr{0.0};
  double uniqueness{0.0};
  unsigned n_instances{0};
  unsigned n_challenges{0};
};

QualityReport pop_quality(PopConfig const &config, unsigned n_instances, unsigned n_challenges, std::uint64_t seed,
                          unsigned threads = 1);

/// BER of one POP instance: enrollment is a single noisy evaluation per
/// challenge, followed by n_reevaluations noisy re-evaluations. `samples`
/// counts compared bits; std_error is taken over per-challenge mismatch rates.
Estimate pop_ber(PopConfig const &config, NoiseModel const &noise, unsigned n_challenges, unsigned n_reevaluations,
                 std::uint64_t seed, unsigned threads = 1);

}  // namespace popsim
