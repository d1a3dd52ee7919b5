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

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "popsim/apuf.hpp"
#include "popsim/pop.hpp"

namespace popsim {

struct CurvePoint
{
  unsigned index{0};
  double   value{0.0};
  double   std_error{0.0};
};

// ---------------------------------------------------------------------------
// Probability of output change
// ---------------------------------------------------------------------------

/// Mismatch patterns for a width: HW 1 gives e = (1 << s) for s in [0, W);
/// HW 2 gives adjacent pairs (s, s+1) for s in [0, W-1), plus the wrapped pair
/// (W-1, 0) when `wrap` is set.
std::vector<Challenge> mismatch_patterns(unsigned width, unsigned hw, bool wrap = false);

struct SacConfig
{
  unsigned      apuf_size{64};
  unsigned      hw{1};
  unsigned      n_instances{100};
  unsigned      n_challenges{10000};
  std::uint64_t seed{0};
  bool          wrap{false};
  double        stage_sigma{1.0};
  WeightModel   model{WeightModel::kStageDelays};
  unsigned      threads{1};

  void validate() const;
};

/// Per-pattern fraction of `challenges` whose noiseless response changes after
/// XOR with the pattern. Uses the prefix-sum identity for the flipped delay
/// terms instead of re-evaluating.
std::vector<double> output_change_rates(ApufInstance const &inst, unsigned hw, bool wrap,
                                        std::span<Challenge const> challenges);

/// Same, enumerating all 2^n challenges (n <= 24).
std::vector<double> output_change_rates_exhaustive(ApufInstance const &inst, unsigned hw, bool wrap);

/// Same quantities for an arbitrary challenge function of `width` bits (for
/// instance a POP composition), by direct re-evaluation.
std::vector<double> output_change_rates(std::function<ResponseBit(Challenge const &)> const &evaluator, unsigned width,
                                        unsigned hw, bool wrap, std::span<Challenge const> challenges);
std::vector<double> output_change_rates_exhaustive(std::function<ResponseBit(Challenge const &)> const &evaluator,
                                                   unsigned width, unsigned hw, bool wrap);

/// Curve over pattern shifts. value = mean over instances; std_error = spread
/// of per-instance rates / sqrt(instances) (binomial error over challenges when
/// there is a single instance). Instance m uses seed derive_seed(seed, "sac", m).
std::vector<CurvePoint> sac_curve(SacConfig const &config);

/// Mean over shifts of sac_curve (one estimate per instance, then averaged).
CurvePoint sac_mean(SacConfig const &config);

// ---------------------------------------------------------------------------
// Stage bias
// ---------------------------------------------------------------------------

using ChallengeEvaluator = std::function<ResponseBit(Challenge const &)>;

/// Accumulators y, n of size (2, CW). bias(t, j) = y[t][j] / n[t][j], or empty
/// when no challenge with c_j = t was seen.
class StageBiasMatrix
{
public:
  explicit StageBiasMatrix(unsigned width);

  /// Observer of the inner loop: called with (j, p) after p has been updated
  /// for stage j.
  using StageObserver = std::function<void(unsigned, int)>;

  void accumulate(Challenge const &c, ResponseBit r, StageObserver const *observer = nullptr);

  unsigned width() const noexcept
  {
    return width_;
  }
  std::uint64_t challenges() const noexcept
  {
    return challenges_;
  }
  std::uint64_t count(int t, unsigned j) const
  {
    return counts_[static_cast<std::size_t>(t)].at(j);
  }
  double sum(int t, unsigned j) const
  {
    return sums_[static_cast<std::size_t>(t)].at(j);
  }

  std::optional<double> bias(int t, unsigned j) const;

  /// All present entries, row-major (t = 0 row first).
  std::vector<double> entries() const;

private:
  unsigned                           width_;
  std::uint64_t                      challenges_{0};
  std::array<std::vector<double>, 2> sums_;
  std::array<std::vector<std::uint64_t>, 2> counts_;
};

StageBiasMatrix stage_bias(ChallengeEvaluator const &evaluator, unsigned width, std::uint64_t n_challenges,
                           std::uint64_t seed);
StageBiasMatrix stage_bias_exhaustive(ChallengeEvaluator const &evaluator, unsigned width);

struct StageBiasSummary
{
  std::vector<double> samples;
  double              mean{0.0};
  double              stddev{0.0};
  std::uint64_t       absent{0};
};

/// Pools every matrix entry of n_instances fresh APUFs (instance m seeded by
/// derive_seed(seed, "stage-bias", m)); stddev is the population standard
/// deviation. Exhaustive enumeration replaces sampling when `exhaustive`.
StageBiasSummary stage_bias_distribution(unsigned apuf_size, unsigned n_instances, std::uint64_t n_crps,
                                         std::uint64_t seed, bool exhaustive = false, double stage_sigma = 1.0,
                                         WeightModel model = WeightModel::kStageDelays, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Hamming distance of intermediate (first-layer) responses
// ---------------------------------------------------------------------------

struct HdConfig
{
  PopConfig     pop{};
  unsigned      n_instances{20};
  unsigned      n_challenges{1000};
  std::uint64_t seed{0};
  unsigned      threads{1};

  void validate() const;
};

struct RoundPairDistance
{
  unsigned from_round{0};
  unsigned to_round{0};
  double   distance{0.0};
  double   std_error{0.0};
};

/// Distance between consecutive first-layer outputs for the same challenge,
/// for round pairs (1,2) ... (R-1,R) with R = pop.rounds >= 2.
std::vector<RoundPairDistance> interround_hd(HdConfig const &config);

/// Distance between first-layer outputs of independent challenge pairs after
/// each listed round count. CurvePoint::index is the round count.
std::vector<CurvePoint> cross_challenge_hd(HdConfig const &config, std::span<unsigned const> rounds);

}  // namespace popsim
