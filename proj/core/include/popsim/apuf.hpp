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
#include <string_view>
#include <vector>

#include "popsim/challenge.hpp"
#include "popsim/random.hpp"

namespace popsim {

/// How per-stage randomness is mapped onto the (n+1) linear weights.
enum class WeightModel
{
  /// Four normal path delays per stage folded into the linear model:
  /// w_0 = a_0, w_i = a_i + b_{i-1}, w_n = b_{n-1}. Interior weights have
  /// standard deviation stage_sigma, the two end weights stage_sigma/sqrt(2).
  kStageDelays,
  /// Every weight i.i.d. Normal(0, stage_sigma^2).
  kIndependent,
};

std::string_view to_string(WeightModel model);
WeightModel      weight_model_from_string(std::string_view text);

/// Everything needed to regenerate an instance bit-for-bit.
struct ApufParams
{
  unsigned      n_stages{64};
  double        stage_sigma{1.0};
  std::uint64_t instance_seed{0};
  WeightModel   model{WeightModel::kStageDelays};

  void validate() const;
};

/// +1/-1 feature transform of a challenge, length n+1, last entry always +1.
using FeatureVector = std::vector<double>;

FeatureVector features(Challenge const &c);

/// Arbiter PUF in the additive linear delay model. Immutable once built.
class ApufInstance
{
public:
  static ApufInstance generate(ApufParams const &params);

  /// Wraps an explicit weight vector (length n_stages+1); used for fixtures.
  static ApufInstance from_weights(std::vector<double> weights);

  unsigned n_stages() const noexcept
  {
    return static_cast<unsigned>(weights_.size() - 1);
  }
  std::span<double const> weights() const noexcept
  {
    return weights_;
  }
  ApufParams const &params() const noexcept
  {
    return params_;
  }

  /// weights . features(c), computed without materializing the features.
  double delay_difference(Challenge const &c) const;

  /// Noiseless response: 1 iff the delay difference is negative.
  ResponseBit response(Challenge const &c) const
  {
    return delay_difference(c) < 0.0 ? 1 : 0;
  }

private:
  ApufInstance(ApufParams params, std::vector<double> weights)
    : params_{params}
    , weights_{std::move(weights)}
  {}

  ApufParams          params_;
  std::vector<double> weights_;
};

inline ApufInstance new_instance(unsigned n_stages, double stage_sigma, std::uint64_t instance_seed,
                                 WeightModel model = WeightModel::kStageDelays)
{
  return ApufInstance::generate({n_stages, stage_sigma, instance_seed, model});
}

double delay_difference(ApufInstance const &inst, Challenge const &c);

/// Zero-mean Gaussian noise added to the delay difference at every evaluation.
struct NoiseModel
{
  double        sigma_noise{0.0};
  std::uint64_t eval_seed{0};

  void validate() const;

  bool noiseless() const noexcept
  {
    return sigma_noise == 0.0;
  }

  NoiseSource make_source() const
  {
    return NoiseSource(eval_seed);
  }
};

/// Temporal majority voting: number of repeated evaluations, odd.
struct TmvConfig
{
  unsigned votes{1};

  void validate() const;
};

/// r = 1 iff delay_difference + eps < 0, eps ~ N(0, sigma_noise^2). A noiseless
/// model draws nothing from `draw`.
ResponseBit evaluate(ApufInstance const &inst, Challenge const &c, NoiseModel const &noise, NoiseSource &draw);

/// Majority over tmv.votes independent evaluations.
ResponseBit evaluate_tmv(ApufInstance const &inst, Challenge const &c, NoiseModel const &noise,
                         TmvConfig const &tmv, NoiseSource &draw);

/// p_i(c) = c_{i+1} xor ... xor c_{n-1}; p_{n-1} = 0.
int parity(Challenge const &c, unsigned i);

}  // namespace popsim
