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

#include "popsim/apuf.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <string>

#include "popsim/error.hpp"

namespace popsim {

std::string_view to_string(WeightModel model)
{
  switch (model)
  {
  case WeightModel::kStageDelays:
    return "stage-delays";
  case WeightModel::kIndependent:
    return "independent";
  }
  return "unknown";
}

WeightModel weight_model_from_string(std::string_view text)
{
  if (text == "stage-delays" || text == "delays")
  {
    return WeightModel::kStageDelays;
  }
  if (text == "independent" || text == "iid")
  {
    return WeightModel::kIndependent;
  }
  throw ValidationError("unknown weight model '" + std::string(text) + "'");
}

void ApufParams::validate() const
{
  detail::require(n_stages >= 1 && n_stages <= kMaxWidth, "n_stages must be in [1, 64]");
  detail::require(std::isfinite(stage_sigma) && stage_sigma > 0.0, "stage_sigma must be positive");
}

FeatureVector features(Challenge const &c)
{
  unsigned const n = c.width();
  FeatureVector  phi(n + 1, 1.0);
  for (unsigned i = n; i-- > 0;)
  {
    phi[i] = c[i] ? -phi[i + 1] : phi[i + 1];
  }
  return phi;
}

ApufInstance ApufInstance::generate(ApufParams const &params)
{
  params.validate();
  unsigned const             n = params.n_stages;
  SplitMix64                 rng(params.instance_seed);
  std::vector<double>        weights(n + 1, 0.0);

  if (params.model == WeightModel::kIndependent)
  {
    std::normal_distribution<double> normal(0.0, params.stage_sigma);
    for (auto &w : weights)
    {
      w = normal(rng);
    }
  }
  else
  {
    // Four path delays per stage: straight top/bottom, crossed top/bottom.
    // Interior weights a_i + b_{i-1} then have variance stage_sigma^2.
    std::normal_distribution<double> delay(0.0, params.stage_sigma / std::sqrt(2.0));
    for (unsigned i = 0; i < n; ++i)
    {
      double const straight_top    = delay(rng);
      double const straight_bottom = delay(rng);
      double const cross_top       = delay(rng);
      double const cross_bottom    = delay(rng);
      double const a = 0.5 * (straight_top - straight_bottom + cross_top - cross_bottom);
      double const b = 0.5 * (straight_top - straight_bottom - cross_top + cross_bottom);
      weights[i] += a;
      weights[i + 1] += b;
    }
  }
  return ApufInstance(params, std::move(weights));
}

ApufInstance ApufInstance::from_weights(std::vector<double> weights)
{
  detail::require(weights.size() >= 2 && weights.size() <= kMaxWidth + 1, "weight vector length must be in [2, 65]");
  for (double w : weights)
  {
    detail::require(std::isfinite(w), "weights must be finite");
  }
  ApufParams params;
  params.n_stages = static_cast<unsigned>(weights.size() - 1);
  return ApufInstance(params, std::move(weights));
}

double ApufInstance::delay_difference(Challenge const &c) const
{
  unsigned const n = n_stages();
  detail::require(c.width() == n, [&] { return "challenge width " + std::to_string(c.width()) + " does not match " +
                                      std::to_string(n) + "-stage APUF"; });
  std::uint64_t const word  = c.word();
  double              sign  = 1.0;
  double              delta = weights_[n];
  for (unsigned i = n; i-- > 0;)
  {
    if ((word >> i) & 1u)
    {
      sign = -sign;
    }
    delta += weights_[i] * sign;
  }
  return delta;
}

double delay_difference(ApufInstance const &inst, Challenge const &c)
{
  return inst.delay_difference(c);
}

void NoiseModel::validate() const
{
  detail::require(std::isfinite(sigma_noise) && sigma_noise >= 0.0, "sigma_noise must be non-negative");
}

void TmvConfig::validate() const
{
  detail::require(votes >= 1 && votes % 2 == 1, [&] { return "TMV votes must be a positive odd number, got " +
                                                    std::to_string(votes); });
}

ResponseBit evaluate(ApufInstance const &inst, Challenge const &c, NoiseModel const &noise, NoiseSource &draw)
{
  double delta = inst.delay_difference(c);
  if (!noise.noiseless())
  {
    delta += draw.gaussian(noise.sigma_noise);
  }
  return delta < 0.0 ? 1 : 0;
}

ResponseBit evaluate_tmv(ApufInstance const &inst, Challenge const &c, NoiseModel const &noise,
                         TmvConfig const &tmv, NoiseSource &draw)
{
  tmv.validate();
  if (noise.noiseless() || tmv.votes == 1)
  {
    return evaluate(inst, c, noise, draw);
  }
  double const delta = inst.delay_difference(c);
  unsigned     ones  = 0;
  for (unsigned v = 0; v < tmv.votes; ++v)
  {
    ones += (delta + draw.gaussian(noise.sigma_noise)) < 0.0 ? 1u : 0u;
  }
  return ones * 2 > tmv.votes ? 1 : 0;
}

int parity(Challenge const &c, unsigned i)
{
  detail::require(i < c.width(), "parity stage index out of range");
  std::uint64_t const above = i + 1 >= 64 ? 0 : (c.word() >> (i + 1));
  return static_cast<int>(std::popcount(above) & 1);
}

}  // namespace popsim
