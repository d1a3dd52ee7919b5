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
#include <vector>

#include "popsim/apuf.hpp"

namespace popsim {

struct PopConfig
{
  unsigned      width{64};
  unsigned      first_layer_stages{8};
  unsigned      rounds{1};
  TmvConfig     tmv{};
  double        stage_sigma{1.0};
  std::uint64_t master_seed{0};
  WeightModel   model{WeightModel::kStageDelays};

  void validate() const;
};

/// Challenge-bit indices feeding stages 0..k-1 of first-layer instance i:
/// (i + j) mod W.
std::vector<unsigned> wiring(unsigned i, unsigned k, unsigned width);

/// Seed of first-layer instance i: derive_seed(master, "L1", i).
/// Seed of the second layer: derive_seed(master, "L2", 0).
std::uint64_t first_layer_seed(std::uint64_t master_seed, unsigned i) noexcept;
std::uint64_t second_layer_seed(std::uint64_t master_seed) noexcept;

/// W first-layer k-APUFs feeding one W-stage second-layer APUF.
class PopInstance
{
public:
  static PopInstance build(PopConfig const &config);

  /// Assembles a composition from explicit layers; config width/k/rounds must
  /// agree with the layer shapes.
  static PopInstance from_layers(PopConfig const &config, std::vector<ApufInstance> first_layer,
                                 ApufInstance second_layer);

  PopConfig const &config() const noexcept
  {
    return config_;
  }
  std::vector<ApufInstance> const &first_layer() const noexcept
  {
    return first_layer_;
  }
  ApufInstance const &second_layer() const noexcept
  {
    return second_layer_;
  }

  /// Sub-challenge seen by first-layer instance i.
  Challenge local_challenge(unsigned i, Challenge const &c) const;

  /// Noiseless single first-layer pass.
  Challenge first_layer_response(Challenge const &c) const;

  /// Noiseless register contents after each round: element r-1 holds the
  /// first-layer output of round r.
  std::vector<Challenge> round_trajectory(Challenge const &c, unsigned rounds) const;

  /// Noiseless final response under config().rounds.
  ResponseBit response(Challenge const &c) const;

private:
  PopInstance(PopConfig config, std::vector<ApufInstance> first_layer, ApufInstance second_layer)
    : config_{config}
    , first_layer_{std::move(first_layer)}
    , second_layer_{std::move(second_layer)}
  {}

  PopConfig                 config_;
  std::vector<ApufInstance> first_layer_;
  ApufInstance              second_layer_;
};

/// Bit i = evaluate_tmv(first_layer[i], local_challenge(i, c)).
Challenge first_layer_eval(PopInstance const &pop, Challenge const &c, NoiseModel const &noise,
                           NoiseSource &draw);

/// register <- c; rounds times register <- first_layer_eval(register);
/// return evaluate_tmv(second_layer, register). Noise applies to every
/// APUF evaluation of every round.
ResponseBit evaluate_pop(PopInstance const &pop, Challenge const &c, NoiseModel const &noise, NoiseSource &draw);

}  // namespace popsim
