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

#include "popsim/pop.hpp"

#include <string>

#include "popsim/error.hpp"

namespace popsim {

void PopConfig::validate() const
{
  detail::require(width >= 1 && width <= kMaxWidth, "width must be in [1, 64]");
  detail::require(first_layer_stages >= 1 && first_layer_stages <= width,
                  "first-layer stages k must satisfy 1 <= k <= width");
  detail::require(rounds >= 1, "rounds must be >= 1");
  tmv.validate();
  detail::require(stage_sigma > 0.0, "stage_sigma must be positive");
}

std::vector<unsigned> wiring(unsigned i, unsigned k, unsigned width)
{
  detail::require(width >= 1 && k >= 1 && k <= width, "wiring requires 1 <= k <= width");
  detail::require(i < width, [&] { return "instance index " + std::to_string(i) + " out of range for width " +
                                 std::to_string(width); });
  std::vector<unsigned> bits(k);
  for (unsigned j = 0; j < k; ++j)
  {
    bits[j] = (i + j) % width;
  }
  return bits;
}

std::uint64_t first_layer_seed(std::uint64_t master_seed, unsigned i) noexcept
{
  return derive_seed(master_seed, "L1", i);
}

std::uint64_t second_layer_seed(std::uint64_t master_seed) noexcept
{
  return derive_seed(master_seed, "L2", 0);
}

PopInstance PopInstance::build(PopConfig const &config)
{
  config.validate();
  std::vector<ApufInstance> first;
  first.reserve(config.width);
  for (unsigned i = 0; i < config.width; ++i)
  {
    first.push_back(ApufInstance::generate(
        {config.first_layer_stages, config.stage_sigma, first_layer_seed(config.master_seed, i), config.model}));
  }
  auto second = ApufInstance::generate(
      {config.width, config.stage_sigma, second_layer_seed(config.master_seed), config.model});
  return PopInstance(config, std::move(first), std::move(second));
}

PopInstance PopInstance::from_layers(PopConfig const &config, std::vector<ApufInstance> first_layer,
                                     ApufInstance second_layer)
{
  config.validate();
  detail::require(first_layer.size() == config.width, "first layer must hold one APUF per challenge bit");
  for (auto const &inst : first_layer)
  {
    detail::require(inst.n_stages() == config.first_layer_stages, "all first-layer APUFs must have k stages");
  }
  detail::require(second_layer.n_stages() == config.width, "second-layer APUF must have W stages");
  return PopInstance(config, std::move(first_layer), std::move(second_layer));
}

Challenge PopInstance::local_challenge(unsigned i, Challenge const &c) const
{
  unsigned const width = config_.width;
  unsigned const k     = config_.first_layer_stages;
  detail::require(c.width() == width, [&] { return "challenge width " + std::to_string(c.width()) +
                                          " does not match POP width " + std::to_string(width); });
  detail::require(i < width, "first-layer index out of range");
  // Rotate right by i so that bit (i + j) mod W lands at position j.
  std::uint64_t const word    = c.word();
  std::uint64_t       rotated = word;
  if (i != 0)
  {
    rotated = ((word >> i) | (word << (width - i))) & Challenge::mask_for(width);
  }
  return Challenge(k, rotated & Challenge::mask_for(k));
}

Challenge PopInstance::first_layer_response(Challenge const &c) const
{
  std::uint64_t out = 0;
  for (unsigned i = 0; i < config_.width; ++i)
  {
    out |= std::uint64_t{first_layer_[i].response(local_challenge(i, c))} << i;
  }
  return Challenge(config_.width, out);
}

std::vector<Challenge> PopInstance::round_trajectory(Challenge const &c, unsigned rounds) const
{
  std::vector<Challenge> trajectory;
  trajectory.reserve(rounds);
  Challenge reg = c;
  for (unsigned r = 0; r < rounds; ++r)
  {
    reg = first_layer_response(reg);
    trajectory.push_back(reg);
  }
  return trajectory;
}

ResponseBit PopInstance::response(Challenge const &c) const
{
  Challenge reg = c;
  for (unsigned r = 0; r < config_.rounds; ++r)
  {
    reg = first_layer_response(reg);
  }
  return second_layer_.response(reg);
}

Challenge first_layer_eval(PopInstance const &pop, Challenge const &c, NoiseModel const &noise, NoiseSource &draw)
{
  auto const   &cfg = pop.config();
  std::uint64_t out = 0;
  for (unsigned i = 0; i < cfg.width; ++i)
  {
    ResponseBit const bit = evaluate_tmv(pop.first_layer()[i], pop.local_challenge(i, c), noise, cfg.tmv, draw);
    out |= std::uint64_t{bit} << i;
  }
  return Challenge(cfg.width, out);
}

ResponseBit evaluate_pop(PopInstance const &pop, Challenge const &c, NoiseModel const &noise, NoiseSource &draw)
{
  auto const &cfg = pop.config();
  detail::require(c.width() == cfg.width, "challenge width does not match POP width");
  Challenge reg = c;
  for (unsigned r = 0; r < cfg.rounds; ++r)
  {
    reg = first_layer_eval(pop, reg, noise, draw);
  }
  return evaluate_tmv(pop.second_layer(), reg, noise, cfg.tmv, draw);
}

}  // namespace popsim
