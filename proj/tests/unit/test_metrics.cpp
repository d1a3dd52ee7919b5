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

#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "popsim/error.hpp"
#include "popsim/metrics.hpp"

using namespace popsim;

TEST_CASE("uniformity")
{
  CHECK(uniformity(BitSequence{1, 1, 1, 1}) == 1.0);
  CHECK(uniformity(BitSequence{0, 1, 0, 1}) == 0.5);
  CHECK_THROWS_AS(uniformity(BitSequence{}), ValidationError);

  auto const inst = new_instance(64, 1.0, 12);
  SplitMix64 rng(4);
  BitSequence r;
  for (int t = 0; t < 10000; ++t)
  {
    r.push_back(inst.response(Challenge::random(64, rng)));
  }
  CHECK(std::abs(uniformity(r) - 0.5) < 0.02);
}

TEST_CASE("uniqueness")
{
  BitSequence const a{0, 1, 1, 0, 1};
  BitSequence const na{1, 0, 0, 1, 0};
  CHECK(uniqueness(std::vector<BitSequence>{a, a}) == 0.0);
  CHECK(uniqueness(std::vector<BitSequence>{a, na}) == 1.0);
  CHECK(uniqueness(std::vector<BitSequence>{a, na, a}) == doctest::Approx(2.0 / 3.0));
  CHECK(uniqueness(std::vector<BitSequence>{na, a, a}) == uniqueness(std::vector<BitSequence>{a, a, na}));
  CHECK_THROWS_AS(uniqueness(std::vector<BitSequence>{a}), ValidationError);
  CHECK_THROWS_AS(uniqueness(std::vector<BitSequence>{a, BitSequence{0, 1}}), ValidationError);

  SplitMix64               rng(6);
  std::vector<Challenge>   challenges;
  for (int t = 0; t < 5000; ++t)
  {
    challenges.push_back(Challenge::random(64, rng));
  }
  std::vector<BitSequence> responses;
  for (unsigned s = 0; s < 10; ++s)
  {
    auto const  inst = new_instance(64, 1.0, derive_seed(3, "u", s));
    BitSequence r;
    for (auto const &c : challenges)
    {
      r.push_back(inst.response(c));
    }
    responses.push_back(std::move(r));
  }
  CHECK(std::abs(uniqueness(responses) - 0.5) < 0.02);
}

TEST_CASE("bit error rate")
{
  BitSequence enrolled(100, 0);
  CHECK(ber(enrolled, std::vector<BitSequence>{enrolled}) == 0.0);
  BitSequence one_flip = enrolled;
  one_flip[17]         = 1;
  CHECK(ber(enrolled, std::vector<BitSequence>{one_flip}) == doctest::Approx(0.01));
  CHECK_THROWS_AS(ber(enrolled, std::vector<BitSequence>{BitSequence(99, 0)}), ValidationError);

  SplitMix64                            rng(10);
  std::bernoulli_distribution           flip(0.1);
  std::uniform_int_distribution<int>    bit(0, 1);
  BitSequence                           base(5000);
  for (auto &b : base)
  {
    b = static_cast<ResponseBit>(bit(rng));
  }
  std::vector<BitSequence> re(100, base);
  for (auto &seq : re)
  {
    for (auto &b : seq)
    {
      b ^= flip(rng) ? 1 : 0;
    }
  }
  CHECK(std::abs(ber(base, re) - 0.1) < 0.005);
}

TEST_CASE("normalized hamming distance")
{
  CHECK(normalized_hamming_distance(BitSequence{0, 0, 1, 1}, BitSequence{0, 1, 1, 0}) == 0.5);
  CHECK_THROWS_AS(normalized_hamming_distance(BitSequence{0}, BitSequence{0, 1}), ValidationError);
}

TEST_CASE("authentication threshold")
{
  CHECK(AuthPolicy{200, 0.1, 0.05}.threshold() == 170);
  CHECK(AuthPolicy{350, 0.2, 0.05}.threshold() == 263);
  CHECK(AuthPolicy{400, 0.3, 0.05}.threshold() == 260);
  CHECK(AuthPolicy{100, 0.0, 0.05}.threshold() == 95);
  CHECK_THROWS_AS((AuthPolicy{10, 0.9, 0.2}.validate()), ValidationError);
  CHECK_THROWS_AS((AuthPolicy{0, 0.1, 0.05}.validate()), ValidationError);
}

TEST_CASE("exact failure probability against the binomial oracle")
{
  CHECK(auth_failure_exact(AuthPolicy{2, 0.0, 0.0}, 0.5) == doctest::Approx(0.75));
  AuthPolicy const one{1, 0.0, 0.0};
  CHECK(one.threshold() == 1);
  CHECK(auth_failure_exact(one, 0.0) == 0.0);

  struct Point
  {
    unsigned n;
    double   ber;
    double   frozen;
  };
  for (auto const &p : {Point{200, 0.1, 0.00950831194697}, Point{350, 0.2, 0.0111365640079},
                        Point{400, 0.3, 0.0135319716004}})
  {
    AuthPolicy const policy{p.n, p.ber, 0.05};
    double const     exact = auth_failure_exact(policy, p.ber);
    CHECK(exact == doctest::Approx(p.frozen).epsilon(1e-8));
    CHECK(exact == doctest::Approx(oracle::binomial_below(p.n, 1.0 - p.ber, policy.threshold())).epsilon(1e-8));
  }
}

TEST_CASE("Monte Carlo failure probability")
{
  CHECK(auth_failure_prob(AuthPolicy{100, 0.0, 0.05}, 0.0, 10000, 1).value == 0.0);

  AuthPolicy const policy{200, 0.1, 0.05};
  auto const       mc = auth_failure_prob(policy, 0.1, 200000, 3);
  CHECK(mc.samples == 200000);
  CHECK(std::abs(mc.value - auth_failure_exact(policy, 0.1)) < 3 * mc.std_error);
  CHECK(std::abs(mc.value - 0.0095) < 0.002);

  auto const a = auth_failure_prob(policy, 0.1, 150000, 9, 1);
  auto const b = auth_failure_prob(policy, 0.1, 150000, 9, 4);
  CHECK(a.value == b.value);
  CHECK_THROWS_AS(auth_failure_prob(policy, 0.1, 0, 1), ValidationError);
}

TEST_CASE("failure probability falls with the CRP count")
{
  for (double ber : {0.1, 0.2, 0.3})
  {
    double previous = 1.0;
    for (unsigned n = 50; n <= 500; n += 50)
    {
      double const p = auth_failure_exact(AuthPolicy{n, ber, 0.05}, ber);
      CHECK(p <= previous + 1e-15);
      previous = p;
    }
  }
}

TEST_CASE("POP BER is zero without noise and grows with noise")
{
  PopConfig cfg;
  cfg.first_layer_stages = 8;
  cfg.master_seed        = 5;
  CHECK(pop_ber(cfg, NoiseModel{}, 200, 5, 1).value == 0.0);
  auto const low  = pop_ber(cfg, NoiseModel{0.05, 1}, 500, 10, 1);
  auto const high = pop_ber(cfg, NoiseModel{0.3, 1}, 500, 10, 1);
  CHECK(low.value > 0.0);
  CHECK(high.value > low.value);
  CHECK(pop_ber(cfg, NoiseModel{0.1, 1}, 300, 5, 2, 1).value == pop_ber(cfg, NoiseModel{0.1, 1}, 300, 5, 2, 3).value);
}
