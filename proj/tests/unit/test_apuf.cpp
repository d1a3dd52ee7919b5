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
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "popsim/apuf.hpp"
#include "popsim/error.hpp"

using namespace popsim;

TEST_CASE("challenge hex is big-endian with c_0 as the top bit")
{
  Challenge c(8);
  c.set(0, 1);
  CHECK(c.to_hex() == "80");
  c.set(7, 1);
  CHECK(c.to_hex() == "81");
  CHECK(Challenge::from_hex("81", 8) == c);

  Challenge odd(6);
  odd.set(0, 1);
  CHECK(odd.to_hex() == "20");
  CHECK(Challenge::from_hex(odd.to_hex(), 6) == odd);

  CHECK_THROWS_AS(Challenge::from_hex("8", 8), ValidationError);
  CHECK_THROWS_AS(Challenge::from_hex("zz", 8), ValidationError);
  CHECK_THROWS_AS(Challenge(0), ValidationError);
  CHECK_THROWS_AS(Challenge(65), ValidationError);
}

TEST_CASE("hex round trip for every width")
{
  SplitMix64 rng(3);
  for (unsigned w = 1; w <= 64; ++w)
  {
    auto const c = Challenge::random(w, rng);
    CHECK(Challenge::from_hex(c.to_hex(), w) == c);
  }
}

TEST_CASE("features of small challenges")
{
  auto const zero = features(Challenge(5));
  CHECK(zero == FeatureVector(6, 1.0));

  auto const phi = features(testing::challenge({0, 1}));
  CHECK(phi == FeatureVector{-1.0, -1.0, 1.0});
}

TEST_CASE("features match the product definition for all n <= 8")
{
  for (unsigned n = 1; n <= 8; ++n)
  {
    for (std::uint64_t w = 0; w < (1u << n); ++w)
    {
      auto const b   = oracle::bits_of(w, n);
      auto const phi = features(Challenge(n, w));
      REQUIRE(phi == oracle::features(b));
      CHECK(phi[n] == 1.0);
      for (unsigned i = 0; i < n; ++i)
      {
        CHECK(phi[i] == (1 - 2 * b[i]) * phi[i + 1]);
      }
    }
  }
}

TEST_CASE("flipping c_j negates exactly phi_0..phi_j")
{
  SplitMix64 rng(11);
  for (int trial = 0; trial < 50; ++trial)
  {
    auto const c = Challenge::random(16, rng);
    for (unsigned j = 0; j < 16; ++j)
    {
      auto d = c;
      d.flip(j);
      auto const a = features(c);
      auto const b = features(d);
      for (unsigned i = 0; i <= 16; ++i)
      {
        CHECK(b[i] == (i <= j ? -a[i] : a[i]));
      }
    }
  }
}

TEST_CASE("delay difference")
{
  auto const inst = ApufInstance::from_weights({1.0, -2.0, 0.5});
  CHECK(inst.delay_difference(testing::challenge({0, 1})) == doctest::Approx(1.5));
  CHECK(inst.response(testing::challenge({0, 1})) == 0);

  auto const zero = ApufInstance::from_weights(std::vector<double>(9, 0.0));
  for (std::uint64_t w = 0; w < 256; ++w)
  {
    CHECK(zero.delay_difference(Challenge(8, w)) == 0.0);
    CHECK(zero.response(Challenge(8, w)) == 0);
  }
  CHECK_THROWS_AS(inst.delay_difference(Challenge(3)), ValidationError);
}

TEST_CASE("delay difference is linear in the weights")
{
  auto const a  = new_instance(12, 1.0, 1);
  auto const b  = new_instance(12, 1.0, 2);
  auto       ws = testing::weights(a);
  for (std::size_t i = 0; i < ws.size(); ++i)
  {
    ws[i] += b.weights()[i];
  }
  auto const sum = ApufInstance::from_weights(ws);
  SplitMix64 rng(5);
  for (int t = 0; t < 100; ++t)
  {
    auto const c = Challenge::random(12, rng);
    CHECK(sum.delay_difference(c) == doctest::Approx(a.delay_difference(c) + b.delay_difference(c)));
  }
}

TEST_CASE("delay difference agrees with the dot-product oracle")
{
  auto const inst = new_instance(64, 1.0, 99);
  auto const w    = testing::weights(inst);
  SplitMix64 rng(1);
  for (int t = 0; t < 500; ++t)
  {
    auto const c = Challenge::random(64, rng);
    CHECK(inst.delay_difference(c) == doctest::Approx(oracle::delay(w, testing::bits(c))).epsilon(1e-12));
  }
}

TEST_CASE("folded linear model reproduces the explicit signal race")
{
  // delta0/delta1: top-minus-bottom delay of a straight/crossed stage.
  SplitMix64                       rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (unsigned n : {1u, 3u, 8u, 20u})
  {
    std::vector<double> d0(n), d1(n);
    for (unsigned i = 0; i < n; ++i)
    {
      d0[i] = normal(rng);
      d1[i] = normal(rng);
    }
    std::vector<double> w(n + 1, 0.0);
    for (unsigned i = 0; i < n; ++i)
    {
      w[i] += 0.5 * (d0[i] - d1[i]);
      w[i + 1] += 0.5 * (d0[i] + d1[i]);
    }
    auto const inst = ApufInstance::from_weights(w);
    for (int t = 0; t < 200; ++t)
    {
      auto const c = Challenge::random(n, rng);
      CHECK(inst.delay_difference(c) == doctest::Approx(oracle::race(d0, d1, testing::bits(c))));
    }
  }
}

TEST_CASE("instance generation is deterministic and sized")
{
  CHECK(testing::weights(new_instance(2, 1.0, 7)) == testing::weights(new_instance(2, 1.0, 7)));
  CHECK(testing::weights(new_instance(2, 1.0, 7)) != testing::weights(new_instance(2, 1.0, 8)));
  CHECK(new_instance(64, 1.0, 3).weights().size() == 65);
  CHECK(new_instance(64, 1.0, 3, WeightModel::kIndependent).weights().size() == 65);
  CHECK_THROWS_AS(new_instance(0, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(new_instance(4, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(new_instance(4, -1.0, 1), ValidationError);
  CHECK_THROWS_AS(new_instance(65, 1.0, 1), ValidationError);
}

namespace {

struct Moments
{
  std::vector<double> mean, sd;
};

Moments weight_moments(WeightModel model, unsigned n, unsigned count)
{
  std::vector<double> sum(n + 1, 0.0), sq(n + 1, 0.0);
  for (unsigned s = 0; s < count; ++s)
  {
    auto const inst = new_instance(n, 1.0, derive_seed(1234, "moments", s), model);
    for (unsigned i = 0; i <= n; ++i)
    {
      sum[i] += inst.weights()[i];
      sq[i] += inst.weights()[i] * inst.weights()[i];
    }
  }
  Moments m;
  for (unsigned i = 0; i <= n; ++i)
  {
    double const mu = sum[i] / count;
    m.mean.push_back(mu);
    m.sd.push_back(std::sqrt(sq[i] / count - mu * mu));
  }
  return m;
}

}  // namespace

TEST_CASE("independent weights have unit normal moments over 10k instances")
{
  auto const m = weight_moments(WeightModel::kIndependent, 64, 10000);
  for (unsigned i = 0; i <= 64; ++i)
  {
    CHECK(std::abs(m.mean[i]) < 0.05);
    CHECK(std::abs(m.sd[i] - 1.0) < 0.05);
  }
}

TEST_CASE("stage-delay weights: unit interior spread, 1/sqrt(2) at the ends, uncorrelated")
{
  unsigned const n     = 16;
  unsigned const count = 10000;
  auto const     m     = weight_moments(WeightModel::kStageDelays, n, count);
  for (unsigned i = 0; i <= n; ++i)
  {
    double const expected = (i == 0 || i == n) ? std::sqrt(0.5) : 1.0;
    CHECK(std::abs(m.mean[i]) < 0.05);
    CHECK(std::abs(m.sd[i] - expected) < 0.05);
  }
  double cross = 0.0;
  for (unsigned s = 0; s < count; ++s)
  {
    auto const inst = new_instance(n, 1.0, derive_seed(1234, "moments", s));
    cross += inst.weights()[4] * inst.weights()[5];
  }
  CHECK(std::abs(cross / count) < 0.05);
}

TEST_CASE("weight model names")
{
  CHECK(weight_model_from_string("stage-delays") == WeightModel::kStageDelays);
  CHECK(weight_model_from_string("independent") == WeightModel::kIndependent);
  CHECK(to_string(WeightModel::kIndependent) == "independent");
  CHECK_THROWS_AS(weight_model_from_string("gauss"), ValidationError);
}

TEST_CASE("noiseless evaluation")
{
  auto const  bias_only = ApufInstance::from_weights({0, 0, 0, 0, 1.0});
  NoiseSource draw(1);
  for (std::uint64_t w = 0; w < 16; ++w)
  {
    CHECK(evaluate(bias_only, Challenge(4, w), NoiseModel{}, draw) == 0);
  }
  auto const inst = new_instance(32, 1.0, 4);
  SplitMix64 rng(8);
  for (int t = 0; t < 100; ++t)
  {
    auto const c = Challenge::random(32, rng);
    CHECK(evaluate(inst, c, NoiseModel{}, draw) == inst.response(c));
    CHECK(evaluate(inst, c, NoiseModel{}, draw) == evaluate(inst, c, NoiseModel{}, draw));
    for (unsigned votes : {1u, 3u, 15u})
    {
      CHECK(evaluate_tmv(inst, c, NoiseModel{}, TmvConfig{votes}, draw) == inst.response(c));
    }
  }
  CHECK_THROWS_AS(evaluate(inst, Challenge(31), NoiseModel{}, draw), ValidationError);
}

TEST_CASE("gaussian flip probability at unit margin")
{
  // All-zero weights except the bias: delay difference is +1 everywhere.
  auto const       inst = ApufInstance::from_weights({0, 0, 1.0});
  NoiseModel const noise{1.0, 77};
  auto             draw    = noise.make_source();
  int const        trials  = 100000;
  int              flipped = 0;
  for (int t = 0; t < trials; ++t)
  {
    flipped += evaluate(inst, Challenge(2, 0), noise, draw);
  }
  CHECK(std::abs(flipped / double(trials) - oracle::normal_cdf(-1.0)) < 0.01);
  CHECK(oracle::normal_cdf(-1.0) == doctest::Approx(0.158655).epsilon(1e-5));
}

TEST_CASE("TMV with one vote is a plain evaluation")
{
  auto const       inst = new_instance(16, 1.0, 5);
  NoiseModel const noise{0.5, 9};
  SplitMix64       rng(2);
  for (int t = 0; t < 200; ++t)
  {
    auto const c = Challenge::random(16, rng);
    auto       a = noise.make_source();
    auto       b = noise.make_source();
    CHECK(evaluate_tmv(inst, c, noise, TmvConfig{1}, a) == evaluate(inst, c, noise, b));
  }
}

TEST_CASE("TMV majority matches the binomial tail")
{
  // Choose sigma so that a single evaluation is correct with probability 0.9.
  double const     sigma = 1.0 / 1.2815515655446004;
  auto const       inst  = ApufInstance::from_weights({0, 0, 1.0});
  NoiseModel const noise{sigma, 31};
  auto             draw  = noise.make_source();
  int const        trials = 200000;
  int              ok1 = 0, ok15 = 0;
  for (int t = 0; t < trials; ++t)
  {
    ok1 += evaluate(inst, Challenge(2, 0), noise, draw) == 0;
    ok15 += evaluate_tmv(inst, Challenge(2, 0), noise, TmvConfig{15}, draw) == 0;
  }
  double const p15 = 1.0 - oracle::binomial_below(15, 0.9, 8);
  CHECK(p15 == doctest::Approx(0.999966375112).epsilon(1e-9));
  CHECK(std::abs(ok1 / double(trials) - 0.9) < 0.003);
  CHECK(std::abs(ok15 / double(trials) - p15) < 0.001);
}

TEST_CASE("TMV never increases the error rate")
{
  auto const       inst = ApufInstance::from_weights({0, 0, 0.3});
  NoiseModel const noise{1.0, 5};
  auto             draw   = noise.make_source();
  int const        trials = 50000;
  double           q      = 1.0 - oracle::normal_cdf(0.3);
  for (unsigned votes : {1u, 3u, 7u, 15u})
  {
    int errors = 0;
    for (int t = 0; t < trials; ++t)
    {
      errors += evaluate_tmv(inst, Challenge(2, 0), noise, TmvConfig{votes}, draw);
    }
    double exact = 0.0;
    for (unsigned x = votes / 2 + 1; x <= votes; ++x)
    {
      exact += std::exp(std::lgamma(votes + 1.0) - std::lgamma(x + 1.0) - std::lgamma(votes - x + 1.0)) *
               std::pow(q, x) * std::pow(1 - q, votes - x);
    }
    double const rate = errors / double(trials);
    double const se   = std::sqrt(exact * (1 - exact) / trials);
    CHECK(exact <= q + 1e-12);
    CHECK(std::abs(rate - exact) <= 3 * se + 1e-9);
  }
}

TEST_CASE("TMV and noise validation")
{
  CHECK_THROWS_AS(TmvConfig{2}.validate(), ValidationError);
  CHECK_THROWS_AS(TmvConfig{0}.validate(), ValidationError);
  CHECK_NOTHROW(TmvConfig{31}.validate());
  CHECK_THROWS_AS((NoiseModel{-0.1, 0}.validate()), ValidationError);
  auto const  inst = new_instance(4, 1.0, 1);
  NoiseSource draw(0);
  CHECK_THROWS_AS(evaluate_tmv(inst, Challenge(4), NoiseModel{0.1, 0}, TmvConfig{4}, draw), ValidationError);
}

TEST_CASE("parity")
{
  CHECK(parity(testing::challenge({1, 0, 1, 1}), 2) == 1);
  CHECK(parity(Challenge(8), 3) == 0);
  // c5, c6, c7 = 1, 1, 0 holds an even number of ones.
  CHECK(parity(testing::challenge({1, 1, 1, 1, 0, 1, 1, 0}), 4) == 0);
  CHECK_THROWS_AS(parity(Challenge(4), 4), ValidationError);
  for (unsigned n = 1; n <= 8; ++n)
  {
    for (std::uint64_t w = 0; w < (1u << n); ++w)
    {
      Challenge const c(n, w);
      CHECK(parity(c, n - 1) == 0);
      for (unsigned i = 0; i < n; ++i)
      {
        CHECK(parity(c, i) == oracle::parity(testing::bits(c), i));
        if (i + 1 < n)
        {
          CHECK(parity(c, i) == (c[i + 1] ^ parity(c, i + 1)));
        }
      }
    }
  }
}

TEST_CASE("population response is balanced")
{
  double     total = 0.0;
  SplitMix64 rng(17);
  for (unsigned s = 0; s < 100; ++s)
  {
    auto const inst = new_instance(64, 1.0, derive_seed(5, "balance", s));
    for (int t = 0; t < 1000; ++t)
    {
      total += inst.response(Challenge::random(64, rng));
    }
  }
  CHECK(std::abs(total / 100000.0 - 0.5) < 0.02);
}

TEST_CASE("seed derivation is stable")
{
  CHECK(derive_seed(1, "L1", 0) == derive_seed(1, "L1", 0));
  CHECK(derive_seed(1, "L1", 0) != derive_seed(1, "L1", 1));
  CHECK(derive_seed(1, "L1", 0) != derive_seed(1, "L2", 0));
  CHECK(derive_seed(1, "L1", 0) != derive_seed(2, "L1", 0));
  SplitMix64 a(42), b(42);
  for (int i = 0; i < 10; ++i)
  {
    CHECK(a() == b());
  }
}
