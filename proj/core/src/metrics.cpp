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

#include "popsim/metrics.hpp"

#include <cmath>
#include <random>

#include "popsim/error.hpp"
#include "popsim/parallel.hpp"

namespace popsim {

double uniformity(std::span<ResponseBit const> responses)
{
  detail::require(!responses.empty(), "uniformity of an empty response sequence");
  std::uint64_t ones = 0;
  for (auto r : responses)
  {
    ones += r;
  }
  return static_cast<double>(ones) / static_cast<double>(responses.size());
}

double normalized_hamming_distance(std::span<ResponseBit const> a, std::span<ResponseBit const> b)
{
  detail::require(a.size() == b.size(), "hamming distance of sequences with different lengths");
  detail::require(!a.empty(), "hamming distance of empty sequences");
  std::uint64_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    diff += (a[i] != b[i]) ? 1u : 0u;
  }
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

double uniqueness(std::span<BitSequence const> instance_responses)
{
  std::size_t const m = instance_responses.size();
  detail::require(m >= 2, "uniqueness needs at least two instances");
  double sum = 0.0;
  for (std::size_t a = 0; a < m; ++a)
  {
    for (std::size_t b = a + 1; b < m; ++b)
    {
      sum += normalized_hamming_distance(instance_responses[a], instance_responses[b]);
    }
  }
  return sum / (static_cast<double>(m) * static_cast<double>(m - 1) / 2.0);
}

double ber(std::span<ResponseBit const> enrolled, std::span<BitSequence const> reevaluations)
{
  detail::require(!reevaluations.empty(), "ber needs at least one re-evaluation");
  double sum = 0.0;
  for (auto const &re : reevaluations)
  {
    sum += normalized_hamming_distance(enrolled, re);
  }
  return sum / static_cast<double>(reevaluations.size());
}

unsigned AuthPolicy::threshold() const
{
  double const exact = (1.0 - ber_assumed - margin) * static_cast<double>(n_crps);
  return static_cast<unsigned>(std::max(0.0, std::ceil(exact - 1e-9)));
}

void AuthPolicy::validate() const
{
  detail::require(n_crps >= 1, "n_crps must be >= 1");
  detail::require(ber_assumed >= 0.0 && ber_assumed < 1.0, "ber_assumed must be in [0, 1)");
  detail::require(std::isfinite(margin), "margin must be finite");
  unsigned const t = threshold();
  detail::require(t > 0 && t <= n_crps, [&] { return "authentication threshold " + std::to_string(t) + " outside (0, n_crps]"; });
}

Estimate auth_failure_prob(AuthPolicy const &policy, double true_ber, std::uint64_t trials, std::uint64_t seed,
                           unsigned threads)
{
  policy.validate();
  detail::require(trials >= 1, "trials must be >= 1");
  detail::require(true_ber >= 0.0 && true_ber <= 1.0, "true_ber must be in [0, 1]");

  constexpr std::uint64_t kBlock    = 1u << 16;
  std::uint64_t const     blocks    = (trials + kBlock - 1) / kBlock;
  unsigned const          threshold = policy.threshold();
  std::vector<std::uint64_t> failures(blocks, 0);

  parallel_for(blocks, threads, [&](std::size_t b) {
    SplitMix64                        rng(derive_seed(seed, "auth", b));
    std::binomial_distribution<unsigned> correct(policy.n_crps, 1.0 - true_ber);
    std::uint64_t const               end = std::min<std::uint64_t>(trials, (b + 1) * kBlock);
    std::uint64_t                     f   = 0;
    for (std::uint64_t t = b * kBlock; t < end; ++t)
    {
      f += correct(rng) < threshold ? 1u : 0u;
    }
    failures[b] = f;
  });

  std::uint64_t total = 0;
  for (auto f : failures)
  {
    total += f;
  }
  double const p = static_cast<double>(total) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials};
}

double auth_failure_exact(AuthPolicy const &policy, double true_ber)
{
  policy.validate();
  detail::require(true_ber >= 0.0 && true_ber <= 1.0, "true_ber must be in [0, 1]");
  unsigned const n = policy.n_crps;
  unsigned const t = policy.threshold();
  double const   p = 1.0 - true_ber;
  if (p >= 1.0)
  {
    return 0.0;  // every response correct, t <= n
  }
  if (p <= 0.0)
  {
    return 1.0;
  }
  double const log_p = std::log(p);
  double const log_q = std::log1p(-p);
  double       sum   = 0.0;
  for (unsigned x = 0; x < t; ++x)
  {
    double const log_term = std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) + x * log_p +
                            (n - x) * log_q;
    sum += std::exp(log_term);
  }
  return std::min(1.0, sum);
}

QualityReport pop_quality(PopConfig const &config, unsigned n_instances, unsigned n_challenges, std::uint64_t seed,
                          unsigned threads)
{
  config.validate();
  detail::require(n_instances >= 2, "quality needs at least two instances");
  detail::require(n_challenges >= 1, "quality needs at least one challenge");

  std::vector<Challenge> challenges;
  challenges.reserve(n_challenges);
  SplitMix64 rng(derive_seed(seed, "quality-challenges", 0));
  for (unsigned j = 0; j < n_challenges; ++j)
  {
    challenges.push_back(Challenge::random(config.width, rng));
  }

  std::vector<BitSequence> responses(n_instances);
  parallel_for(n_instances, threads, [&](std::size_t m) {
    PopConfig cfg   = config;
    cfg.master_seed = derive_seed(seed, "quality", m);
    auto const pop  = PopInstance::build(cfg);
    auto      &out  = responses[m];
    out.reserve(n_challenges);
    for (auto const &c : challenges)
    {
      out.push_back(pop.response(c));
    }
  });

  QualityReport report;
  report.n_instances  = n_instances;
  report.n_challenges = n_challenges;
  double sum = 0.0, sum_sq = 0.0;
  for (auto const &r : responses)
  {
    double const u = popsim::uniformity(r);
    sum += u;
    sum_sq += u * u;
  }
  double const m    = static_cast<double>(n_instances);
  report.uniformity = sum / m;
  double const var  = std::max(0.0, (sum_sq - sum * sum / m) / (m - 1.0));
  report.uniformity_stderr = std::sqrt(var / m);
  report.uniqueness        = popsim::uniqueness(responses);
  return report;
}

Estimate pop_ber(PopConfig const &config, NoiseModel const &noise, unsigned n_challenges, unsigned n_reevaluations,
                 std::uint64_t seed, unsigned threads)
{
  config.validate();
  noise.validate();
  detail::require(n_challenges >= 1 && n_reevaluations >= 1, "ber needs challenges and re-evaluations");
  auto const pop = PopInstance::build(config);

  // One task per challenge; the enrollment and the re-evaluations of
  // challenge j draw their noise from streams derived from (eval_seed, j).
  std::vector<std::uint64_t> mismatches(n_challenges, 0);
  parallel_for(n_challenges, threads, [&](std::size_t j) {
    SplitMix64  crng(derive_seed(seed, "ber-challenge", j));
    Challenge   c = Challenge::random(config.width, crng);
    NoiseSource draw(derive_seed(noise.eval_seed, "ber-noise", j));
    ResponseBit const enrolled = evaluate_pop(pop, c, noise, draw);
    std::uint64_t     diff     = 0;
    for (unsigned e = 0; e < n_reevaluations; ++e)
    {
      diff += evaluate_pop(pop, c, noise, draw) != enrolled ? 1u : 0u;
    }
    mismatches[j] = diff;
  });

  // Re-evaluations of one challenge are correlated, so the standard error is
  // taken over per-challenge mismatch rates.
  double const r   = static_cast<double>(n_reevaluations);
  double       sum = 0.0, sum_sq = 0.0;
  for (auto d : mismatches)
  {
    double const rate = static_cast<double>(d) / r;
    sum += rate;
    sum_sq += rate * rate;
  }
  double const n    = static_cast<double>(n_challenges);
  double const mean = sum / n;
  double const var  = n > 1 ? std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)) : mean * (1.0 - mean);
  return {mean, std::sqrt(var / n), std::uint64_t{n_challenges} * n_reevaluations};
}

}  // namespace popsim
