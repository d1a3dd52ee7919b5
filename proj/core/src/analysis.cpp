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

#include "popsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "popsim/error.hpp"
#include "popsim/parallel.hpp"

namespace popsim {

namespace {

struct MeanAndError
{
  double mean{0.0};
  double std_error{0.0};
};

MeanAndError across(std::span<double const> values)
{
  double const n   = static_cast<double>(values.size());
  double const sum = std::accumulate(values.begin(), values.end(), 0.0);
  double const mean = sum / n;
  if (values.size() < 2)
  {
    return {mean, 0.0};
  }
  double ss = 0.0;
  for (double v : values)
  {
    ss += (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

unsigned pattern_count(unsigned width, unsigned hw, bool wrap)
{
  if (hw == 1)
  {
    return width;
  }
  return width - 1 + (wrap ? 1u : 0u);
}

void check_hw(unsigned width, unsigned hw)
{
  detail::require(hw == 1 || hw == 2, [&] { return "mismatch hamming weight must be 1 or 2, got " + std::to_string(hw); });
  detail::require(hw == 1 || width >= 2, "HW-2 patterns need at least 2 stages");
}

}  // namespace

std::vector<Challenge> mismatch_patterns(unsigned width, unsigned hw, bool wrap)
{
  check_hw(width, hw);
  std::vector<Challenge> patterns;
  if (hw == 1)
  {
    for (unsigned s = 0; s < width; ++s)
    {
      patterns.emplace_back(width, std::uint64_t{1} << s);
    }
    return patterns;
  }
  for (unsigned s = 0; s + 1 < width; ++s)
  {
    patterns.emplace_back(width, std::uint64_t{3} << s);
  }
  if (wrap && width > 2)
  {
    patterns.emplace_back(width, (std::uint64_t{1} << (width - 1)) | 1u);
  }
  return patterns;
}

void SacConfig::validate() const
{
  detail::require(apuf_size >= 1 && apuf_size <= kMaxWidth, "APUF size must be in [1, 64]");
  check_hw(apuf_size, hw);
  detail::require(n_instances >= 1, "SAC needs at least one instance");
  detail::require(n_challenges >= 1, "SAC needs at least one challenge");
  detail::require(stage_sigma > 0.0, "stage_sigma must be positive");
}

namespace {

// Accumulates output changes for one challenge into `changes`.
//
// With t_i = w_i phi_i and delta = sum t_i, toggling c_s negates phi_0..phi_s,
// so delta' = delta - 2 (t_0 + ... + t_s). Toggling c_s and c_{s+1} negates
// phi_{s+1} only. The wrapped pair (c_{n-1}, c_0) negates phi_1..phi_{n-1}.
void count_changes(std::span<double const> w, Challenge const &c, unsigned hw, bool wrap,
                   std::vector<double> &terms, std::vector<std::uint64_t> &changes)
{
  unsigned const      n    = static_cast<unsigned>(w.size() - 1);
  std::uint64_t const word = c.word();
  double              sign = 1.0;
  double              delta = w[n];
  terms[n] = w[n];
  for (unsigned i = n; i-- > 0;)
  {
    if ((word >> i) & 1u)
    {
      sign = -sign;
    }
    terms[i] = w[i] * sign;
    delta += terms[i];
  }
  bool const base = delta < 0.0;

  if (hw == 1)
  {
    double prefix = 0.0;
    for (unsigned s = 0; s < n; ++s)
    {
      prefix += terms[s];
      changes[s] += ((delta - 2.0 * prefix) < 0.0) != base ? 1u : 0u;
    }
    return;
  }
  for (unsigned s = 0; s + 1 < n; ++s)
  {
    changes[s] += ((delta - 2.0 * terms[s + 1]) < 0.0) != base ? 1u : 0u;
  }
  if (wrap && n > 2)
  {
    double const negated = delta - terms[n] - terms[0];
    changes[n - 1] += ((delta - 2.0 * negated) < 0.0) != base ? 1u : 0u;
  }
}

std::vector<double> to_rates(std::vector<std::uint64_t> const &changes, std::uint64_t total)
{
  std::vector<double> rates(changes.size());
  for (std::size_t s = 0; s < changes.size(); ++s)
  {
    rates[s] = static_cast<double>(changes[s]) / static_cast<double>(total);
  }
  return rates;
}

}  // namespace

std::vector<double> output_change_rates(ApufInstance const &inst, unsigned hw, bool wrap,
                                        std::span<Challenge const> challenges)
{
  unsigned const n = inst.n_stages();
  check_hw(n, hw);
  detail::require(!challenges.empty(), "output change rates need at least one challenge");
  std::vector<double>        terms(n + 1);
  std::vector<std::uint64_t> changes(pattern_count(n, hw, wrap && n > 2), 0);
  for (auto const &c : challenges)
  {
    detail::require(c.width() == n, "challenge width does not match APUF size");
    count_changes(inst.weights(), c, hw, wrap, terms, changes);
  }
  return to_rates(changes, challenges.size());
}

std::vector<double> output_change_rates_exhaustive(ApufInstance const &inst, unsigned hw, bool wrap)
{
  unsigned const n = inst.n_stages();
  check_hw(n, hw);
  detail::require(n <= 24, "exhaustive enumeration limited to 24 stages");
  std::uint64_t const        total = std::uint64_t{1} << n;
  std::vector<double>        terms(n + 1);
  std::vector<std::uint64_t> changes(pattern_count(n, hw, wrap && n > 2), 0);
  for (std::uint64_t word = 0; word < total; ++word)
  {
    count_changes(inst.weights(), Challenge(n, word), hw, wrap, terms, changes);
  }
  return to_rates(changes, total);
}

std::vector<double> output_change_rates(std::function<ResponseBit(Challenge const &)> const &evaluator, unsigned width,
                                        unsigned hw, bool wrap, std::span<Challenge const> challenges)
{
  check_hw(width, hw);
  detail::require(!challenges.empty(), "output change rates need at least one challenge");
  auto const                 patterns = mismatch_patterns(width, hw, wrap);
  std::vector<std::uint64_t> changes(patterns.size(), 0);
  for (auto const &c : challenges)
  {
    detail::require(c.width() == width, "challenge width does not match evaluator width");
    ResponseBit const base = evaluator(c);
    for (std::size_t s = 0; s < patterns.size(); ++s)
    {
      changes[s] += evaluator(c ^ patterns[s]) != base ? 1u : 0u;
    }
  }
  return to_rates(changes, challenges.size());
}

std::vector<double> output_change_rates_exhaustive(std::function<ResponseBit(Challenge const &)> const &evaluator,
                                                   unsigned width, unsigned hw, bool wrap)
{
  detail::require(width <= 24, "exhaustive enumeration limited to 24 bits");
  std::vector<Challenge> all;
  all.reserve(std::size_t{1} << width);
  for (std::uint64_t word = 0; word < (std::uint64_t{1} << width); ++word)
  {
    all.emplace_back(width, word);
  }
  return output_change_rates(evaluator, width, hw, wrap, all);
}

namespace {

std::vector<std::vector<double>> per_instance_rates(SacConfig const &config)
{
  config.validate();
  std::vector<std::vector<double>> rates(config.n_instances);
  parallel_for(config.n_instances, config.threads, [&](std::size_t m) {
    auto const inst = ApufInstance::generate(
        {config.apuf_size, config.stage_sigma, derive_seed(config.seed, "sac", m), config.model});
    SplitMix64             rng(derive_seed(config.seed, "sac-challenges", m));
    std::vector<Challenge> challenges;
    challenges.reserve(config.n_challenges);
    for (unsigned j = 0; j < config.n_challenges; ++j)
    {
      challenges.push_back(Challenge::random(config.apuf_size, rng));
    }
    rates[m] = output_change_rates(inst, config.hw, config.wrap, challenges);
  });
  return rates;
}

}  // namespace

std::vector<CurvePoint> sac_curve(SacConfig const &config)
{
  auto const        rates  = per_instance_rates(config);
  std::size_t const shifts = rates.front().size();
  std::vector<CurvePoint> curve;
  curve.reserve(shifts);
  std::vector<double> column(rates.size());
  for (std::size_t s = 0; s < shifts; ++s)
  {
    for (std::size_t m = 0; m < rates.size(); ++m)
    {
      column[m] = rates[m][s];
    }
    auto stat = across(column);
    if (rates.size() == 1)
    {
      stat.std_error = std::sqrt(stat.mean * (1.0 - stat.mean) / config.n_challenges);
    }
    curve.push_back({static_cast<unsigned>(s), stat.mean, stat.std_error});
  }
  return curve;
}

CurvePoint sac_mean(SacConfig const &config)
{
  auto const          rates = per_instance_rates(config);
  std::vector<double> means(rates.size());
  for (std::size_t m = 0; m < rates.size(); ++m)
  {
    means[m] = std::accumulate(rates[m].begin(), rates[m].end(), 0.0) / static_cast<double>(rates[m].size());
  }
  auto stat = across(means);
  if (rates.size() == 1)
  {
    double const pooled = static_cast<double>(config.n_challenges) * rates.front().size();
    stat.std_error      = std::sqrt(stat.mean * (1.0 - stat.mean) / pooled);
  }
  return {config.apuf_size, stat.mean, stat.std_error};
}

// ---------------------------------------------------------------------------

StageBiasMatrix::StageBiasMatrix(unsigned width)
  : width_{width}
{
  detail::require(width >= 1 && width <= kMaxWidth, "stage-bias width must be in [1, 64]");
  for (int t = 0; t < 2; ++t)
  {
    sums_[t].assign(width, 0.0);
    counts_[t].assign(width, 0);
  }
}

void StageBiasMatrix::accumulate(Challenge const &c, ResponseBit r, StageObserver const *observer)
{
  detail::require(c.width() == width_, "challenge width does not match stage-bias width");
  int p = 0;
  for (unsigned j = 0; j < width_; ++j)
  {
    p ^= c[j];
  }
  for (unsigned j = 0; j < width_; ++j)
  {
    int const t = c[j];
    p ^= t;
    sums_[t][j] += static_cast<double>(r ^ p);
    counts_[t][j] += 1;
    if (observer)
    {
      (*observer)(j, p);
    }
  }
  ++challenges_;
}

std::optional<double> StageBiasMatrix::bias(int t, unsigned j) const
{
  std::uint64_t const n = count(t, j);
  if (n == 0)
  {
    return std::nullopt;
  }
  return sum(t, j) / static_cast<double>(n);
}

std::vector<double> StageBiasMatrix::entries() const
{
  std::vector<double> out;
  out.reserve(2 * width_);
  for (int t = 0; t < 2; ++t)
  {
    for (unsigned j = 0; j < width_; ++j)
    {
      if (auto b = bias(t, j))
      {
        out.push_back(*b);
      }
    }
  }
  return out;
}

StageBiasMatrix stage_bias(ChallengeEvaluator const &evaluator, unsigned width, std::uint64_t n_challenges,
                           std::uint64_t seed)
{
  detail::require(n_challenges >= 1, "stage bias needs at least one challenge");
  StageBiasMatrix matrix(width);
  SplitMix64      rng(seed);
  for (std::uint64_t i = 0; i < n_challenges; ++i)
  {
    Challenge const c = Challenge::random(width, rng);
    matrix.accumulate(c, evaluator(c));
  }
  return matrix;
}

StageBiasMatrix stage_bias_exhaustive(ChallengeEvaluator const &evaluator, unsigned width)
{
  detail::require(width <= 24, "exhaustive enumeration limited to 24 bits");
  StageBiasMatrix     matrix(width);
  std::uint64_t const total = std::uint64_t{1} << width;
  for (std::uint64_t word = 0; word < total; ++word)
  {
    Challenge const c(width, word);
    matrix.accumulate(c, evaluator(c));
  }
  return matrix;
}

StageBiasSummary stage_bias_distribution(unsigned apuf_size, unsigned n_instances, std::uint64_t n_crps,
                                         std::uint64_t seed, bool exhaustive, double stage_sigma, WeightModel model,
                                         unsigned threads)
{
  detail::require(n_instances >= 1, "stage-bias distribution needs at least one instance");
  std::vector<StageBiasMatrix> matrices(n_instances, StageBiasMatrix(apuf_size));
  parallel_for(n_instances, threads, [&](std::size_t m) {
    auto const inst = ApufInstance::generate({apuf_size, stage_sigma, derive_seed(seed, "stage-bias", m), model});
    auto       eval = [&inst](Challenge const &c) { return inst.response(c); };
    matrices[m]     = exhaustive ? stage_bias_exhaustive(eval, apuf_size)
                                 : stage_bias(eval, apuf_size, n_crps, derive_seed(seed, "stage-bias-challenges", m));
  });

  StageBiasSummary summary;
  for (auto const &mat : matrices)
  {
    auto const e = mat.entries();
    summary.samples.insert(summary.samples.end(), e.begin(), e.end());
    summary.absent += 2 * apuf_size - e.size();
  }
  detail::require(!summary.samples.empty(), "no stage-bias entries were observed");
  double const n = static_cast<double>(summary.samples.size());
  summary.mean   = std::accumulate(summary.samples.begin(), summary.samples.end(), 0.0) / n;
  double ss      = 0.0;
  for (double v : summary.samples)
  {
    ss += (v - summary.mean) * (v - summary.mean);
  }
  summary.stddev = std::sqrt(ss / n);
  return summary;
}

// ---------------------------------------------------------------------------

void HdConfig::validate() const
{
  pop.validate();
  detail::require(n_instances >= 1, "HD needs at least one instance");
  detail::require(n_challenges >= 1, "HD needs at least one challenge");
}

namespace {

PopInstance hd_instance(HdConfig const &config, std::size_t m)
{
  PopConfig cfg   = config.pop;
  cfg.master_seed = derive_seed(config.seed, "hd", m);
  return PopInstance::build(cfg);
}

}  // namespace

std::vector<RoundPairDistance> interround_hd(HdConfig const &config)
{
  config.validate();
  unsigned const rounds = config.pop.rounds;
  detail::require(rounds >= 2, "inter-round distance needs rounds >= 2");
  unsigned const width = config.pop.width;

  // per_instance[m][t] = mean distance between rounds t+1 and t+2
  std::vector<std::vector<double>> per_instance(config.n_instances, std::vector<double>(rounds - 1, 0.0));
  parallel_for(config.n_instances, config.threads, [&](std::size_t m) {
    auto const pop = hd_instance(config, m);
    SplitMix64 rng(derive_seed(config.seed, "hd-challenges", m));
    std::vector<std::uint64_t> diff(rounds - 1, 0);
    for (unsigned j = 0; j < config.n_challenges; ++j)
    {
      auto const traj = pop.round_trajectory(Challenge::random(width, rng), rounds);
      for (unsigned t = 0; t + 1 < rounds; ++t)
      {
        diff[t] += hamming_distance(traj[t], traj[t + 1]);
      }
    }
    for (unsigned t = 0; t + 1 < rounds; ++t)
    {
      per_instance[m][t] = static_cast<double>(diff[t]) / (static_cast<double>(config.n_challenges) * width);
    }
  });

  std::vector<RoundPairDistance> out;
  std::vector<double>            column(config.n_instances);
  for (unsigned t = 0; t + 1 < rounds; ++t)
  {
    for (std::size_t m = 0; m < config.n_instances; ++m)
    {
      column[m] = per_instance[m][t];
    }
    auto const stat = across(column);
    out.push_back({t + 1, t + 2, stat.mean, stat.std_error});
  }
  return out;
}

std::vector<CurvePoint> cross_challenge_hd(HdConfig const &config, std::span<unsigned const> rounds)
{
  config.validate();
  detail::require(!rounds.empty(), "cross-challenge distance needs at least one round count");
  for (unsigned r : rounds)
  {
    detail::require(r >= 1, "round counts must be >= 1");
  }
  unsigned const width      = config.pop.width;
  unsigned const max_rounds = *std::max_element(rounds.begin(), rounds.end());

  std::vector<std::vector<double>> per_instance(config.n_instances, std::vector<double>(rounds.size(), 0.0));
  parallel_for(config.n_instances, config.threads, [&](std::size_t m) {
    auto const pop = hd_instance(config, m);
    SplitMix64 rng(derive_seed(config.seed, "hd-challenges", m));
    std::vector<std::uint64_t> diff(rounds.size(), 0);
    for (unsigned j = 0; j < config.n_challenges; ++j)
    {
      Challenge const a  = Challenge::random(width, rng);
      Challenge const b  = Challenge::random(width, rng);
      auto const      ta = pop.round_trajectory(a, max_rounds);
      auto const      tb = pop.round_trajectory(b, max_rounds);
      for (std::size_t k = 0; k < rounds.size(); ++k)
      {
        diff[k] += hamming_distance(ta[rounds[k] - 1], tb[rounds[k] - 1]);
      }
    }
    for (std::size_t k = 0; k < rounds.size(); ++k)
    {
      per_instance[m][k] = static_cast<double>(diff[k]) / (static_cast<double>(config.n_challenges) * width);
    }
  });

  std::vector<CurvePoint> out;
  std::vector<double>     column(config.n_instances);
  for (std::size_t k = 0; k < rounds.size(); ++k)
  {
    for (std::size_t m = 0; m < config.n_instances; ++m)
    {
      column[m] = per_instance[m][k];
    }
    auto const stat = across(column);
    out.push_back({rounds[k], stat.mean, stat.std_error});
  }
  return out;
}

}  // namespace popsim
