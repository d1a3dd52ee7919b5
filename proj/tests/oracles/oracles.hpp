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

// Reference implementations written directly from the definitions, without
// reusing any library shortcut. Slow on purpose.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using Bits = std::vector<int>;

inline Bits bits_of(std::uint64_t word, unsigned width)
{
  Bits b(width);
  for (unsigned i = 0; i < width; ++i)
  {
    b[i] = static_cast<int>((word >> i) & 1u);
  }
  return b;
}

inline std::uint64_t word_of(Bits const &b)
{
  std::uint64_t w = 0;
  for (std::size_t i = 0; i < b.size(); ++i)
  {
    w |= std::uint64_t(b[i] & 1) << i;
  }
  return w;
}

/// phi_i = prod_{j >= i} (1 - 2 c_j), phi_n = 1.
inline std::vector<double> features(Bits const &c)
{
  std::size_t const   n = c.size();
  std::vector<double> phi(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
  {
    double p = 1.0;
    for (std::size_t j = i; j < n; ++j)
    {
      p *= 1.0 - 2.0 * c[j];
    }
    phi[i] = p;
  }
  return phi;
}

inline double delay(std::vector<double> const &w, Bits const &c)
{
  auto const phi = features(c);
  double     d   = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    d += w[i] * phi[i];
  }
  return d;
}

inline int response(std::vector<double> const &w, Bits const &c)
{
  return delay(w, c) < 0.0 ? 1 : 0;
}

/// Signal race through explicit stages: straight stages add delta0, crossed
/// stages swap the paths and add delta1.
inline double race(std::vector<double> const &delta0, std::vector<double> const &delta1, Bits const &c)
{
  double top = 0.0, bottom = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
  {
    if (c[i] == 0)
    {
      top += delta0[i];
    }
    else
    {
      std::swap(top, bottom);
      top += delta1[i];
    }
  }
  return top - bottom;
}

/// XOR of c_{i+1} .. c_{n-1}.
inline int parity(Bits const &c, std::size_t i)
{
  int p = 0;
  for (std::size_t j = i + 1; j < c.size(); ++j)
  {
    p ^= c[j];
  }
  return p;
}

/// Exact P(X < t) for X ~ Binomial(n, p) by summing the pmf term by term.
inline double binomial_below(unsigned n, double p, unsigned t)
{
  long double total = 0.0L;
  for (unsigned x = 0; x < t && x <= n; ++x)
  {
    long double choose = 1.0L;
    for (unsigned i = 1; i <= x; ++i)
    {
      choose = choose * static_cast<long double>(n - x + i) / static_cast<long double>(i);
    }
    total += choose * std::pow(static_cast<long double>(p), x) * std::pow(1.0L - p, n - x);
  }
  return static_cast<double>(total);
}

inline double normal_cdf(double x)
{
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

/// One POP evaluation by explicit wiring: APUF i sees bits (i + j) mod W.
struct Pop
{
  std::vector<std::vector<double>> first;
  std::vector<double>              second;
  unsigned                         k{0};

  Bits layer(Bits const &c) const
  {
    unsigned const W = static_cast<unsigned>(c.size());
    Bits           out(W);
    for (unsigned i = 0; i < W; ++i)
    {
      Bits local(k);
      for (unsigned j = 0; j < k; ++j)
      {
        local[j] = c[(i + j) % W];
      }
      out[i] = response(first[i], local);
    }
    return out;
  }

  int evaluate(Bits c, unsigned rounds) const
  {
    for (unsigned r = 0; r < rounds; ++r)
    {
      c = layer(c);
    }
    return response(second, c);
  }
};

/// Output change rate for one XOR mask by re-evaluating every challenge.
inline double change_rate(std::function<int(Bits const &)> const &f, unsigned width, std::uint64_t mask)
{
  std::uint64_t const total   = std::uint64_t{1} << width;
  std::uint64_t       changed = 0;
  for (std::uint64_t w = 0; w < total; ++w)
  {
    changed += f(bits_of(w, width)) != f(bits_of(w ^ mask, width)) ? 1 : 0;
  }
  return static_cast<double>(changed) / static_cast<double>(total);
}

/// P(r = 1 xor p_j(c) | c_j = t) over all challenges.
inline std::vector<std::vector<double>> stage_bias(std::function<int(Bits const &)> const &f, unsigned width)
{
  std::vector<std::vector<double>> hits(2, std::vector<double>(width, 0.0));
  std::vector<std::vector<double>> seen(2, std::vector<double>(width, 0.0));
  for (std::uint64_t w = 0; w < (std::uint64_t{1} << width); ++w)
  {
    Bits const c = bits_of(w, width);
    int const  r = f(c);
    for (unsigned j = 0; j < width; ++j)
    {
      int const t = c[j];
      hits[t][j] += (r == (1 ^ parity(c, j))) ? 1.0 : 0.0;
      seen[t][j] += 1.0;
    }
  }
  for (int t = 0; t < 2; ++t)
  {
    for (unsigned j = 0; j < width; ++j)
    {
      hits[t][j] /= seen[t][j];
    }
  }
  return hits;
}

inline double hamming_fraction(Bits const &a, Bits const &b)
{
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    d += a[i] != b[i] ? 1.0 : 0.0;
  }
  return d / static_cast<double>(a.size());
}

/// P(r = 1) for one noisy evaluation: P(delay + N(0, sigma^2) < 0).
inline double one_probability(std::vector<double> const &w, Bits const &c, double sigma)
{
  return normal_cdf(-delay(w, c) / sigma);
}

/// P(majority of `votes` independent draws is 1) when each draw is 1 w.p. q.
inline double majority_probability(double q, unsigned votes)
{
  return 1.0 - binomial_below(votes, q, votes / 2 + 1);
}

/// Exact P(r = 1) of a noisy POP by propagating the register distribution
/// over all 2^W states, round by round.
inline double pop_one_probability(Pop const &pop, Bits const &c, unsigned rounds, double sigma, unsigned votes)
{
  unsigned const      W      = static_cast<unsigned>(c.size());
  std::size_t const   states = std::size_t{1} << W;
  std::vector<double> dist(states, 0.0);
  dist[word_of(c)] = 1.0;
  for (unsigned r = 0; r < rounds; ++r)
  {
    std::vector<double> next(states, 0.0);
    for (std::size_t s = 0; s < states; ++s)
    {
      if (dist[s] == 0.0)
      {
        continue;
      }
      Bits const          reg = bits_of(s, W);
      std::vector<double> q(W);
      for (unsigned i = 0; i < W; ++i)
      {
        Bits local(pop.k);
        for (unsigned j = 0; j < pop.k; ++j)
        {
          local[j] = reg[(i + j) % W];
        }
        q[i] = majority_probability(one_probability(pop.first[i], local, sigma), votes);
      }
      for (std::size_t t = 0; t < states; ++t)
      {
        double p = dist[s];
        for (unsigned i = 0; i < W; ++i)
        {
          p *= ((t >> i) & 1u) ? q[i] : 1.0 - q[i];
        }
        next[t] += p;
      }
    }
    dist = std::move(next);
  }
  double one = 0.0;
  for (std::size_t s = 0; s < states; ++s)
  {
    one += dist[s] * majority_probability(one_probability(pop.second, bits_of(s, W), sigma), votes);
  }
  return one;
}

}  // namespace oracle
