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

#include <Eigen/Dense>

#include "popsim/crp.hpp"
#include "popsim/error.hpp"

namespace popsim::detail {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

inline unsigned dataset_width(CrpSet const &set)
{
  require(!set.records.empty(), "dataset is empty");
  unsigned const width = set.records.front().challenge.width();
  for (auto const &rec : set.records)
  {
    require(rec.challenge.width() == width, "dataset mixes challenge widths");
  }
  return width;
}

/// Columns are samples; rows are the APUF features phi_0..phi_n.
template <typename Scalar>
Matrix<Scalar> feature_matrix(CrpSet const &set)
{
  unsigned const width = dataset_width(set);
  Matrix<Scalar> x(width + 1, static_cast<Eigen::Index>(set.records.size()));
  for (std::size_t s = 0; s < set.records.size(); ++s)
  {
    std::uint64_t const word = set.records[s].challenge.word();
    Scalar              sign = 1;
    x(width, static_cast<Eigen::Index>(s)) = 1;
    for (unsigned i = width; i-- > 0;)
    {
      if ((word >> i) & 1u)
      {
        sign = -sign;
      }
      x(i, static_cast<Eigen::Index>(s)) = sign;
    }
  }
  return x;
}

/// Columns are samples; x_i = 1 - 2 c_i.
template <typename Scalar>
Matrix<Scalar> signed_input_matrix(CrpSet const &set)
{
  unsigned const width = dataset_width(set);
  Matrix<Scalar> x(width, static_cast<Eigen::Index>(set.records.size()));
  for (std::size_t s = 0; s < set.records.size(); ++s)
  {
    std::uint64_t const word = set.records[s].challenge.word();
    for (unsigned i = 0; i < width; ++i)
    {
      x(i, static_cast<Eigen::Index>(s)) = ((word >> i) & 1u) ? Scalar(-1) : Scalar(1);
    }
  }
  return x;
}

template <typename Scalar>
RowVector<Scalar> label_vector(CrpSet const &set)
{
  RowVector<Scalar> y(static_cast<Eigen::Index>(set.records.size()));
  for (std::size_t s = 0; s < set.records.size(); ++s)
  {
    y(static_cast<Eigen::Index>(s)) = static_cast<Scalar>(set.records[s].response);
  }
  return y;
}

/// Mean of log(1 + e^z) - y z, evaluated stably.
template <typename Derived, typename Labels>
double mean_cross_entropy(Eigen::MatrixBase<Derived> const &z, Eigen::MatrixBase<Labels> const &y)
{
  double sum = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i)
  {
    double const zi = static_cast<double>(z(i));
    double const softplus = zi > 0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
    sum += softplus - static_cast<double>(y(i)) * zi;
  }
  return sum / static_cast<double>(z.size());
}

template <typename Scalar>
Scalar sigmoid(Scalar z)
{
  return z >= 0 ? Scalar(1) / (Scalar(1) + std::exp(-z)) : std::exp(z) / (Scalar(1) + std::exp(z));
}

}  // namespace popsim::detail
