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

#include <chrono>
#include <cmath>

#include "dataset.hpp"
#include "popsim/attacks.hpp"
#include "popsim/error.hpp"

namespace popsim {

TrainConfig TrainConfig::for_lr()
{
  TrainConfig cfg;
  cfg.epochs              = 300;
  cfg.learning_rate       = 2.0;
  cfg.validation_fraction = 0.0;
  cfg.hidden.clear();
  return cfg;
}

TrainConfig TrainConfig::for_mlp()
{
  return TrainConfig{};
}

void TrainConfig::validate() const
{
  detail::require(batch_size >= 1, "batch size must be >= 1");
  detail::require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning rate must be positive");
  detail::require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "Adam betas must lie in [0, 1)");
  detail::require(epsilon > 0.0, "Adam epsilon must be positive");
  detail::require(validation_fraction >= 0.0 && validation_fraction < 1.0, "validation fraction must be in [0, 1)");
  detail::require(budget_seconds > 0.0, "training budget must be positive");
  for (unsigned h : hidden)
  {
    detail::require(h >= 1, "hidden layer sizes must be >= 1");
  }
}

LrModel::LrModel(std::vector<double> coefficients)
  : coefficients_{std::move(coefficients)}
{
  detail::require(coefficients_.size() >= 2, "LR model needs at least one stage");
  for (double c : coefficients_)
  {
    detail::require(std::isfinite(c), "LR coefficients must be finite");
  }
}

LrModel LrModel::from_instance(ApufInstance const &inst)
{
  std::vector<double> c(inst.weights().begin(), inst.weights().end());
  for (auto &v : c)
  {
    v = -v;
  }
  return LrModel(std::move(c));
}

double LrModel::logit(Challenge const &c) const
{
  unsigned const n = n_stages();
  detail::require(c.width() == n, "challenge width does not match LR model");
  std::uint64_t const word = c.word();
  double              sign = 1.0;
  double              z    = coefficients_[n];
  for (unsigned i = n; i-- > 0;)
  {
    if ((word >> i) & 1u)
    {
      sign = -sign;
    }
    z += coefficients_[i] * sign;
  }
  return z;
}

double LrModel::probability(Challenge const &c) const
{
  return detail::sigmoid(logit(c));
}

namespace {

using Mat = detail::Matrix<double>;
using Vec = detail::Vector<double>;
using Row = detail::RowVector<double>;

double loss_and_gradient(Vec const &coef, Mat const &x, Row const &y, Vec *gradient)
{
  Row const    z    = coef.transpose() * x;
  double const loss = detail::mean_cross_entropy(z, y);
  if (gradient)
  {
    Row residual(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i)
    {
      residual(i) = detail::sigmoid(z(i)) - y(i);
    }
    *gradient = x * residual.transpose() / static_cast<double>(z.size());
  }
  return loss;
}

Vec as_vector(LrModel const &model)
{
  auto const c = model.coefficients();
  return Eigen::Map<Vec const>(c.data(), static_cast<Eigen::Index>(c.size()));
}

}  // namespace

double lr_loss(LrModel const &model, CrpSet const &data)
{
  detail::require(detail::dataset_width(data) == model.n_stages(), "dataset width does not match LR model");
  return loss_and_gradient(as_vector(model), detail::feature_matrix<double>(data), detail::label_vector<double>(data),
                           nullptr);
}

double lr_loss_and_gradient(LrModel const &model, CrpSet const &data, std::vector<double> &gradient)
{
  detail::require(detail::dataset_width(data) == model.n_stages(), "dataset width does not match LR model");
  Vec          g;
  double const loss = loss_and_gradient(as_vector(model), detail::feature_matrix<double>(data),
                                        detail::label_vector<double>(data), &g);
  gradient.assign(g.data(), g.data() + g.size());
  return loss;
}

LrModel train_lr(CrpSet const &train, TrainConfig const &config, TrainingTrace *trace)
{
  config.validate();
  unsigned const width = detail::dataset_width(train);
  Mat const      x     = detail::feature_matrix<double>(train);
  Row const      y     = detail::label_vector<double>(train);
  Vec            coef  = Vec::Zero(width + 1);
  Vec            grad;

  auto const start = std::chrono::steady_clock::now();
  TrainingTrace local;
  local.loss.push_back(loss_and_gradient(coef, x, y, &grad));
  for (unsigned e = 0; e < config.epochs; ++e)
  {
    double const elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > config.budget_seconds)
    {
      local.budget_exhausted = true;
      break;
    }
    coef -= config.learning_rate * grad;
    local.loss.push_back(loss_and_gradient(coef, x, y, &grad));
    ++local.epochs_completed;
  }
  local.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (trace)
  {
    *trace = std::move(local);
  }
  return LrModel(std::vector<double>(coef.data(), coef.data() + coef.size()));
}

double accuracy(LrModel const &model, CrpSet const &test)
{
  detail::require(!test.records.empty(), "accuracy of an empty test set");
  std::uint64_t correct = 0;
  for (auto const &rec : test.records)
  {
    correct += model.predict(rec.challenge) == rec.response ? 1u : 0u;
  }
  return static_cast<double>(correct) / static_cast<double>(test.records.size());
}

double gradient_check(LrModel const &model, CrpSet const &batch, double step)
{
  detail::require(detail::dataset_width(batch) == model.n_stages(), "dataset width does not match LR model");
  Mat const x    = detail::feature_matrix<double>(batch);
  Row const y    = detail::label_vector<double>(batch);
  Vec       coef = as_vector(model);
  Vec       analytic;
  loss_and_gradient(coef, x, y, &analytic);

  double worst = 0.0;
  for (Eigen::Index i = 0; i < coef.size(); ++i)
  {
    double const saved = coef(i);
    coef(i)            = saved + step;
    double const up    = loss_and_gradient(coef, x, y, nullptr);
    coef(i)            = saved - step;
    double const down  = loss_and_gradient(coef, x, y, nullptr);
    coef(i)            = saved;
    double const fd    = (up - down) / (2.0 * step);
    double const denom = std::max({std::abs(analytic(i)), std::abs(fd), 1e-6});
    worst              = std::max(worst, std::abs(analytic(i) - fd) / denom);
  }
  return worst;
}

}  // namespace popsim
