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
#include <numeric>
#include <random>

#include "dataset.hpp"
#include "popsim/attacks.hpp"
#include "popsim/error.hpp"

namespace popsim {

namespace {

template <typename S>
using Mat = detail::Matrix<S>;
template <typename S>
using Row = detail::RowVector<S>;

template <typename S>
auto weights_of(DenseLayer<S> &l)
{
  return Eigen::Map<Mat<S>>(l.weights.data(), l.outputs, l.inputs);
}
template <typename S>
auto weights_of(DenseLayer<S> const &l)
{
  return Eigen::Map<Mat<S> const>(l.weights.data(), l.outputs, l.inputs);
}
template <typename S>
auto bias_of(DenseLayer<S> &l)
{
  return Eigen::Map<detail::Vector<S>>(l.bias.data(), l.outputs);
}
template <typename S>
auto bias_of(DenseLayer<S> const &l)
{
  return Eigen::Map<detail::Vector<S> const>(l.bias.data(), l.outputs);
}

std::vector<unsigned> shape(unsigned inputs, std::span<unsigned const> hidden)
{
  std::vector<unsigned> sizes{inputs};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return sizes;
}

/// Scratch space for one forward/backward pass over a batch.
template <typename S>
struct Workspace
{
  std::vector<Mat<S>> activations;  // activations[0] is the input
  std::vector<Mat<S>> pre;          // pre-activations per layer
  Mat<S>              delta;
};

template <typename S>
void forward(BasicMlp<S> const &model, Mat<S> const &x, Workspace<S> &ws)
{
  auto const    &layers = model.layers();
  std::size_t const depth = layers.size();
  ws.activations.resize(depth + 1);
  ws.pre.resize(depth);
  ws.activations[0] = x;
  for (std::size_t l = 0; l < depth; ++l)
  {
    ws.pre[l].noalias() = weights_of(layers[l]) * ws.activations[l];
    ws.pre[l].colwise() += bias_of(layers[l]);
    if (l + 1 < depth)
    {
      ws.activations[l + 1] = ws.pre[l].cwiseMax(S(0));
    }
    else
    {
      ws.activations[l + 1] = ws.pre[l];
    }
  }
}

// Fills `grad` with gradients of the mean cross-entropy; returns the loss.
template <typename S>
double backward(BasicMlp<S> const &model, Row<S> const &y, Workspace<S> &ws, BasicMlp<S> &grad)
{
  auto const       &layers = model.layers();
  std::size_t const depth  = layers.size();
  auto const       &logits = ws.pre.back();
  double const      loss   = detail::mean_cross_entropy(logits, y);
  S const           inv_n  = S(1) / static_cast<S>(y.size());

  ws.delta.resize(1, y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i)
  {
    ws.delta(0, i) = (detail::sigmoid(logits(0, i)) - y(i)) * inv_n;
  }
  for (std::size_t l = depth; l-- > 0;)
  {
    auto &g = grad.layers()[l];
    weights_of(g).noalias() = ws.delta * ws.activations[l].transpose();
    bias_of(g)              = ws.delta.rowwise().sum();
    if (l > 0)
    {
      Mat<S> upstream = weights_of(layers[l]).transpose() * ws.delta;
      ws.delta        = upstream.cwiseProduct((ws.pre[l - 1].array() > S(0)).matrix().template cast<S>());
    }
  }
  return loss;
}

template <typename S>
BasicMlp<S> zeros_like(BasicMlp<S> const &model)
{
  BasicMlp<S> out;
  for (auto const &l : model.layers())
  {
    out.layers().push_back({l.inputs, l.outputs, std::vector<S>(l.weights.size(), S(0)), std::vector<S>(l.bias.size(), S(0))});
  }
  return out;
}

void check_input_width(unsigned model_inputs, CrpSet const &data)
{
  detail::require(detail::dataset_width(data) == model_inputs, "dataset width does not match MLP input size");
}

}  // namespace

template <typename Scalar>
BasicMlp<Scalar> BasicMlp<Scalar>::initialize(unsigned inputs, std::span<unsigned const> hidden, std::uint64_t seed)
{
  detail::require(inputs >= 1, "MLP needs at least one input");
  auto const sizes = shape(inputs, hidden);
  BasicMlp   model;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
  {
    unsigned const fan_in = sizes[l];
    unsigned const fan_out = sizes[l + 1];
    SplitMix64     rng(derive_seed(seed, "mlp-init", l));
    double const   limit = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> uniform(-limit, limit);
    DenseLayer<Scalar> layer{fan_in, fan_out, std::vector<Scalar>(std::size_t{fan_in} * fan_out), std::vector<Scalar>(fan_out, Scalar(0))};
    for (auto &w : layer.weights)
    {
      w = static_cast<Scalar>(uniform(rng));
    }
    model.layers_.push_back(std::move(layer));
  }
  return model;
}

template <typename Scalar>
BasicMlp<Scalar> BasicMlp<Scalar>::zeros(unsigned inputs, std::span<unsigned const> hidden)
{
  detail::require(inputs >= 1, "MLP needs at least one input");
  auto const sizes = shape(inputs, hidden);
  BasicMlp   model;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l)
  {
    model.layers_.push_back({sizes[l], sizes[l + 1], std::vector<Scalar>(std::size_t{sizes[l]} * sizes[l + 1], Scalar(0)),
                             std::vector<Scalar>(sizes[l + 1], Scalar(0))});
  }
  return model;
}

template <typename Scalar>
std::vector<unsigned> BasicMlp<Scalar>::layer_sizes() const
{
  std::vector<unsigned> sizes;
  if (layers_.empty())
  {
    return sizes;
  }
  sizes.push_back(layers_.front().inputs);
  for (auto const &l : layers_)
  {
    sizes.push_back(l.outputs);
  }
  return sizes;
}

template <typename Scalar>
std::size_t BasicMlp<Scalar>::parameter_count() const
{
  std::size_t n = 0;
  for (auto const &l : layers_)
  {
    n += l.weights.size() + l.bias.size();
  }
  return n;
}

template <typename Scalar>
Scalar BasicMlp<Scalar>::logit(Challenge const &c) const
{
  detail::require(!layers_.empty(), "MLP has no layers");
  detail::require(c.width() == inputs(), "challenge width does not match MLP input size");
  detail::Vector<Scalar> a(c.width());
  for (unsigned i = 0; i < c.width(); ++i)
  {
    a(i) = c[i] ? Scalar(-1) : Scalar(1);
  }
  for (std::size_t l = 0; l < layers_.size(); ++l)
  {
    detail::Vector<Scalar> z = weights_of(layers_[l]) * a + bias_of(layers_[l]);
    a = (l + 1 < layers_.size()) ? detail::Vector<Scalar>(z.cwiseMax(Scalar(0))) : z;
  }
  return a(0);
}

template class BasicMlp<float>;
template class BasicMlp<double>;

template <typename Scalar>
double mlp_loss(BasicMlp<Scalar> const &model, CrpSet const &data)
{
  check_input_width(model.inputs(), data);
  Workspace<Scalar> ws;
  forward(model, detail::signed_input_matrix<Scalar>(data), ws);
  return detail::mean_cross_entropy(ws.pre.back(), detail::label_vector<Scalar>(data));
}

template <typename Scalar>
double mlp_loss_and_gradient(BasicMlp<Scalar> const &model, CrpSet const &data, BasicMlp<Scalar> &gradient)
{
  check_input_width(model.inputs(), data);
  gradient = zeros_like(model);
  Workspace<Scalar> ws;
  forward(model, detail::signed_input_matrix<Scalar>(data), ws);
  return backward(model, detail::label_vector<Scalar>(data), ws, gradient);
}

template double mlp_loss(BasicMlp<float> const &, CrpSet const &);
template double mlp_loss(BasicMlp<double> const &, CrpSet const &);
template double mlp_loss_and_gradient(BasicMlp<float> const &, CrpSet const &, BasicMlp<float> &);
template double mlp_loss_and_gradient(BasicMlp<double> const &, CrpSet const &, BasicMlp<double> &);

namespace {

double accuracy_on(MlpModel const &model, Mat<float> const &x, Row<float> const &y)
{
  Workspace<float> ws;
  std::uint64_t    correct = 0;
  Eigen::Index const chunk = 8192;
  for (Eigen::Index start = 0; start < x.cols(); start += chunk)
  {
    Eigen::Index const len = std::min(chunk, x.cols() - start);
    forward(model, Mat<float>(x.middleCols(start, len)), ws);
    auto const &logits = ws.pre.back();
    for (Eigen::Index i = 0; i < len; ++i)
    {
      float const predicted = logits(0, i) > 0.0f ? 1.0f : 0.0f;
      correct += predicted == y(start + i) ? 1u : 0u;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(x.cols());
}

struct AdamState
{
  std::vector<std::vector<float>> m;
  std::vector<std::vector<float>> v;
};

void adam_step(std::vector<float> &param, std::vector<float> const &grad, std::vector<float> &m,
               std::vector<float> &v, TrainConfig const &cfg, double correction1, double correction2)
{
  float const lr  = static_cast<float>(cfg.learning_rate);
  float const b1  = static_cast<float>(cfg.beta1);
  float const b2  = static_cast<float>(cfg.beta2);
  float const eps = static_cast<float>(cfg.epsilon);
  float const c1  = static_cast<float>(correction1);
  float const c2  = static_cast<float>(correction2);
  for (std::size_t i = 0; i < param.size(); ++i)
  {
    m[i] = b1 * m[i] + (1.0f - b1) * grad[i];
    v[i] = b2 * v[i] + (1.0f - b2) * grad[i] * grad[i];
    float const mhat = m[i] / c1;
    float const vhat = v[i] / c2;
    param[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace

double accuracy(MlpModel const &model, CrpSet const &test)
{
  detail::require(!test.records.empty(), "accuracy of an empty test set");
  check_input_width(model.inputs(), test);
  return accuracy_on(model, detail::signed_input_matrix<float>(test), detail::label_vector<float>(test));
}

MlpFit train_mlp(CrpSet const &train, TrainConfig const &config)
{
  config.validate();
  unsigned const width = detail::dataset_width(train);

  CrpSet fit_set = train;
  CrpSet validation;
  if (config.validation_fraction > 0.0 && train.records.size() >= 20)
  {
    std::tie(fit_set, validation) = split(train, 1.0 - config.validation_fraction,
                                          derive_seed(config.seed, "mlp-validation", 0));
  }

  Mat<float> const x = detail::signed_input_matrix<float>(fit_set);
  Row<float> const y = detail::label_vector<float>(fit_set);
  Mat<float>       x_val;
  Row<float>       y_val;
  if (!validation.records.empty())
  {
    x_val = detail::signed_input_matrix<float>(validation);
    y_val = detail::label_vector<float>(validation);
  }

  MlpFit result;
  result.model   = MlpModel::initialize(width, config.hidden, derive_seed(config.seed, "mlp", 0));
  MlpModel &model = result.model;
  MlpModel  grad  = zeros_like(model);
  MlpModel  best  = model;
  double    best_accuracy = -1.0;

  AdamState adam;
  for (auto const &l : model.layers())
  {
    adam.m.emplace_back(l.weights.size(), 0.0f);
    adam.m.emplace_back(l.bias.size(), 0.0f);
    adam.v.emplace_back(l.weights.size(), 0.0f);
    adam.v.emplace_back(l.bias.size(), 0.0f);
  }

  Eigen::Index const       n = x.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Mat<float>       batch_x(width, config.batch_size);
  Row<float>       batch_y(config.batch_size);
  Workspace<float> ws;
  std::uint64_t    step = 0;
  double           pow1 = 1.0, pow2 = 1.0;

  auto const start   = std::chrono::steady_clock::now();
  auto       elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  for (unsigned epoch = 0; epoch < config.epochs && !result.trace.budget_exhausted; ++epoch)
  {
    SplitMix64 rng(derive_seed(config.seed, "mlp-epoch", epoch));
    std::shuffle(order.begin(), order.end(), rng);
    double       loss_sum = 0.0;
    Eigen::Index seen     = 0;
    for (Eigen::Index begin = 0; begin < n; begin += config.batch_size)
    {
      if (elapsed() > config.budget_seconds)
      {
        result.trace.budget_exhausted = true;
        break;
      }
      Eigen::Index const len = std::min<Eigen::Index>(config.batch_size, n - begin);
      batch_x.resize(width, len);
      batch_y.resize(len);
      for (Eigen::Index i = 0; i < len; ++i)
      {
        auto const idx   = order[static_cast<std::size_t>(begin + i)];
        batch_x.col(i)   = x.col(idx);
        batch_y(i)       = y(idx);
      }
      forward(model, batch_x, ws);
      loss_sum += backward(model, batch_y, ws, grad) * static_cast<double>(len);
      seen += len;

      ++step;
      pow1 *= config.beta1;
      pow2 *= config.beta2;
      std::size_t k = 0;
      for (std::size_t l = 0; l < model.layers().size(); ++l)
      {
        adam_step(model.layers()[l].weights, grad.layers()[l].weights, adam.m[k], adam.v[k], config, 1.0 - pow1, 1.0 - pow2);
        ++k;
        adam_step(model.layers()[l].bias, grad.layers()[l].bias, adam.m[k], adam.v[k], config, 1.0 - pow1, 1.0 - pow2);
        ++k;
      }
    }
    if (seen == 0)
    {
      break;
    }
    result.trace.loss.push_back(loss_sum / static_cast<double>(seen));
    if (!result.trace.budget_exhausted)
    {
      ++result.trace.epochs_completed;
    }
    if (x_val.cols() > 0)
    {
      double const acc = accuracy_on(model, x_val, y_val);
      result.trace.validation_accuracy.push_back(acc);
      if (acc > best_accuracy)
      {
        best_accuracy = acc;
        best          = model;
      }
    }
  }
  if (x_val.cols() > 0 && best_accuracy >= 0.0)
  {
    model = best;
  }
  result.trace.seconds = elapsed();
  return result;
}

double gradient_check(BasicMlp<double> const &model, CrpSet const &batch, double step, std::size_t max_per_tensor)
{
  BasicMlp<double> analytic;
  mlp_loss_and_gradient(model, batch, analytic);
  BasicMlp<double> probe = model;
  double           worst = 0.0;

  auto check = [&](std::vector<double> &param, std::vector<double> const &grad) {
    std::size_t const stride = std::max<std::size_t>(1, param.size() / std::max<std::size_t>(1, max_per_tensor));
    for (std::size_t i = 0; i < param.size(); i += stride)
    {
      double const saved = param[i];
      param[i]           = saved + step;
      double const up    = mlp_loss(probe, batch);
      param[i]           = saved - step;
      double const down  = mlp_loss(probe, batch);
      param[i]           = saved;
      double const fd    = (up - down) / (2.0 * step);
      double const denom = std::max({std::abs(grad[i]), std::abs(fd), 1e-6});
      worst              = std::max(worst, std::abs(grad[i] - fd) / denom);
    }
  };
  for (std::size_t l = 0; l < probe.layers().size(); ++l)
  {
    check(probe.layers()[l].weights, analytic.layers()[l].weights);
    check(probe.layers()[l].bias, analytic.layers()[l].bias);
  }
  return worst;
}

double gradient_check(MlpModel const &model, CrpSet const &batch, double step, std::size_t max_per_tensor)
{
  return gradient_check(model.cast<double>(), batch, step, max_per_tensor);
}

}  // namespace popsim
