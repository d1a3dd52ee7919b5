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
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "popsim/apuf.hpp"
#include "popsim/crp.hpp"
#include "popsim/pop.hpp"

namespace popsim {

struct TrainConfig
{
  /// Full-batch iterations for LR, passes over the data for the MLP.
  unsigned              epochs{10};
  unsigned              batch_size{256};
  double                learning_rate{1e-3};
  double                beta1{0.9};
  double                beta2{0.999};
  double                epsilon{1e-8};
  /// Share of the training set held out to pick the best MLP snapshot.
  double                validation_fraction{0.05};
  double                budget_seconds{3600.0};
  std::uint64_t         seed{0};
  std::vector<unsigned> hidden{128, 128, 128};

  static TrainConfig for_lr();
  static TrainConfig for_mlp();

  void validate() const;
};

struct TrainingTrace
{
  std::vector<double> loss;
  std::vector<double> validation_accuracy;
  unsigned            epochs_completed{0};
  bool                budget_exhausted{false};
  double              seconds{0.0};
};

// ---------------------------------------------------------------------------
// Logistic regression over the APUF feature space
// ---------------------------------------------------------------------------

class LrModel
{
public:
  explicit LrModel(std::vector<double> coefficients);

  static LrModel zeros(unsigned n_stages)
  {
    return LrModel(std::vector<double>(n_stages + 1, 0.0));
  }

  /// An APUF answers 1 when w . phi < 0, so the exact model is -w.
  static LrModel from_instance(ApufInstance const &inst);

  std::span<double const> coefficients() const noexcept
  {
    return coefficients_;
  }
  unsigned n_stages() const noexcept
  {
    return static_cast<unsigned>(coefficients_.size() - 1);
  }

  double logit(Challenge const &c) const;
  double probability(Challenge const &c) const;
  /// 1 iff P(r = 1) > 0.5; ties go to 0.
  ResponseBit predict(Challenge const &c) const
  {
    return logit(c) > 0.0 ? 1 : 0;
  }

private:
  std::vector<double> coefficients_;
};

/// Full-batch gradient descent on the mean cross-entropy, starting at zero.
LrModel train_lr(CrpSet const &train, TrainConfig const &config, TrainingTrace *trace = nullptr);

double lr_loss(LrModel const &model, CrpSet const &data);
double lr_loss_and_gradient(LrModel const &model, CrpSet const &data, std::vector<double> &gradient);

// ---------------------------------------------------------------------------
// Multilayer perceptron
// ---------------------------------------------------------------------------

/// Column-major weights (outputs x inputs) plus bias.
template <typename Scalar>
struct DenseLayer
{
  unsigned            inputs{0};
  unsigned            outputs{0};
  std::vector<Scalar> weights;
  std::vector<Scalar> bias;
};

/// Rectifier hidden layers, one logit output read through a sigmoid. Inputs are
/// challenges encoded as x_i = 1 - 2 c_i.
template <typename Scalar>
class BasicMlp
{
public:
  BasicMlp() = default;

  /// He-uniform weights, zero biases, seeded by derive_seed(seed, "mlp-init", layer).
  static BasicMlp initialize(unsigned inputs, std::span<unsigned const> hidden, std::uint64_t seed);
  static BasicMlp zeros(unsigned inputs, std::span<unsigned const> hidden);

  std::vector<DenseLayer<Scalar>> &layers() noexcept
  {
    return layers_;
  }
  std::vector<DenseLayer<Scalar>> const &layers() const noexcept
  {
    return layers_;
  }

  unsigned inputs() const noexcept
  {
    return layers_.empty() ? 0 : layers_.front().inputs;
  }

  std::vector<unsigned> layer_sizes() const;
  std::size_t           parameter_count() const;

  template <typename Other>
  BasicMlp<Other> cast() const
  {
    BasicMlp<Other> out;
    for (auto const &layer : layers_)
    {
      DenseLayer<Other> l{layer.inputs, layer.outputs, {}, {}};
      l.weights.assign(layer.weights.begin(), layer.weights.end());
      l.bias.assign(layer.bias.begin(), layer.bias.end());
      out.layers().push_back(std::move(l));
    }
    return out;
  }

  Scalar      logit(Challenge const &c) const;
  ResponseBit predict(Challenge const &c) const
  {
    return logit(c) > Scalar(0) ? 1 : 0;
  }

private:
  std::vector<DenseLayer<Scalar>> layers_;
};

using MlpModel = BasicMlp<float>;

/// Mean binary cross-entropy over `data`.
template <typename Scalar>
double mlp_loss(BasicMlp<Scalar> const &model, CrpSet const &data);

/// Same, and fills `gradient` (shaped like `model`) with d loss / d parameter.
template <typename Scalar>
double mlp_loss_and_gradient(BasicMlp<Scalar> const &model, CrpSet const &data, BasicMlp<Scalar> &gradient);

struct MlpFit
{
  MlpModel      model;
  TrainingTrace trace;
};

/// Minibatch Adam. The returned model is the snapshot with the best validation
/// accuracy; when the wall-clock budget runs out the best snapshot so far is
/// returned and trace.budget_exhausted is set.
MlpFit train_mlp(CrpSet const &train, TrainConfig const &config);

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

double accuracy(LrModel const &model, CrpSet const &test);
double accuracy(MlpModel const &model, CrpSet const &test);

/// Max relative error between analytic and central-difference gradients,
/// |a - f| / max(|a|, |f|, 1e-6).
double gradient_check(LrModel const &model, CrpSet const &batch, double step = 1e-5);

/// Runs in double precision on a cast of `model`; probes at most
/// `max_per_tensor` evenly spaced entries of each weight and bias tensor.
double gradient_check(MlpModel const &model, CrpSet const &batch, double step = 1e-5,
                      std::size_t max_per_tensor = 64);
double gradient_check(BasicMlp<double> const &model, CrpSet const &batch, double step = 1e-5,
                      std::size_t max_per_tensor = 64);

// ---------------------------------------------------------------------------
// End-to-end attacks
// ---------------------------------------------------------------------------

struct AttackReport
{
  std::string    attack;
  nlohmann::json target;
  std::uint64_t  train_crps{0};
  std::uint64_t  test_crps{0};
  double         train_accuracy{0.0};
  double         test_accuracy{0.0};
  double         training_seconds{0.0};
  unsigned       epochs_completed{0};
  bool           budget_exhausted{false};
  std::uint64_t  seed{0};

  nlohmann::json to_json(bool include_timing = true) const;
};

/// Noiseless CRPs; train challenges from derive_seed(seed, "attack-train", 0),
/// test challenges from derive_seed(seed, "attack-test", 0).
AttackReport run_lr_attack(ApufParams const &target, std::uint64_t train_crps, std::uint64_t test_crps,
                           TrainConfig const &config, std::uint64_t seed, unsigned threads = 1);
AttackReport run_mlp_attack(PopConfig const &target, std::uint64_t train_crps, std::uint64_t test_crps,
                            TrainConfig const &config, std::uint64_t seed, unsigned threads = 1);

}  // namespace popsim
