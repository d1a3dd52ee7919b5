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

#include "popsim/attacks.hpp"
#include "popsim/error.hpp"

namespace popsim {

nlohmann::json AttackReport::to_json(bool include_timing) const
{
  nlohmann::json j = {{"attack", attack},
                      {"target", target},
                      {"train_crps", train_crps},
                      {"test_crps", test_crps},
                      {"train_accuracy", train_accuracy},
                      {"test_accuracy", test_accuracy},
                      {"epochs_completed", epochs_completed},
                      {"budget_exhausted", budget_exhausted},
                      {"seed", seed}};
  if (include_timing)
  {
    j["training_seconds"] = training_seconds;
  }
  return j;
}

AttackReport run_lr_attack(ApufParams const &target, std::uint64_t train_crps, std::uint64_t test_crps,
                           TrainConfig const &config, std::uint64_t seed, unsigned threads)
{
  auto const inst  = ApufInstance::generate(target);
  auto const train = generate_crps(inst, train_crps, derive_seed(seed, "attack-train", 0), NoiseModel{}, threads);
  auto const test  = generate_crps(inst, test_crps, derive_seed(seed, "attack-test", 0), NoiseModel{}, threads);

  TrainingTrace trace;
  auto const    model = train_lr(train, config, &trace);

  AttackReport report;
  report.attack           = "lr";
  report.target           = popsim::to_json(target);
  report.train_crps       = train_crps;
  report.test_crps        = test_crps;
  report.train_accuracy   = accuracy(model, train);
  report.test_accuracy    = accuracy(model, test);
  report.training_seconds = trace.seconds;
  report.epochs_completed = trace.epochs_completed;
  report.budget_exhausted = trace.budget_exhausted;
  report.seed             = seed;
  return report;
}

AttackReport run_mlp_attack(PopConfig const &target, std::uint64_t train_crps, std::uint64_t test_crps,
                            TrainConfig const &config, std::uint64_t seed, unsigned threads)
{
  auto const pop   = PopInstance::build(target);
  auto const train = generate_crps(pop, train_crps, derive_seed(seed, "attack-train", 0), NoiseModel{}, threads);
  auto const test  = generate_crps(pop, test_crps, derive_seed(seed, "attack-test", 0), NoiseModel{}, threads);

  auto fit = train_mlp(train, config);

  AttackReport report;
  report.attack           = "mlp";
  report.target           = popsim::to_json(target);
  report.train_crps       = train_crps;
  report.test_crps        = test_crps;
  report.train_accuracy   = accuracy(fit.model, train);
  report.test_accuracy    = accuracy(fit.model, test);
  report.training_seconds = fit.trace.seconds;
  report.epochs_completed = fit.trace.epochs_completed;
  report.budget_exhausted = fit.trace.budget_exhausted;
  report.seed             = seed;
  return report;
}

}  // namespace popsim
