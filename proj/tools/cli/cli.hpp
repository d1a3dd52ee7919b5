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
#include <iosfwd>
#include <string>
#include <vector>

#include "popsim/attacks.hpp"

namespace popsim::cli {

enum ExitCode : int
{
  kOk            = 0,
  kInvalid       = 1,
  kRuntimeFailure = 2,
};

/// Runs the driver on `args` (without the program name). Results go to `out`
/// or to the --out file; diagnostics go to `err`.
int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err);

/// Desk-scale MLP budget used by attack-mlp and reproduce table2.
inline constexpr unsigned      kDeskEpochs = 6;
inline constexpr std::uint64_t kDeskTrain  = 500000;
inline constexpr std::uint64_t kDeskTest   = 50000;

struct Table2Budget
{
  std::uint64_t train{kDeskTrain};
  std::uint64_t test{kDeskTest};
  unsigned      epochs{kDeskEpochs};
};

/// One row of reproduce table2: MLP attack on a 64-bit POP with k-stage
/// first-layer APUFs, with instance and training seeds derived from `seed`.
AttackReport table2_attack(std::uint64_t seed, unsigned k, unsigned rounds, Table2Budget const &budget,
                           unsigned threads = 1);

}  // namespace popsim::cli
