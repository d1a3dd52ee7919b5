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
#include <vector>

#include "oracles.hpp"
#include "popsim/apuf.hpp"

namespace testing {

inline popsim::Challenge challenge(oracle::Bits const &b)
{
  return popsim::Challenge(static_cast<unsigned>(b.size()), oracle::word_of(b));
}

inline oracle::Bits bits(popsim::Challenge const &c)
{
  return oracle::bits_of(c.word(), c.width());
}

inline std::vector<double> weights(popsim::ApufInstance const &inst)
{
  return {inst.weights().begin(), inst.weights().end()};
}

}  // namespace testing
