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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "popsim/apuf.hpp"
#include "popsim/pop.hpp"

namespace popsim {

struct CrpRecord
{
  Challenge   challenge;
  ResponseBit response{0};

  friend bool operator==(CrpRecord const &, CrpRecord const &) = default;
};

/// Target of a CRP dataset: a single APUF or a POP composition.
using CrpTarget = std::variant<ApufParams, PopConfig>;

nlohmann::json to_json(ApufParams const &params);
nlohmann::json to_json(PopConfig const &config);
ApufParams     apuf_params_from_json(nlohmann::json const &j);
PopConfig      pop_config_from_json(nlohmann::json const &j);

struct CrpHeader
{
  unsigned              width{0};
  std::uint64_t         count{0};
  std::uint64_t         challenge_seed{0};
  NoiseModel            noise{};
  std::optional<CrpTarget> target;

  nlohmann::json to_json() const;
  static CrpHeader from_json(nlohmann::json const &j);

  friend bool operator==(CrpHeader const &a, CrpHeader const &b)
  {
    return a.to_json() == b.to_json();
  }
};

struct CrpSet
{
  CrpHeader              header;
  std::vector<CrpRecord> records;

  std::size_t size() const noexcept
  {
    return records.size();
  }

  friend bool operator==(CrpSet const &, CrpSet const &) = default;
};

/// Challenge j is drawn from SplitMix64(derive_seed(challenge_seed, "challenge", j));
/// its noise from NoiseSource(derive_seed(noise.eval_seed, "noise", j)). Output
/// is therefore independent of `threads`.
CrpSet generate_crps(ApufInstance const &inst, std::uint64_t count, std::uint64_t challenge_seed,
                     NoiseModel const &noise, unsigned threads = 1);
CrpSet generate_crps(PopInstance const &pop, std::uint64_t count, std::uint64_t challenge_seed,
                     NoiseModel const &noise, unsigned threads = 1);

/// Rebuilds the target described by the header and regenerates the set.
CrpSet regenerate(CrpHeader const &header, unsigned threads = 1);

Challenge crp_challenge(unsigned width, std::uint64_t challenge_seed, std::uint64_t index);

/// Body: one `<hex challenge>,<0|1>` record per line, no header row.
void   write_crp_body(std::ostream &out, CrpSet const &set);
std::vector<CrpRecord> read_crp_body(std::istream &in, unsigned width, std::string const &name = "<stream>");

/// `base.json` (header) + `base.csv` (body). A trailing .json/.csv on `base` is
/// ignored.
void   write_crps(CrpSet const &set, std::filesystem::path const &base);
CrpSet read_crps(std::filesystem::path const &base);

std::filesystem::path crp_header_path(std::filesystem::path const &base);
std::filesystem::path crp_body_path(std::filesystem::path const &base);

/// Train gets round(fraction * N) records chosen by a seeded shuffle; both parts
/// keep the original record order.
std::pair<CrpSet, CrpSet> split(CrpSet const &set, double fraction, std::uint64_t seed);

}  // namespace popsim
