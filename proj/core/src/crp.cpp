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

#include "popsim/crp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "popsim/error.hpp"
#include "popsim/parallel.hpp"

namespace popsim {

nlohmann::json to_json(ApufParams const &params)
{
  return {{"kind", "apuf"},
          {"n_stages", params.n_stages},
          {"stage_sigma", params.stage_sigma},
          {"instance_seed", params.instance_seed},
          {"weight_model", std::string(to_string(params.model))}};
}

nlohmann::json to_json(PopConfig const &config)
{
  return {{"kind", "pop"},
          {"width", config.width},
          {"first_layer_stages", config.first_layer_stages},
          {"rounds", config.rounds},
          {"tmv_votes", config.tmv.votes},
          {"stage_sigma", config.stage_sigma},
          {"master_seed", config.master_seed},
          {"weight_model", std::string(to_string(config.model))}};
}

ApufParams apuf_params_from_json(nlohmann::json const &j)
{
  ApufParams p;
  p.n_stages      = j.at("n_stages").get<unsigned>();
  p.stage_sigma   = j.at("stage_sigma").get<double>();
  p.instance_seed = j.at("instance_seed").get<std::uint64_t>();
  p.model         = weight_model_from_string(j.value("weight_model", std::string("stage-delays")));
  p.validate();
  return p;
}

PopConfig pop_config_from_json(nlohmann::json const &j)
{
  PopConfig c;
  c.width              = j.at("width").get<unsigned>();
  c.first_layer_stages = j.at("first_layer_stages").get<unsigned>();
  c.rounds             = j.at("rounds").get<unsigned>();
  c.tmv.votes          = j.at("tmv_votes").get<unsigned>();
  c.stage_sigma        = j.at("stage_sigma").get<double>();
  c.master_seed        = j.at("master_seed").get<std::uint64_t>();
  c.model              = weight_model_from_string(j.value("weight_model", std::string("stage-delays")));
  c.validate();
  return c;
}

nlohmann::json CrpHeader::to_json() const
{
  nlohmann::json j = {{"format", "popsim-crp"},
                      {"version", 1},
                      {"width", width},
                      {"count", count},
                      {"challenge_seed", challenge_seed},
                      {"noise", {{"sigma_noise", noise.sigma_noise}, {"eval_seed", noise.eval_seed}}},
                      {"challenge_encoding", "hex, big-endian, c_0 most significant"}};
  if (target)
  {
    j["target"] = std::visit([](auto const &t) { return popsim::to_json(t); }, *target);
  }
  else
  {
    j["target"] = nullptr;
  }
  return j;
}

CrpHeader CrpHeader::from_json(nlohmann::json const &j)
{
  detail::require(j.value("format", std::string()) == "popsim-crp", "not a popsim-crp header");
  detail::require(j.value("version", 0) == 1, "unsupported popsim-crp version");
  CrpHeader h;
  h.width             = j.at("width").get<unsigned>();
  h.count             = j.at("count").get<std::uint64_t>();
  h.challenge_seed    = j.at("challenge_seed").get<std::uint64_t>();
  h.noise.sigma_noise = j.at("noise").at("sigma_noise").get<double>();
  h.noise.eval_seed   = j.at("noise").at("eval_seed").get<std::uint64_t>();
  auto const &t       = j.at("target");
  if (!t.is_null())
  {
    auto const kind = t.at("kind").get<std::string>();
    if (kind == "apuf")
    {
      h.target = apuf_params_from_json(t);
    }
    else if (kind == "pop")
    {
      h.target = pop_config_from_json(t);
    }
    else
    {
      throw ValidationError("unknown CRP target kind '" + kind + "'");
    }
  }
  return h;
}

Challenge crp_challenge(unsigned width, std::uint64_t challenge_seed, std::uint64_t index)
{
  SplitMix64 rng(derive_seed(challenge_seed, "challenge", index));
  return Challenge::random(width, rng);
}

namespace {

constexpr std::uint64_t kBlock = 4096;

template <typename Eval>
std::vector<CrpRecord> generate_records(unsigned width, std::uint64_t count, std::uint64_t challenge_seed,
                                        NoiseModel const &noise, unsigned threads, Eval &&eval)
{
  detail::require(count >= 1, "CRP count must be >= 1");
  noise.validate();
  std::vector<CrpRecord> records(count);
  std::uint64_t const    blocks = (count + kBlock - 1) / kBlock;
  parallel_for(blocks, threads, [&](std::size_t b) {
    std::uint64_t const end = std::min<std::uint64_t>(count, (b + 1) * kBlock);
    for (std::uint64_t j = b * kBlock; j < end; ++j)
    {
      Challenge   c = crp_challenge(width, challenge_seed, j);
      NoiseSource draw(derive_seed(noise.eval_seed, "noise", j));
      records[j] = CrpRecord{c, eval(c, draw)};
    }
  });
  return records;
}

}  // namespace

CrpSet generate_crps(ApufInstance const &inst, std::uint64_t count, std::uint64_t challenge_seed,
                     NoiseModel const &noise, unsigned threads)
{
  CrpSet set;
  set.header  = {inst.n_stages(), count, challenge_seed, noise, CrpTarget{inst.params()}};
  set.records = generate_records(inst.n_stages(), count, challenge_seed, noise, threads,
                                 [&](Challenge const &c, NoiseSource &draw) { return evaluate(inst, c, noise, draw); });
  return set;
}

CrpSet generate_crps(PopInstance const &pop, std::uint64_t count, std::uint64_t challenge_seed,
                     NoiseModel const &noise, unsigned threads)
{
  CrpSet set;
  set.header  = {pop.config().width, count, challenge_seed, noise, CrpTarget{pop.config()}};
  set.records = generate_records(pop.config().width, count, challenge_seed, noise, threads,
                                 [&](Challenge const &c, NoiseSource &draw) { return evaluate_pop(pop, c, noise, draw); });
  return set;
}

CrpSet regenerate(CrpHeader const &header, unsigned threads)
{
  detail::require(header.target.has_value(), "CRP header carries no target description");
  if (auto const *apuf = std::get_if<ApufParams>(&*header.target))
  {
    return generate_crps(ApufInstance::generate(*apuf), header.count, header.challenge_seed, header.noise, threads);
  }
  auto const &pop = std::get<PopConfig>(*header.target);
  return generate_crps(PopInstance::build(pop), header.count, header.challenge_seed, header.noise, threads);
}

void write_crp_body(std::ostream &out, CrpSet const &set)
{
  for (auto const &rec : set.records)
  {
    out << rec.challenge.to_hex() << ',' << static_cast<int>(rec.response) << '\n';
  }
}

std::vector<CrpRecord> read_crp_body(std::istream &in, unsigned width, std::string const &name)
{
  std::vector<CrpRecord> records;
  std::string            line;
  std::size_t            line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
    {
      line.pop_back();
    }
    if (line.empty())
    {
      continue;
    }
    auto const comma = line.find(',');
    if (comma == std::string::npos)
    {
      throw FormatError(name, line_no, "expected '<hex>,<0|1>'");
    }
    std::string_view const hex{line.data(), comma};
    std::string_view const bit{line.data() + comma + 1, line.size() - comma - 1};
    if (bit != "0" && bit != "1")
    {
      throw FormatError(name, line_no, "response must be 0 or 1");
    }
    try
    {
      records.push_back({Challenge::from_hex(hex, width), static_cast<ResponseBit>(bit[0] - '0')});
    }
    catch (ValidationError const &e)
    {
      throw FormatError(name, line_no, e.what());
    }
  }
  return records;
}

namespace {

std::filesystem::path stem_of(std::filesystem::path base)
{
  auto const ext = base.extension();
  if (ext == ".json" || ext == ".csv")
  {
    base.replace_extension();
  }
  return base;
}

}  // namespace

std::filesystem::path crp_header_path(std::filesystem::path const &base)
{
  auto p = stem_of(base);
  p += ".json";
  return p;
}

std::filesystem::path crp_body_path(std::filesystem::path const &base)
{
  auto p = stem_of(base);
  p += ".csv";
  return p;
}

void write_crps(CrpSet const &set, std::filesystem::path const &base)
{
  detail::require(set.header.count == set.records.size(), "header count does not match record count");
  auto header = set.header.to_json();
  header["body"] = crp_body_path(base).filename().string();
  {
    std::ofstream out(crp_header_path(base));
    if (!out)
    {
      throw std::runtime_error("cannot write " + crp_header_path(base).string());
    }
    out << header.dump(2) << '\n';
  }
  std::ofstream out(crp_body_path(base));
  if (!out)
  {
    throw std::runtime_error("cannot write " + crp_body_path(base).string());
  }
  write_crp_body(out, set);
}

CrpSet read_crps(std::filesystem::path const &base)
{
  auto const    header_path = crp_header_path(base);
  std::ifstream hin(header_path);
  if (!hin)
  {
    throw std::runtime_error("cannot open " + header_path.string());
  }
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse(hin);
  }
  catch (nlohmann::json::parse_error const &e)
  {
    throw FormatError(header_path.string(), 0, e.what());
  }
  CrpSet set;
  set.header = CrpHeader::from_json(j);

  auto const    body_path = crp_body_path(base);
  std::ifstream bin(body_path);
  if (!bin)
  {
    throw std::runtime_error("cannot open " + body_path.string());
  }
  set.records = read_crp_body(bin, set.header.width, body_path.string());
  if (set.records.size() != set.header.count)
  {
    throw FormatError(body_path.string(), set.records.size(),
                      "header declares " + std::to_string(set.header.count) + " records, body has " +
                          std::to_string(set.records.size()));
  }
  return set;
}

std::pair<CrpSet, CrpSet> split(CrpSet const &set, double fraction, std::uint64_t seed)
{
  detail::require(fraction > 0.0 && fraction < 1.0, "split fraction must be in (0, 1)");
  std::size_t const n       = set.records.size();
  std::size_t const n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(derive_seed(seed, "split", 0));
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::uint8_t> in_train(n, 0);
  for (std::size_t i = 0; i < n_train; ++i)
  {
    in_train[order[i]] = 1;
  }

  CrpSet train;
  CrpSet test;
  train.header = set.header;
  test.header  = set.header;
  train.records.reserve(n_train);
  test.records.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i)
  {
    (in_train[i] ? train : test).records.push_back(set.records[i]);
  }
  train.header.count = train.records.size();
  test.header.count  = test.records.size();
  return {std::move(train), std::move(test)};
}

}  // namespace popsim
