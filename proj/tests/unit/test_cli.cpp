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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "popsim/crp.hpp"

namespace {

struct Result
{
  int         code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args)
{
  std::ostringstream out, err;
  int const          code = popsim::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(std::string const &text)
{
  std::vector<std::string> v;
  std::istringstream       s(text);
  for (std::string line; std::getline(s, line);)
  {
    v.push_back(line);
  }
  return v;
}

std::vector<std::string> data_lines(std::string const &text)
{
  std::vector<std::string> v;
  for (auto const &l : lines(text))
  {
    if (!l.empty() && l[0] != '#')
    {
      v.push_back(l);
    }
  }
  return v;
}

std::filesystem::path scratch(std::string const &name)
{
  auto dir = std::filesystem::temp_directory_path() / "popsim-cli-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("sac emits one row per shift")
{
  auto const r = run({"sac", "--size", "64", "--hw", "1", "--instances", "5", "--challenges", "500", "--no-timestamp"});
  REQUIRE(r.code == 0);
  auto const rows = data_lines(r.out);
  REQUIRE(rows.size() == 65);
  CHECK(rows[0] == "shift,prob,stderr");
  CHECK(rows[1].rfind("0,", 0) == 0);
  CHECK(rows[64].rfind("63,", 0) == 0);
  CHECK(r.out.find("# seed=1\n") != std::string::npos);
  CHECK(r.out.find("# generated=") == std::string::npos);
}

TEST_CASE("timestamp appears unless suppressed")
{
  auto const r = run({"sac", "--size", "4", "--instances", "2", "--challenges", "10"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("# generated=") != std::string::npos);
}

TEST_CASE("auth-sim with zero BER never fails")
{
  auto const r = run({"auth-sim", "--ber", "0", "--crps", "100", "--trials", "10000", "--no-timestamp"});
  REQUIRE(r.code == 0);
  auto const rows = data_lines(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "metric,config,value,stderr");
  CHECK(rows[1].rfind("auth_failure,", 0) == 0);
  CHECK(rows[1].substr(rows[1].size() - 4) == ",0,0");
}

TEST_CASE("floats use six significant digits")
{
  auto const r = run({"auth-sim", "--ber", "0.1", "--crps", "200", "--trials", "1000", "--no-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("auth_failure_exact,crps=200;ber=0.1;ber_assumed=0.1;margin=0.05;threshold=170,0.00950831,0\n") !=
        std::string::npos);
}

TEST_CASE("validation failures exit 1 and name the flag")
{
  auto const votes = run({"metrics", "--votes", "4"});
  CHECK(votes.code == 1);
  CHECK(votes.err.find("--votes") != std::string::npos);

  auto const width = run({"sac", "--size", "65"});
  CHECK(width.code == 1);
  CHECK(width.err.find("--size") != std::string::npos);

  auto const k = run({"hd-rounds", "--width", "8", "--k", "9"});
  CHECK(k.code == 1);
  CHECK(k.err.find("--k") != std::string::npos);

  auto const hidden = run({"attack-mlp", "--hidden", "12,x"});
  CHECK(hidden.code == 1);
  CHECK(hidden.err.find("--hidden") != std::string::npos);

  auto const out = run({"gen-crps", "--count", "10"});
  CHECK(out.code == 1);
  CHECK(out.err.find("--out") != std::string::npos);
}

TEST_CASE("unknown flags are rejected with usage text")
{
  auto const r = run({"sac", "--bogus"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"reproduce", "fig99"}).code == 1);
}

TEST_CASE("runtime failures exit 2")
{
  auto const r = run({"sac", "--size", "4", "--instances", "1", "--challenges", "10", "--out",
                      "/nonexistent-dir/x.csv"});
  CHECK(r.code == 2);
}

TEST_CASE("help exits 0")
{
  auto const r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("reproduce") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical output across thread counts")
{
  std::vector<std::string> base{"--no-timestamp", "--seed", "7", "stage-bias", "--size", "8", "--instances", "16"};
  auto a = base, b = base;
  a.insert(a.end(), {"--threads", "1"});
  b.insert(b.end(), {"--threads", "4"});
  auto const ra = run(a);
  auto const rb = run(b);
  REQUIRE(ra.code == 0);
  CHECK(ra.out == rb.out);
  CHECK(ra.out != run({"--no-timestamp", "--seed", "8", "stage-bias", "--size", "8", "--instances", "16"}).out);
}

TEST_CASE("gen-crps writes a readable dataset")
{
  auto const base = scratch("cli-crps");
  auto const r    = run({"gen-crps", "--kind", "pop", "--k", "4", "--count", "200", "--noise", "0", "--out",
                         base.string(), "--no-timestamp"});
  REQUIRE(r.code == 0);
  auto const set = popsim::read_crps(base);
  CHECK(set.size() == 200);
  CHECK(popsim::regenerate(set.header) == set);
}

TEST_CASE("gen-instance prints weights")
{
  auto const r = run({"gen-instance", "--kind", "apuf", "--stages", "8", "--no-timestamp"});
  REQUIRE(r.code == 0);
  auto const j = nlohmann::json::parse(r.out);
  CHECK(j["weights"].size() == 9);
  CHECK(j["target"]["n_stages"] == 8);
}

TEST_CASE("saved config re-runs to identical output")
{
  auto const cfg   = scratch("saved.toml");
  auto const first = run({"--no-timestamp", "--seed", "11", "--save-config", cfg.string(), "sac", "--size", "6",
                          "--hw", "2", "--instances", "4", "--challenges", "100"});
  REQUIRE(first.code == 0);
  auto const again = run({"--config", cfg.string(), "sac"});
  REQUIRE(again.code == 0);
  CHECK(again.out == first.out);
}

TEST_CASE("attack-lr reports JSON")
{
  auto const r = run({"attack-lr", "--stages", "16", "--train", "2000", "--test", "500", "--epochs", "50",
                      "--no-timestamp"});
  REQUIRE(r.code == 0);
  auto const j = nlohmann::json::parse(r.out);
  CHECK(j["attack"] == "lr");
  CHECK(j["test_accuracy"].get<double>() > 0.8);
  CHECK(!j.contains("training_seconds"));
  CHECK(!j.contains("generated"));
}
