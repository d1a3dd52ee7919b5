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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "popsim/analysis.hpp"
#include "popsim/attacks.hpp"
#include "popsim/crp.hpp"
#include "popsim/error.hpp"
#include "popsim/metrics.hpp"
#include "popsim/pop.hpp"

namespace popsim::cli {
namespace {

#ifndef POPSIM_VERSION
#define POPSIM_VERSION "0.0.0"
#endif

std::string num(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string num(std::uint64_t v)
{
  return std::to_string(v);
}

std::string num(unsigned v)
{
  return std::to_string(v);
}

template <typename T>
std::string join(std::vector<T> const &values, char sep = ',')
{
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    if (i)
    {
      s += sep;
    }
    if constexpr (std::is_floating_point_v<T>)
    {
      s += num(values[i]);
    }
    else
    {
      s += std::to_string(values[i]);
    }
  }
  return s;
}

std::string utc_now()
{
  auto const  now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm     tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

[[noreturn]] void flag_error(std::string const &flag, std::string const &message)
{
  throw ValidationError(flag + ": " + message);
}

struct Common
{
  std::uint64_t seed{1};
  unsigned      threads{1};
  std::string   out;
  bool          no_timestamp{false};
  std::string   save_config;
};

/// Collects CSV rows plus "# key=value" provenance lines.
class Table
{
public:
  explicit Table(std::vector<std::string> columns)
    : columns_{std::move(columns)}
  {}

  void note(std::string key, std::string value)
  {
    notes_.emplace_back(std::move(key), std::move(value));
  }

  void row(std::vector<std::string> cells)
  {
    rows_.push_back(std::move(cells));
  }

  std::string render(std::string const &command, Common const &common) const
  {
    std::ostringstream s;
    s << "# tool=popsim " << POPSIM_VERSION << '\n';
    s << "# command=" << command << '\n';
    s << "# seed=" << common.seed << '\n';
    for (auto const &[k, v] : notes_)
    {
      s << "# " << k << '=' << v << '\n';
    }
    if (!common.no_timestamp)
    {
      s << "# generated=" << utc_now() << '\n';
    }
    s << join_cells(columns_) << '\n';
    for (auto const &r : rows_)
    {
      s << join_cells(r) << '\n';
    }
    return s.str();
  }

private:
  static std::string join_cells(std::vector<std::string> const &cells)
  {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
      s += (i ? "," : "") + cells[i];
    }
    return s;
  }

  std::vector<std::string>                         columns_;
  std::vector<std::pair<std::string, std::string>> notes_;
  std::vector<std::vector<std::string>>            rows_;
};

std::string render_json(nlohmann::json j, Common const &common)
{
  j["tool"] = std::string("popsim ") + POPSIM_VERSION;
  if (!common.no_timestamp)
  {
    j["generated"] = utc_now();
  }
  return j.dump(2) + "\n";
}

CLI::Validator const kOdd(
    [](std::string &value) -> std::string {
      try
      {
        std::size_t   pos = 0;
        long long const v = std::stoll(value, &pos);
        if (pos == value.size() && v > 0 && v % 2 == 1)
        {
          return {};
        }
      }
      catch (std::exception const &)
      {}
      return "must be a positive odd integer, got " + value;
    },
    "ODD");

CLI::Validator const kModel(
    [](std::string &value) -> std::string {
      try
      {
        weight_model_from_string(value);
        return {};
      }
      catch (std::exception const &)
      {
        return "unknown weight model '" + value + "' (stage-delays or independent)";
      }
    },
    "MODEL");

CLI::Validator const kProbability = CLI::Range(0.0, 1.0);

/// Flags describing an APUF or POP target.
struct TargetFlags
{
  std::string                  kind{"pop"};
  unsigned                     width{64};
  unsigned                     k{8};
  unsigned                     rounds{1};
  unsigned                     votes{1};
  unsigned                     stages{64};
  double                       sigma{1.0};
  std::string                  model{"stage-delays"};
  std::optional<std::uint64_t> instance_seed;

  void add_common(CLI::App *app)
  {
    app->add_option("--sigma", sigma, "Stage delay standard deviation")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--model", model, "Weight model: stage-delays or independent")
        ->check(kModel)
        ->capture_default_str();
    app->add_option("--instance-seed", instance_seed, "Instance seed (default: derived from --seed)");
  }

  void add_pop(CLI::App *app)
  {
    app->add_option("--width", width, "Challenge width W")->check(CLI::Range(1u, 64u))->capture_default_str();
    app->add_option("--k", k, "Stages per first-layer APUF")->check(CLI::Range(1u, 64u))->capture_default_str();
    app->add_option("--rounds", rounds, "First-layer evaluation rounds")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
    app->add_option("--votes", votes, "TMV votes per APUF evaluation")->check(kOdd)->capture_default_str();
    add_common(app);
  }

  void add_apuf(CLI::App *app)
  {
    app->add_option("--stages", stages, "APUF stages n")->check(CLI::Range(1u, 64u))->capture_default_str();
    add_common(app);
  }

  void add_either(CLI::App *app)
  {
    app->add_option("--kind", kind, "Target kind: apuf or pop")
        ->check(CLI::IsMember({"apuf", "pop"}))
        ->capture_default_str();
    app->add_option("--stages", stages, "APUF stages n (kind=apuf)")
        ->check(CLI::Range(1u, 64u))
        ->capture_default_str();
    app->add_option("--width", width, "Challenge width W (kind=pop)")->check(CLI::Range(1u, 64u))->capture_default_str();
    app->add_option("--k", k, "Stages per first-layer APUF (kind=pop)")
        ->check(CLI::Range(1u, 64u))
        ->capture_default_str();
    app->add_option("--rounds", rounds, "First-layer evaluation rounds (kind=pop)")
        ->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
    app->add_option("--votes", votes, "TMV votes (kind=pop)")->check(kOdd)->capture_default_str();
    add_common(app);
  }

  std::uint64_t resolved_seed(Common const &common) const
  {
    return instance_seed.value_or(derive_seed(common.seed, "instance", 0));
  }

  ApufParams apuf(Common const &common) const
  {
    return {stages, sigma, resolved_seed(common), weight_model_from_string(model)};
  }

  PopConfig pop(Common const &common) const
  {
    if (k > width)
    {
      flag_error("--k", "must not exceed --width (" + std::to_string(width) + ")");
    }
    PopConfig cfg;
    cfg.width              = width;
    cfg.first_layer_stages = k;
    cfg.rounds             = rounds;
    cfg.tmv.votes          = votes;
    cfg.stage_sigma        = sigma;
    cfg.master_seed        = resolved_seed(common);
    cfg.model              = weight_model_from_string(model);
    return cfg;
  }

  void describe_pop(Table &t, PopConfig const &cfg) const
  {
    t.note("width", num(cfg.width));
    t.note("k", num(cfg.first_layer_stages));
    t.note("rounds", num(cfg.rounds));
    t.note("votes", num(cfg.tmv.votes));
    t.note("stage_sigma", num(cfg.stage_sigma));
    t.note("model", std::string(to_string(cfg.model)));
    t.note("instance_seed", num(cfg.master_seed));
  }
};

std::vector<unsigned> parse_list(std::string const &flag, std::string const &text)
{
  std::vector<unsigned> values;
  std::stringstream     s(text);
  std::string           item;
  while (std::getline(s, item, ','))
  {
    try
    {
      std::size_t         pos = 0;
      unsigned long const v   = std::stoul(item, &pos);
      if (pos != item.size() || v == 0)
      {
        throw std::invalid_argument(item);
      }
      values.push_back(static_cast<unsigned>(v));
    }
    catch (std::exception const &)
    {
      flag_error(flag, "expected a comma-separated list of positive integers, got '" + text + "'");
    }
  }
  if (values.empty())
  {
    flag_error(flag, "list must not be empty");
  }
  return values;
}

struct Context
{
  Common      common;
  bool        wrote_files{false};
};

using Action = std::function<std::string(Context &)>;

// ---------------------------------------------------------------------------
// gen-instance / gen-crps
// ---------------------------------------------------------------------------

Action add_gen_instance(CLI::App &app)
{
  auto *sub = app.add_subcommand("gen-instance", "Generate an APUF or POP instance and print its weights as JSON");
  auto  t   = std::make_shared<TargetFlags>();
  t->add_either(sub);
  return [t](Context &ctx) {
    nlohmann::json j;
    j["format"] = "popsim-instance";
    if (t->kind == "apuf")
    {
      auto const params = t->apuf(ctx.common);
      auto const inst   = ApufInstance::generate(params);
      j["target"]       = to_json(params);
      j["weights"]      = std::vector<double>(inst.weights().begin(), inst.weights().end());
    }
    else
    {
      auto const cfg = t->pop(ctx.common);
      auto const pop = PopInstance::build(cfg);
      j["target"]    = to_json(cfg);
      nlohmann::json first = nlohmann::json::array();
      for (auto const &inst : pop.first_layer())
      {
        first.push_back(std::vector<double>(inst.weights().begin(), inst.weights().end()));
      }
      j["first_layer"]  = std::move(first);
      j["second_layer"] = std::vector<double>(pop.second_layer().weights().begin(), pop.second_layer().weights().end());
    }
    return render_json(std::move(j), ctx.common);
  };
}

Action add_gen_crps(CLI::App &app)
{
  auto *sub = app.add_subcommand("gen-crps", "Generate a CRP dataset (<out>.json header + <out>.csv body)");
  auto  t   = std::make_shared<TargetFlags>();
  auto  count = std::make_shared<std::uint64_t>(10000);
  auto  noise = std::make_shared<std::optional<double>>();
  t->add_either(sub);
  sub->add_option("--count", *count, "Number of CRPs")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--noise", *noise, "Evaluation noise sigma (default: 0.1 * --sigma)")->check(CLI::NonNegativeNumber);
  return [t, count, noise](Context &ctx) {
    if (ctx.common.out.empty())
    {
      flag_error("--out", "gen-crps needs an output base path");
    }
    NoiseModel const    nm{noise->value_or(0.1 * t->sigma), derive_seed(ctx.common.seed, "eval", 0)};
    std::uint64_t const challenge_seed = derive_seed(ctx.common.seed, "challenges", 0);
    CrpSet              set;
    if (t->kind == "apuf")
    {
      set = generate_crps(ApufInstance::generate(t->apuf(ctx.common)), *count, challenge_seed, nm, ctx.common.threads);
    }
    else
    {
      set = generate_crps(PopInstance::build(t->pop(ctx.common)), *count, challenge_seed, nm, ctx.common.threads);
    }
    write_crps(set, ctx.common.out);
    ctx.wrote_files = true;
    return set.header.to_json().dump(2) + "\n";
  };
}

// ---------------------------------------------------------------------------
// metrics / auth-sim
// ---------------------------------------------------------------------------

Action add_metrics(CLI::App &app)
{
  auto *sub = app.add_subcommand("metrics", "Uniformity, uniqueness and BER of POP instances");
  auto  t   = std::make_shared<TargetFlags>();
  struct Flags
  {
    unsigned instances{10};
    unsigned challenges{1000};
    std::optional<double> noise;
    unsigned reevals{10};
    unsigned ber_challenges{1000};
  };
  auto f = std::make_shared<Flags>();
  t->add_pop(sub);
  sub->add_option("--instances", f->instances, "POP instances for uniformity/uniqueness")
      ->check(CLI::Range(2u, 1000000u))
      ->capture_default_str();
  sub->add_option("--challenges", f->challenges, "Shared challenges per instance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--noise", f->noise, "Evaluation noise sigma for BER (default: 0.1 * --sigma)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--reevals", f->reevals, "Re-evaluations per challenge for BER")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--ber-challenges", f->ber_challenges, "Challenges for BER")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  return [t, f](Context &ctx) {
    auto const cfg = t->pop(ctx.common);
    auto const q   = pop_quality(cfg, f->instances, f->challenges, derive_seed(ctx.common.seed, "metrics", 0),
                                 ctx.common.threads);
    double const     sigma_noise = f->noise.value_or(0.1 * cfg.stage_sigma);
    NoiseModel const noise{sigma_noise, derive_seed(ctx.common.seed, "eval", 0)};
    auto const       b = pop_ber(cfg, noise, f->ber_challenges, f->reevals, derive_seed(ctx.common.seed, "ber", 0),
                                 ctx.common.threads);
    Table tab({"metric", "config", "value", "stderr"});
    t->describe_pop(tab, cfg);
    tab.note("instances", num(f->instances));
    tab.note("challenges", num(f->challenges));
    tab.note("sigma_noise", num(sigma_noise));
    tab.note("reevals", num(f->reevals));
    tab.note("ber_challenges", num(f->ber_challenges));
    std::string const config = "k=" + num(cfg.first_layer_stages) + ";rounds=" + num(cfg.rounds) +
                               ";votes=" + num(cfg.tmv.votes);
    tab.row({"uniformity", config, num(q.uniformity), num(q.uniformity_stderr)});
    tab.row({"uniqueness", config, num(q.uniqueness), ""});
    tab.row({"ber", config + ";sigma_noise=" + num(sigma_noise), num(b.value), num(b.std_error)});
    return tab.render("metrics", ctx.common);
  };
}

Action add_auth_sim(CLI::App &app)
{
  auto *sub = app.add_subcommand("auth-sim", "Monte Carlo authentication failure probability");
  struct Flags
  {
    double                ber{0.1};
    std::optional<double> ber_assumed;
    unsigned              crps{200};
    double                margin{0.05};
    std::uint64_t         trials{1000000};
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--ber", f->ber, "True bit error rate")->check(kProbability)->capture_default_str();
  sub->add_option("--ber-assumed", f->ber_assumed, "BER used to set the threshold (default: --ber)")
      ->check(CLI::Range(0.0, 0.999999));
  sub->add_option("--crps", f->crps, "CRPs per authentication")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--margin", f->margin, "Threshold margin below 1 - BER")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sub->add_option("--trials", f->trials, "Simulated authentications")->check(CLI::PositiveNumber)->capture_default_str();
  return [f](Context &ctx) {
    AuthPolicy policy{f->crps, f->ber_assumed.value_or(std::min(f->ber, 0.999999)), f->margin};
    if (policy.ber_assumed + policy.margin >= 1.0)
    {
      flag_error("--margin", "threshold would be zero for this BER and margin");
    }
    policy.validate();
    auto const   mc    = auth_failure_prob(policy, f->ber, f->trials, derive_seed(ctx.common.seed, "auth-sim", 0),
                                           ctx.common.threads);
    double const exact = auth_failure_exact(policy, f->ber);
    Table        tab({"metric", "config", "value", "stderr"});
    tab.note("trials", num(f->trials));
    std::string const config = "crps=" + num(policy.n_crps) + ";ber=" + num(f->ber) +
                               ";ber_assumed=" + num(policy.ber_assumed) + ";margin=" + num(policy.margin) +
                               ";threshold=" + num(policy.threshold());
    tab.row({"auth_failure", config, num(mc.value), num(mc.std_error)});
    tab.row({"auth_failure_exact", config, num(exact), num(0.0)});
    return tab.render("auth-sim", ctx.common);
  };
}

// ---------------------------------------------------------------------------
// sac / stage-bias / hd-rounds
// ---------------------------------------------------------------------------

Action add_sac(CLI::App &app)
{
  auto *sub = app.add_subcommand("sac", "Probability of output change per mismatch-pattern shift");
  auto  cfg = std::make_shared<SacConfig>();
  auto  model = std::make_shared<std::string>("stage-delays");
  sub->add_option("--size", cfg->apuf_size, "APUF stages")->check(CLI::Range(1u, 64u))->capture_default_str();
  sub->add_option("--hw", cfg->hw, "Mismatch pattern hamming weight")
      ->check(CLI::IsMember({1u, 2u}))
      ->capture_default_str();
  sub->add_option("--instances", cfg->n_instances, "APUF instances")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--challenges", cfg->n_challenges, "Challenges per instance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("--wrap", cfg->wrap, "Include the wrapped HW-2 pattern (W-1, 0)");
  sub->add_option("--sigma", cfg->stage_sigma, "Stage delay standard deviation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--model", *model, "Weight model")->check(kModel)->capture_default_str();
  return [cfg, model](Context &ctx) {
    SacConfig c = *cfg;
    if (c.hw == 2 && c.apuf_size < 2)
    {
      flag_error("--size", "HW-2 patterns need at least 2 stages");
    }
    c.seed    = derive_seed(ctx.common.seed, "sac", 0);
    c.model   = weight_model_from_string(*model);
    c.threads = ctx.common.threads;
    Table tab({"shift", "prob", "stderr"});
    tab.note("size", num(c.apuf_size));
    tab.note("hw", num(c.hw));
    tab.note("instances", num(c.n_instances));
    tab.note("challenges", num(c.n_challenges));
    tab.note("wrap", c.wrap ? "1" : "0");
    tab.note("stage_sigma", num(c.stage_sigma));
    tab.note("model", *model);
    for (auto const &p : sac_curve(c))
    {
      tab.row({num(p.index), num(p.value), num(p.std_error)});
    }
    return tab.render("sac", ctx.common);
  };
}

Action add_stage_bias(CLI::App &app)
{
  auto *sub = app.add_subcommand("stage-bias", "Stage bias distribution over APUF instances");
  struct Flags
  {
    unsigned      size{8};
    unsigned      instances{100};
    std::uint64_t crps{3000};
    bool          exhaustive{false};
    unsigned      histogram{0};
    double        sigma{1.0};
    std::string   model{"stage-delays"};
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--size", f->size, "APUF stages")->check(CLI::Range(1u, 64u))->capture_default_str();
  sub->add_option("--instances", f->instances, "APUF instances")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--crps", f->crps, "Random CRPs per instance")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_flag("--exhaustive", f->exhaustive, "Enumerate all 2^n challenges (n <= 24)");
  sub->add_option("--histogram", f->histogram, "Emit an N-bin histogram of all entries instead of the summary")
      ->check(CLI::Range(0u, 10000u))
      ->capture_default_str();
  sub->add_option("--sigma", f->sigma, "Stage delay standard deviation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--model", f->model, "Weight model")->check(kModel)->capture_default_str();
  return [f](Context &ctx) {
    if (f->exhaustive && f->size > 24)
    {
      flag_error("--exhaustive", "enumeration is limited to --size <= 24");
    }
    auto const s = stage_bias_distribution(f->size, f->instances, f->crps, derive_seed(ctx.common.seed, "stage-bias", 0),
                                           f->exhaustive, f->sigma, weight_model_from_string(f->model),
                                           ctx.common.threads);
    std::vector<std::string> columns = f->histogram ? std::vector<std::string>{"bin_low", "bin_high", "count"}
                                                    : std::vector<std::string>{"size", "instances", "crps", "mean",
                                                                               "std", "entries", "absent"};
    Table tab(columns);
    tab.note("size", num(f->size));
    tab.note("instances", num(f->instances));
    tab.note("crps", f->exhaustive ? std::string("all") : num(f->crps));
    tab.note("stage_sigma", num(f->sigma));
    tab.note("model", f->model);
    if (f->histogram)
    {
      std::vector<std::uint64_t> bins(f->histogram, 0);
      for (double v : s.samples)
      {
        auto b = static_cast<std::size_t>(v * f->histogram);
        bins[std::min<std::size_t>(b, f->histogram - 1)]++;
      }
      for (unsigned b = 0; b < f->histogram; ++b)
      {
        tab.row({num(static_cast<double>(b) / f->histogram), num(static_cast<double>(b + 1) / f->histogram),
                 num(bins[b])});
      }
    }
    else
    {
      tab.row({num(f->size), num(f->instances), f->exhaustive ? std::string("all") : num(f->crps), num(s.mean),
               num(s.stddev), num(static_cast<std::uint64_t>(s.samples.size())), num(s.absent)});
    }
    return tab.render("stage-bias", ctx.common);
  };
}

Action add_hd_rounds(CLI::App &app)
{
  auto *sub = app.add_subcommand("hd-rounds", "Hamming distance of first-layer responses across rounds or challenges");
  auto  t   = std::make_shared<TargetFlags>();
  t->k      = 2;
  t->rounds = 5;
  struct Flags
  {
    std::string mode{"inter"};
    std::string round_list{"1,2,4,8"};
    unsigned    instances{20};
    unsigned    challenges{1000};
  };
  auto f = std::make_shared<Flags>();
  t->add_pop(sub);
  sub->add_option("--mode", f->mode, "inter: consecutive rounds, same challenge; cross: independent challenges")
      ->check(CLI::IsMember({"inter", "cross"}))
      ->capture_default_str();
  sub->add_option("--round-list", f->round_list, "Round counts for --mode cross")->capture_default_str();
  sub->add_option("--instances", f->instances, "POP instances")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--challenges", f->challenges, "Challenges (or challenge pairs) per instance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  return [t, f](Context &ctx) {
    HdConfig cfg;
    cfg.pop          = t->pop(ctx.common);
    cfg.n_instances  = f->instances;
    cfg.n_challenges = f->challenges;
    cfg.seed         = derive_seed(ctx.common.seed, "hd-rounds", 0);
    cfg.threads      = ctx.common.threads;
    if (f->mode == "inter")
    {
      if (cfg.pop.rounds < 2)
      {
        flag_error("--rounds", "--mode inter needs at least 2 rounds");
      }
      Table tab({"from_round", "to_round", "distance", "stderr"});
      t->describe_pop(tab, cfg.pop);
      tab.note("mode", f->mode);
      tab.note("instances", num(f->instances));
      tab.note("challenges", num(f->challenges));
      for (auto const &d : interround_hd(cfg))
      {
        tab.row({num(d.from_round), num(d.to_round), num(d.distance), num(d.std_error)});
      }
      return tab.render("hd-rounds", ctx.common);
    }
    auto const rounds = parse_list("--round-list", f->round_list);
    Table      tab({"rounds", "distance", "stderr"});
    t->describe_pop(tab, cfg.pop);
    tab.note("mode", f->mode);
    tab.note("round_list", join(rounds));
    tab.note("instances", num(f->instances));
    tab.note("challenges", num(f->challenges));
    for (auto const &p : cross_challenge_hd(cfg, rounds))
    {
      tab.row({num(p.index), num(p.value), num(p.std_error)});
    }
    return tab.render("hd-rounds", ctx.common);
  };
}

// ---------------------------------------------------------------------------
// attacks
// ---------------------------------------------------------------------------

struct TrainFlags
{
  std::uint64_t train{0};
  std::uint64_t test{0};
  unsigned      epochs{0};
  double        learning_rate{0.0};
  double        budget{3600.0};
};

void add_train_flags(CLI::App *sub, TrainFlags &f)
{
  sub->add_option("--train", f.train, "Training CRPs")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--test", f.test, "Held-out test CRPs")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--epochs", f.epochs, "Training epochs (LR: gradient steps)")->capture_default_str();
  sub->add_option("--lr", f.learning_rate, "Learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--budget", f.budget, "Training time budget in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

Action add_attack_lr(CLI::App &app)
{
  auto *sub = app.add_subcommand("attack-lr", "Logistic-regression modeling attack on a single APUF");
  auto  t   = std::make_shared<TargetFlags>();
  auto  f   = std::make_shared<TrainFlags>();
  auto  lr  = TrainConfig::for_lr();
  f->train  = 50000;
  f->test   = 10000;
  f->epochs = lr.epochs;
  f->learning_rate = lr.learning_rate;
  t->add_apuf(sub);
  add_train_flags(sub, *f);
  return [t, f](Context &ctx) {
    auto cfg          = TrainConfig::for_lr();
    cfg.epochs        = f->epochs;
    cfg.learning_rate = f->learning_rate;
    cfg.budget_seconds = f->budget;
    cfg.seed          = derive_seed(ctx.common.seed, "train", 0);
    auto const report = run_lr_attack(t->apuf(ctx.common), f->train, f->test, cfg, ctx.common.seed, ctx.common.threads);
    auto       j      = report.to_json(!ctx.common.no_timestamp);
    j["epochs"]        = cfg.epochs;
    j["learning_rate"] = cfg.learning_rate;
    return render_json(std::move(j), ctx.common);
  };
}

/// Desk-scale MLP preset.

Action add_attack_mlp(CLI::App &app)
{
  auto *sub = app.add_subcommand("attack-mlp", "Multilayer-perceptron modeling attack on a POP composition");
  auto  t   = std::make_shared<TargetFlags>();
  auto  f   = std::make_shared<TrainFlags>();
  struct Extra
  {
    unsigned    batch{256};
    std::string hidden{"128,128,128"};
    double      validation{0.05};
  };
  auto e    = std::make_shared<Extra>();
  t->k      = 2;
  f->train  = kDeskTrain;
  f->test   = kDeskTest;
  f->epochs = kDeskEpochs;
  f->learning_rate = TrainConfig::for_mlp().learning_rate;
  t->add_pop(sub);
  add_train_flags(sub, *f);
  sub->add_option("--batch", e->batch, "Minibatch size")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--hidden", e->hidden, "Hidden layer widths, comma separated")->capture_default_str();
  sub->add_option("--validation", e->validation, "Validation fraction for best-epoch selection")
      ->check(CLI::Range(0.0, 0.5))
      ->capture_default_str();
  return [t, f, e](Context &ctx) {
    auto cfg                = TrainConfig::for_mlp();
    cfg.epochs              = f->epochs;
    cfg.learning_rate       = f->learning_rate;
    cfg.budget_seconds      = f->budget;
    cfg.batch_size          = e->batch;
    cfg.hidden              = parse_list("--hidden", e->hidden);
    cfg.validation_fraction = e->validation;
    cfg.seed                = derive_seed(ctx.common.seed, "train", 0);
    auto const report = run_mlp_attack(t->pop(ctx.common), f->train, f->test, cfg, ctx.common.seed, ctx.common.threads);
    auto       j      = report.to_json(!ctx.common.no_timestamp);
    j["epochs"]        = cfg.epochs;
    j["learning_rate"] = cfg.learning_rate;
    j["batch_size"]    = cfg.batch_size;
    j["hidden"]        = cfg.hidden;
    return render_json(std::move(j), ctx.common);
  };
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

struct ReproduceFlags
{
  std::string   target;
  unsigned      instances{0};
  unsigned      challenges{0};
  std::uint64_t trials{0};
  std::uint64_t train{0};
  std::uint64_t test{0};
  unsigned      epochs{0};
};

template <typename T>
T pick(T override_value, T default_value)
{
  return override_value ? override_value : default_value;
}

std::string reproduce_fig4(ReproduceFlags const &f, Context &ctx)
{
  std::uint64_t const trials = pick<std::uint64_t>(f.trials, 1000000);
  Table               tab({"ber", "crps", "threshold", "failure", "stderr", "exact"});
  tab.note("trials", num(trials));
  tab.note("margin", num(0.05));
  unsigned row = 0;
  for (double ber : {0.1, 0.2, 0.3})
  {
    for (unsigned crps = 50; crps <= 500; crps += 50)
    {
      AuthPolicy const policy{crps, ber, 0.05};
      auto const       mc = auth_failure_prob(policy, ber, trials, derive_seed(ctx.common.seed, "fig4", row++),
                                              ctx.common.threads);
      tab.row({num(ber), num(crps), num(policy.threshold()), num(mc.value), num(mc.std_error),
               num(auth_failure_exact(policy, ber))});
    }
  }
  return tab.render("reproduce fig4", ctx.common);
}

std::string reproduce_fig9a(ReproduceFlags const &f, Context &ctx)
{
  Table tab({"hw", "shift", "prob", "stderr"});
  SacConfig base;
  base.apuf_size    = 64;
  base.n_instances  = pick(f.instances, 100u);
  base.n_challenges = pick(f.challenges, 10000u);
  base.threads      = ctx.common.threads;
  tab.note("size", "64");
  tab.note("instances", num(base.n_instances));
  tab.note("challenges", num(base.n_challenges));
  for (unsigned hw : {1u, 2u})
  {
    SacConfig c = base;
    c.hw        = hw;
    c.seed      = derive_seed(ctx.common.seed, "fig9a", hw);
    for (auto const &p : sac_curve(c))
    {
      tab.row({num(hw), num(p.index), num(p.value), num(p.std_error)});
    }
  }
  return tab.render("reproduce fig9a", ctx.common);
}

std::string reproduce_fig9b(ReproduceFlags const &f, Context &ctx)
{
  Table    tab({"size", "prob", "stderr"});
  unsigned instances  = pick(f.instances, 1000u);
  unsigned challenges = pick(f.challenges, 1000u);
  tab.note("hw", "2");
  tab.note("instances", num(instances));
  tab.note("challenges", num(challenges));
  for (unsigned size : {24u, 12u, 8u, 6u, 4u, 2u})
  {
    SacConfig c;
    c.apuf_size    = size;
    c.hw           = 2;
    c.n_instances  = instances;
    c.n_challenges = challenges;
    c.seed         = derive_seed(ctx.common.seed, "fig9b", size);
    c.threads      = ctx.common.threads;
    auto const m   = sac_mean(c);
    tab.row({num(size), num(m.value), num(m.std_error)});
  }
  return tab.render("reproduce fig9b", ctx.common);
}

std::string reproduce_fig10(ReproduceFlags const &f, Context &ctx)
{
  Table         tab({"size", "mean", "std", "entries", "absent"});
  unsigned      instances = pick(f.instances, 100u);
  std::uint64_t crps      = pick<std::uint64_t>(f.challenges, 3000);
  tab.note("instances", num(instances));
  tab.note("crps", num(crps));
  for (unsigned size : {24u, 8u, 4u, 2u})
  {
    auto const s = stage_bias_distribution(size, instances, crps, derive_seed(ctx.common.seed, "fig10", size), false,
                                           1.0, WeightModel::kStageDelays, ctx.common.threads);
    tab.row({num(size), num(s.mean), num(s.stddev), num(static_cast<std::uint64_t>(s.samples.size())), num(s.absent)});
  }
  return tab.render("reproduce fig10", ctx.common);
}

constexpr unsigned kFig11Sizes[] = {2, 4, 6, 8, 12, 24};

HdConfig fig11_config(ReproduceFlags const &f, Context &ctx, unsigned k, unsigned rounds, char const *tag)
{
  HdConfig cfg;
  cfg.pop.first_layer_stages = k;
  cfg.pop.rounds             = rounds;
  cfg.n_instances            = pick(f.instances, 20u);
  cfg.n_challenges           = pick(f.challenges, 1000u);
  cfg.seed                   = derive_seed(ctx.common.seed, tag, k);
  cfg.threads                = ctx.common.threads;
  return cfg;
}

std::string reproduce_fig11a(ReproduceFlags const &f, Context &ctx)
{
  Table tab({"k", "from_round", "to_round", "distance", "stderr"});
  tab.note("instances", num(pick(f.instances, 20u)));
  tab.note("challenges", num(pick(f.challenges, 1000u)));
  for (unsigned k : kFig11Sizes)
  {
    for (auto const &d : interround_hd(fig11_config(f, ctx, k, 5, "fig11a")))
    {
      tab.row({num(k), num(d.from_round), num(d.to_round), num(d.distance), num(d.std_error)});
    }
  }
  return tab.render("reproduce fig11a", ctx.common);
}

std::string reproduce_fig11b(ReproduceFlags const &f, Context &ctx)
{
  Table tab({"k", "rounds", "distance", "stderr"});
  tab.note("instances", num(pick(f.instances, 20u)));
  tab.note("challenges", num(pick(f.challenges, 1000u)));
  std::vector<unsigned> const rounds{1, 2, 4, 8};
  for (unsigned k : kFig11Sizes)
  {
    for (auto const &p : cross_challenge_hd(fig11_config(f, ctx, k, 1, "fig11b"), rounds))
    {
      tab.row({num(k), num(p.index), num(p.value), num(p.std_error)});
    }
  }
  return tab.render("reproduce fig11b", ctx.common);
}

std::string reproduce_table2(ReproduceFlags const &f, Context &ctx)
{
  std::vector<std::pair<unsigned, unsigned>> const rows{{2, 1},  {4, 1},  {6, 1},  {8, 1}, {12, 1}, {24, 1},
                                                        {2, 2},  {2, 4},  {2, 8},  {24, 2}, {24, 4}, {24, 8}};
  Table2Budget const budget{pick(f.train, kDeskTrain), pick(f.test, kDeskTest), pick(f.epochs, kDeskEpochs)};
  TrainConfig const  cfg = TrainConfig::for_mlp();

  std::vector<std::string> columns{"k", "rounds", "train_crps", "test_crps", "epochs", "accuracy"};
  if (!ctx.common.no_timestamp)
  {
    columns.emplace_back("seconds");
  }
  Table tab(columns);
  tab.note("hidden", join(cfg.hidden));
  tab.note("batch_size", num(cfg.batch_size));
  tab.note("learning_rate", num(cfg.learning_rate));
  for (auto const &[k, rounds] : rows)
  {
    auto const report = table2_attack(ctx.common.seed, k, rounds, budget, ctx.common.threads);
    std::vector<std::string> cells{num(k), num(rounds), num(budget.train), num(budget.test),
                                   num(report.epochs_completed), num(report.test_accuracy)};
    if (!ctx.common.no_timestamp)
    {
      cells.push_back(num(report.training_seconds));
    }
    tab.row(std::move(cells));
  }
  return tab.render("reproduce table2", ctx.common);
}

Action add_reproduce(CLI::App &app)
{
  auto *sub = app.add_subcommand("reproduce", "Run a predefined experiment");
  auto  f   = std::make_shared<ReproduceFlags>();
  sub->add_option("target", f->target, "fig4 | fig9a | fig9b | fig10 | fig11a | fig11b | table2")
      ->required()
      ->check(CLI::IsMember({"fig4", "fig9a", "fig9b", "fig10", "fig11a", "fig11b", "table2"}));
  sub->add_option("--instances", f->instances, "Override instance count (0 = target default)");
  sub->add_option("--challenges", f->challenges, "Override challenges / CRPs per instance (0 = target default)");
  sub->add_option("--trials", f->trials, "Override Monte Carlo trials for fig4 (0 = default)");
  sub->add_option("--train", f->train, "Override training CRPs for table2 (0 = default)");
  sub->add_option("--test", f->test, "Override test CRPs for table2 (0 = default)");
  sub->add_option("--epochs", f->epochs, "Override training epochs for table2 (0 = default)");
  return [f](Context &ctx) {
    static std::map<std::string, std::string (*)(ReproduceFlags const &, Context &)> const targets{
        {"fig4", reproduce_fig4},     {"fig9a", reproduce_fig9a},   {"fig9b", reproduce_fig9b},
        {"fig10", reproduce_fig10},   {"fig11a", reproduce_fig11a}, {"fig11b", reproduce_fig11b},
        {"table2", reproduce_table2}};
    return targets.at(f->target)(*f, ctx);
  };
}

void append_options(std::ostringstream &s, CLI::App const &app)
{
  for (auto const *opt : app.get_options())
  {
    std::string const name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "version" || name == "config" || name == "save-config")
    {
      continue;
    }
    std::string value;
    if (opt->count() > 0)
    {
      value = opt->results().back();
    }
    else
    {
      value = opt->get_default_str();
    }
    if (value.empty())
    {
      continue;
    }
    if (value == "true" || value == "false")
    {
      s << name << '=' << value << '\n';
    }
    else
    {
      s << name << "=\"" << value << "\"\n";
    }
  }
}

/// Top-level options plus those of the chosen subcommand, as TOML.
std::string effective_config(CLI::App const &app, CLI::App const &sub)
{
  std::ostringstream s;
  append_options(s, app);
  s << '[' << sub.get_name() << "]\n";
  append_options(s, sub);
  return s.str();
}

CLI::App const *deepest_parsed(CLI::App const &app)
{
  for (auto const *sub : app.get_subcommands())
  {
    return deepest_parsed(*sub);
  }
  return &app;
}

}  // namespace

AttackReport table2_attack(std::uint64_t seed, unsigned k, unsigned rounds, Table2Budget const &budget,
                           unsigned threads)
{
  TrainConfig cfg = TrainConfig::for_mlp();
  cfg.epochs      = budget.epochs;
  cfg.seed        = derive_seed(seed, "train", 0);
  PopConfig pop;
  pop.first_layer_stages = k;
  pop.rounds             = rounds;
  pop.master_seed        = derive_seed(seed, "table2-instance", k);
  return run_mlp_attack(pop, budget.train, budget.test, cfg, derive_seed(seed, "table2", k * 100 + rounds), threads);
}

int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"popsim: arbiter PUF and PUF-on-PUF simulation toolkit", "popsim"};
  app.set_version_flag("--version", std::string("popsim ") + POPSIM_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Context ctx;
  app.add_option("--seed", ctx.common.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", ctx.common.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();
  app.add_option("--out", ctx.common.out, "Output file (default: stdout); base path for gen-crps");
  app.add_flag("--no-timestamp", ctx.common.no_timestamp, "Omit wall-clock fields so output is byte-identical");
  app.add_option("--save-config", ctx.common.save_config, "Write the effective configuration to this file");
  app.set_config("--config", "", "Read options from a TOML/INI file");

  std::vector<std::pair<CLI::App *, Action>> actions;
  auto register_action = [&](Action a) {
    actions.emplace_back(app.get_subcommands({}).back(), std::move(a));
  };
  register_action(add_gen_instance(app));
  register_action(add_gen_crps(app));
  register_action(add_metrics(app));
  register_action(add_auth_sim(app));
  register_action(add_sac(app));
  register_action(add_stage_bias(app));
  register_action(add_hd_rounds(app));
  register_action(add_attack_lr(app));
  register_action(add_attack_mlp(app));
  register_action(add_reproduce(app));

  try
  {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  }
  catch (CLI::ParseError const &e)
  {
    if (e.get_exit_code() == 0)
    {
      return app.exit(e, out, err);
    }
    err << "error: " << e.what() << "\n\n" << deepest_parsed(app)->help();
    return kInvalid;
  }

  Action const   *action = nullptr;
  CLI::App const *chosen = nullptr;
  for (auto const &[sub, a] : actions)
  {
    if (sub->parsed())
    {
      action = &a;
      chosen = sub;
    }
  }

  std::string text;
  try
  {
    if (!ctx.common.save_config.empty())
    {
      std::ofstream cfg(ctx.common.save_config);
      if (!(cfg << effective_config(app, *chosen)))
      {
        throw std::runtime_error("cannot write config file " + ctx.common.save_config);
      }
    }
    text = (*action)(ctx);
    if (!ctx.common.out.empty() && !ctx.wrote_files)
    {
      std::ofstream file(ctx.common.out, std::ios::binary);
      if (!(file << text))
      {
        throw std::runtime_error("cannot write " + ctx.common.out);
      }
    }
    else
    {
      out << text;
    }
  }
  catch (ValidationError const &e)
  {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  catch (std::exception const &e)
  {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kOk;
}

}  // namespace popsim::cli
