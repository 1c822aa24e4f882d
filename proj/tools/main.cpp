// SPDX-License-Identifier: MIT
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "refundlab/adversary.hpp"
#include "refundlab/certify.hpp"
#include "refundlab/distribution.hpp"
#include "refundlab/evaluate.hpp"
#include "refundlab/figures.hpp"
#include "refundlab/market.hpp"
#include "refundlab/mechanism.hpp"
#include "refundlab/policy.hpp"
#include "refundlab/rng.hpp"

namespace {

using nlohmann::json;
using namespace refundlab;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::size_t worker_count() {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("REFUND_LAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1)
      throw ConfigError("REFUND_LAB_THREADS must be a positive integer");
    n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

// Runs fn(0..count-1) on a worker pool; results must be written to
// index-addressed slots so output order never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t threads = std::min(worker_count(), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// scenario plumbing

struct PolicySpec {
  std::string label;
  std::string name;  // one of the named policies; empty for file policies
  std::string file;
};

struct DistSpec {
  std::string label;
  std::string name;
  std::string file;
};

struct Scenario {
  double mu = 0.75;
  double gamma = 0.8;
  std::vector<PolicySpec> policies;
  std::vector<DistSpec> distributions;
  std::size_t grid_n = 10001;
  std::size_t mc_n = 0;
  std::optional<std::uint64_t> seed;
  TieRule tie = TieRule::kAdversarial;
  std::string out;
};

const char* kPolicyNames[] = {"robust_random_pricing", "generous_refund",
                              "random_discounting", "robust_refund_policy"};
const char* kDistNames[] = {"worst_case", "rs", "point_mass", "full_info"};

bool is_named_policy(const std::string& s) {
  for (const char* name : kPolicyNames)
    if (s == name) return true;
  return false;
}

bool is_named_dist(const std::string& s) {
  for (const char* name : kDistNames)
    if (s == name) return true;
  return false;
}

PolicySpec parse_policy_spec(const std::string& s) {
  if (is_named_policy(s)) return PolicySpec{s, s, ""};
  return PolicySpec{s, "", s};
}

DistSpec parse_dist_spec(const std::string& s) {
  if (is_named_dist(s)) return DistSpec{s, s, ""};
  return DistSpec{s, "", s};
}

TieRule parse_tie(const std::string& s) {
  if (s == "adversarial") return TieRule::kAdversarial;
  if (s == "favorable") return TieRule::kFavorable;
  throw ConfigError("tie must be 'adversarial' or 'favorable', got '" + s +
                    "'");
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("read error on " + path);
  return ss.str();
}

Scenario load_scenario(const std::string& path) {
  json doc;
  try {
    doc = json::parse(slurp(path));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  static const std::vector<std::string> known = {
      "mu",     "gamma", "c",    "v_bar", "policies", "distributions",
      "grid_n", "mc_n",  "seed", "tie",   "out"};
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(path + ": unknown scenario key '" + key + "'");
  }
  Scenario sc;
  try {
    if (doc.contains("mu")) sc.mu = doc["mu"].get<double>();
    if (doc.contains("c") || doc.contains("v_bar")) {
      if (!doc.contains("c") || !doc.contains("v_bar"))
        throw ConfigError(path + ": c and v_bar must be given together");
      if (doc.contains("gamma"))
        throw ConfigError(path + ": give either gamma or (c, v_bar)");
      sc.gamma = rescale_market(doc["v_bar"].get<double>(),
                                doc["c"].get<double>())
                     .marginal_signal;
    } else if (doc.contains("gamma")) {
      sc.gamma = doc["gamma"].get<double>();
    }
    if (doc.contains("policies"))
      for (const auto& p : doc["policies"])
        sc.policies.push_back(parse_policy_spec(p.get<std::string>()));
    if (doc.contains("distributions"))
      for (const auto& d : doc["distributions"])
        sc.distributions.push_back(parse_dist_spec(d.get<std::string>()));
    if (doc.contains("grid_n")) sc.grid_n = doc["grid_n"].get<std::size_t>();
    if (doc.contains("mc_n")) sc.mc_n = doc["mc_n"].get<std::size_t>();
    if (doc.contains("seed")) sc.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("tie")) sc.tie = parse_tie(doc["tie"].get<std::string>());
    if (doc.contains("out")) sc.out = doc["out"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return sc;
}

PricingPolicy build_policy(const PolicySpec& spec, const MarketParams& params,
                           std::optional<NamedPolicy>* kind) {
  if (kind) kind->reset();
  if (!spec.name.empty()) {
    if (spec.name == "robust_random_pricing") {
      if (kind) *kind = NamedPolicy::kRobustRandomPricing;
      return robust_random_pricing(params.mu);
    }
    if (spec.name == "generous_refund") {
      if (kind) *kind = NamedPolicy::kGenerousRefund;
      return generous_refund();
    }
    if (spec.name == "random_discounting") {
      if (kind) *kind = NamedPolicy::kRandomDiscounting;
      return random_discounting(params);
    }
    if (kind) *kind = NamedPolicy::kRobustRefundPolicy;
    return robust_refund_policy(params);
  }
  std::istringstream is(slurp(spec.file));
  try {
    return read_policy_json(is);
  } catch (const std::exception& e) {
    throw ConfigError(spec.file + ": " + e.what());
  }
}

SignalDistribution build_dist(const DistSpec& spec,
                              const MarketParams& params) {
  if (spec.name == "worst_case") return make_worst_case(params);
  if (spec.name == "rs") return make_rs(params.mu);
  if (spec.name == "point_mass") return make_point_mass(params.mu);
  if (spec.name == "full_info") return make_full_info(params.mu);
  std::istringstream is(slurp(spec.file));
  try {
    return read_discrete_csv(is);
  } catch (const std::exception& e) {
    throw ConfigError(spec.file + ": " + e.what());
  }
}

void default_policies(Scenario& sc) {
  if (!sc.policies.empty()) return;
  const MarketParams params(sc.mu, sc.gamma);
  const RobustSolution sol = best_guaranteed_profit(params);
  sc.policies.push_back(parse_policy_spec("robust_random_pricing"));
  if (sc.gamma < 1.0) sc.policies.push_back(parse_policy_spec("generous_refund"));
  if (sol.branch == CostBranch::kHigh)
    sc.policies.push_back(parse_policy_spec("random_discounting"));
  sc.policies.push_back(parse_policy_spec("robust_refund_policy"));
}

void default_distributions(Scenario& sc) {
  if (!sc.distributions.empty()) return;
  for (const char* name : kDistNames)
    sc.distributions.push_back(parse_dist_spec(name));
}

// Writes rows to `out` (or stdout when empty).
void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot open " + out + " for writing");
  f << text;
  f.flush();
  if (!f) throw IoError("write error on " + out);
}

// ---------------------------------------------------------------------------
// verbs

int cmd_compute(double mu, std::optional<double> gamma,
                std::optional<double> cost, std::optional<double> v_bar) {
  std::optional<RescaledMarket> rescaled;
  if (cost || v_bar) {
    if (!cost || !v_bar || gamma)
      throw ConfigError("give either --gamma or both --cost and --match-value");
    rescaled = rescale_market(*v_bar, *cost);
    gamma = rescaled->marginal_signal;
  }
  if (!gamma) throw ConfigError("either --gamma or --cost/--match-value is required");
  const MarketParams params(mu, *gamma);
  const RobustSolution sol = best_guaranteed_profit(params);
  std::ostringstream os;
  os << "mu          " << format_value(params.mu) << '\n'
     << "gamma       " << format_value(params.gamma) << '\n'
     << "c           " << format_value(params.raw_cost()) << '\n'
     << "gamma_bar   " << format_value(sol.gamma_bar) << '\n'
     << "branch      " << (sol.branch == CostBranch::kLow ? "low" : "high")
     << '\n'
     << "v_star      " << format_value(sol.v_star) << '\n'
     << "beta_star   " << format_value(sol.beta_star) << '\n';
  if (sol.branch == CostBranch::kHigh)
    os << "discounting [" << format_value(sol.v_star) << ", "
       << format_value(params.gamma) << "]\n";
  else
    os << "discounting none (generous refund alone)\n";
  if (rescaled)
    os << "scale       " << format_value(rescaled->scale) << '\n'
       << "gamma_tilde " << format_value(rescaled->gamma_tilde) << '\n';
  std::cout << os.str();
  return 0;
}

int cmd_evaluate(Scenario sc) {
  default_policies(sc);
  default_distributions(sc);
  if (sc.mc_n > 0 && !sc.seed)
    throw ConfigError("--seed is required when Monte Carlo rounds are requested");
  const MarketParams params(sc.mu, sc.gamma);

  struct Job {
    std::size_t policy_index, dist_index;
    Rng rng;
  };
  std::vector<Job> jobs;
  Rng base = sc.seed ? Rng::seeded(*sc.seed) : Rng::seeded(0);
  for (std::size_t pi = 0; pi < sc.policies.size(); ++pi)
    for (std::size_t di = 0; di < sc.distributions.size(); ++di)
      jobs.push_back(Job{pi, di, base.split()});

  std::vector<std::string> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto& job = jobs[j];
    const auto& pspec = sc.policies[job.policy_index];
    const auto& dspec = sc.distributions[job.dist_index];
    std::optional<NamedPolicy> kind;
    const PricingPolicy policy = build_policy(pspec, params, &kind);
    const SignalDistribution dist = build_dist(dspec, params);
    std::ostringstream os;
    const std::string prefix = pspec.label + "," + dspec.label + ",";
    if (kind)
      os << prefix << "closed_form,"
         << format_value(profit_closed_form(*kind, dist, params)) << ",0\n";
    os << prefix << "generic,"
       << format_value(profit_generic(policy, dist, params, sc.tie)) << ",0\n";
    if (sc.mc_n > 0) {
      Rng stream = job.rng;
      const auto mc = monte_carlo(policy, dist, params, sc.tie, sc.mc_n, stream);
      os << prefix << "monte_carlo," << format_value(mc.estimate) << ','
         << format_value(mc.std_error) << '\n';
    }
    rows[j] = os.str();
  });

  std::string text = "policy,distribution,route,value,std_error\n";
  for (const auto& row : rows) text += row;
  emit(sc.out, text);
  return 0;
}

int cmd_adversary(Scenario sc) {
  default_policies(sc);
  const MarketParams params(sc.mu, sc.gamma);
  std::vector<std::string> rows(sc.policies.size());
  parallel_for(sc.policies.size(), [&](std::size_t i) {
    const auto& spec = sc.policies[i];
    const PricingPolicy policy = build_policy(spec, params, nullptr);
    const auto prof = profile(policy, params, sc.tie);
    const auto env = worst_case(prof, params.mu, sc.grid_n);
    const double oracle = worst_case_oracle(prof, params.mu, sc.grid_n);
    std::string witness;
    for (const Atom& a : env.witness.atoms()) {
      if (!witness.empty()) witness += '|';
      witness += format_value(a.location) + ":" + format_value(a.mass);
    }
    rows[i] = spec.label + "," + format_value(env.value) + "," +
              format_value(oracle) + "," + format_value(env.chord_lower) +
              "," + format_value(env.chord_upper) + "," + witness + "\n";
  });
  std::string text =
      "policy,worst_case_value,oracle_value,chord_lower,chord_upper,witness\n";
  for (const auto& row : rows) text += row;
  emit(sc.out, text);
  return 0;
}

int cmd_mechanism(Scenario sc) {
  default_distributions(sc);
  const MarketParams params(sc.mu, sc.gamma);
  const RobustSolution sol = best_guaranteed_profit(params);
  std::vector<std::string> rows(sc.distributions.size());
  parallel_for(sc.distributions.size(), [&](std::size_t i) {
    const auto& spec = sc.distributions[i];
    const SignalDistribution dist = build_dist(spec, params);
    const auto opt = optimal_mechanism_discretized(dist, params, sc.grid_n);
    std::string threshold = "inf";
    for (std::size_t k = 0; k < opt.alloc.alpha0.size(); ++k)
      if (opt.alloc.alpha0[k] == 1.0) {
        threshold = format_value(opt.alloc.grid[k]);
        break;
      }
    rows[i] = spec.label + "," + format_value(opt.value) + "," +
              format_value(opt.buyer_payoff) + "," + threshold + "," +
              format_value(sol.v_star) + "\n";
  });
  std::string text = "distribution,value,buyer_payoff,threshold,v_star\n";
  for (const auto& row : rows) text += row;
  emit(sc.out, text);
  return 0;
}

int cmd_figures(double mu, std::vector<double> gammas, double fig2_step,
                const std::string& out_dir) {
  if (gammas.empty()) gammas = {0.25, 0.8};
  if (!(fig2_step > 0.0 && fig2_step <= 1.0))
    throw ConfigError("--fig2-step must be in (0, 1]");
  for (double gamma : gammas) {
    const MarketParams params(mu, gamma);
    std::ostringstream os;
    write_fig1_csv(os, params);
    emit(out_dir + "/" + fig1_file_name(gamma), os.str());
  }
  const auto n = static_cast<std::size_t>(std::lround(1.0 / fig2_step));
  std::vector<double> grid;
  for (std::size_t i = 0; i <= n; ++i)
    grid.push_back(static_cast<double>(i) / static_cast<double>(n));
  std::ostringstream os;
  write_fig2_csv(os, mu, grid);
  emit(out_dir + "/fig2.csv", os.str());
  return 0;
}

int cmd_certify(const std::string& fixtures_dir) {
  const auto results = run_certification(fixtures_dir);
  print_results(std::cout, results);
  return all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust pricing with refunds: guarantees, worst cases, "
               "mechanisms and figure data"};
  app.require_subcommand(1);

  double mu = 0.75;
  std::optional<double> gamma_opt, cost_opt, v_bar_opt;
  auto* compute = app.add_subcommand(
      "compute", "Best guaranteed-profit and refund-policy weights");
  compute->add_option("--mu", mu, "prior mean of the valuation")->required();
  compute->add_option("--gamma", gamma_opt, "normalized restocking cost");
  compute->add_option("--cost", cost_opt, "raw restocking cost c");
  compute->add_option("--match-value", v_bar_opt, "match value v_bar");

  std::string scenario_path, out_path, tie_name, policy_dir_fixtures;
  std::vector<std::string> policy_args, dist_args;
  std::optional<double> mu_opt2, gamma_opt2;
  std::optional<std::size_t> grid_opt, mc_opt;
  std::optional<std::uint64_t> seed_opt;
  auto add_scenario_flags = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "JSON scenario file");
    cmd->add_option("--mu", mu_opt2, "prior mean override");
    cmd->add_option("--gamma", gamma_opt2, "normalized cost override");
    cmd->add_option("--policy", policy_args,
                    "named policy or policy JSON file (repeatable)");
    cmd->add_option("--dist", dist_args,
                    "named distribution or discrete CSV file (repeatable)");
    cmd->add_option("--grid-n", grid_opt, "grid size override");
    cmd->add_option("--mc", mc_opt, "Monte Carlo rounds (0 disables)");
    cmd->add_option("--seed", seed_opt, "RNG seed (required with --mc)");
    cmd->add_option("--tie", tie_name, "adversarial|favorable");
    cmd->add_option("--out", out_path, "output CSV path (default stdout)");
  };
  auto* evaluate = app.add_subcommand(
      "evaluate", "Profit of policies against distributions, three routes");
  add_scenario_flags(evaluate);
  auto* adversary = app.add_subcommand(
      "adversary", "Worst-case distribution and value per policy");
  add_scenario_flags(adversary);
  auto* mechanism = app.add_subcommand(
      "mechanism", "Optimal direct mechanism per distribution");
  add_scenario_flags(mechanism);

  double fig_mu = 0.75;
  double fig2_step = 0.01;
  std::vector<double> fig_gammas;
  std::string fig_dir;
  auto* figures =
      app.add_subcommand("figures", "Emit worst-case CDF and guarantee CSVs");
  figures->add_option("--mu", fig_mu, "prior mean of the valuation");
  figures->add_option("--gamma", fig_gammas,
                      "gamma slices for the CDF files (repeatable)");
  figures->add_option("--fig2-step", fig2_step, "gamma grid step for fig2");
  figures->add_option("--out-dir", fig_dir, "output directory")->required();

  auto* certify =
      app.add_subcommand("certify", "Run the full acceptance battery");
  certify->add_option("--fixtures", policy_dir_fixtures,
                      "directory with the committed figure CSVs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (compute->parsed())
      return cmd_compute(mu, gamma_opt, cost_opt, v_bar_opt);
    if (figures->parsed())
      return cmd_figures(fig_mu, fig_gammas, fig2_step, fig_dir);
    if (certify->parsed()) return cmd_certify(policy_dir_fixtures);

    Scenario sc =
        scenario_path.empty() ? Scenario{} : load_scenario(scenario_path);
    if (mu_opt2) sc.mu = *mu_opt2;
    if (gamma_opt2) sc.gamma = *gamma_opt2;
    if (!policy_args.empty()) {
      sc.policies.clear();
      for (const auto& p : policy_args)
        sc.policies.push_back(parse_policy_spec(p));
    }
    if (!dist_args.empty()) {
      sc.distributions.clear();
      for (const auto& d : dist_args)
        sc.distributions.push_back(parse_dist_spec(d));
    }
    if (grid_opt) sc.grid_n = *grid_opt;
    if (mc_opt) sc.mc_n = *mc_opt;
    if (seed_opt) sc.seed = *seed_opt;
    if (!tie_name.empty()) sc.tie = parse_tie(tie_name);
    if (!out_path.empty()) sc.out = out_path;

    if (evaluate->parsed()) return cmd_evaluate(std::move(sc));
    if (adversary->parsed()) return cmd_adversary(std::move(sc));
    return cmd_mechanism(std::move(sc));
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
