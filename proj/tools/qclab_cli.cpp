// qclab: command-line driver for the quasicontinuum experiments.
//
//   qclab [--config FILE] [overrides] profile|bands|fracture|continue|plan
//
// Overrides use the config key names and win over the file.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "qclab/commands.hpp"
#include "qclab/config.hpp"
#include "qclab/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"1D quasicontinuum laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string potential, planner, out, alpha, epsilon, scale;
  int M = 0, N = 0, K = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
  auto* o_potential = app.add_option("--potential", potential, "pair potential (lj)");
  auto* o_M = app.add_option("-M", M, "chain half-length: atoms -M..M+1");
  auto* o_N = app.add_option("-N", N, "repatoms -N..N+1");
  auto* o_K = app.add_option("-K", K, "atomistic repatoms -K+1..K");
  auto* o_scale = app.add_option("--scale", scale, "load path Phi(s) = scale * s");
  auto* o_alpha = app.add_option("--alpha", alpha, "contraction constant (fractions like 8/9 allowed)");
  auto* o_epsilon = app.add_option("--epsilon", epsilon, "final error tolerance");
  auto* o_planner = app.add_option("--planner", planner, "endpoint | uniform | single-step");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_seed = app.add_option("--seed", seed, "random seed");

  using Command = std::function<int(const qclab::ExperimentConfig&, std::ostream&)>;
  const std::map<std::string, std::pair<std::string, Command>> commands{
      {"profile", {"potential landmarks and shape conditions", qclab::cmd_profile}},
      {"bands", {"contraction bands for alpha = 1/8, 1/4, 1/2, 8/9", qclab::cmd_bands}},
      {"fracture", {"single load step from the undeformed chain", qclab::cmd_fracture}},
      {"continue", {"plan and run a continuation", qclab::cmd_continue}},
      {"plan", {"plan a continuation without running it", qclab::cmd_plan}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : qclab::exit_code::config;
  }

  qclab::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = qclab::load_config(config_path);
    if (*o_potential) cfg.potential = potential;
    if (*o_M) cfg.M = M;
    if (*o_N) cfg.N = N;
    if (*o_K) cfg.K = K;
    if (*o_scale) cfg.scale = qclab::parse_real(scale);
    if (*o_alpha) cfg.alpha = qclab::parse_real(alpha);
    if (*o_epsilon) cfg.epsilon = qclab::parse_real(epsilon);
    if (*o_planner) cfg.planner = qclab::parse_planner(planner);
    if (*o_out) cfg.out = out;
    if (*o_seed) cfg.seed = seed;
  } catch (const qclab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return qclab::exit_code::config;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return commands.at(name).second(cfg, std::cout);
  } catch (const qclab::Error& e) {
    std::cerr << name << ": " << e.what() << '\n';
    return qclab::exit_code::violation;
  }
}
