// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Command line front end. Precedence: flags > --config file > environment
// (WIGNER_GAPS_WORKERS, workers only) > built-in defaults.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wigner_gaps/experiments.hpp"

namespace {

int env_workers() {
  const char *v = std::getenv("WIGNER_GAPS_WORKERS");
  if (v == nullptr || *v == '\0') return 1;
  try {
    return std::stoi(v);
  } catch (const std::exception &) {
    return 0;  // rejected by validation
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Gap statistics experiments for Wigner matrices"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<int> N, p;
  std::vector<double> E;
  int reps = 0, workers = 0;
  double alpha = 0, epsilon = 0, t = 0, dt = 0, eta = 0;
  std::uint64_t seed = 0;
  std::string out, law, symmetry, input;

  for (const auto &name : wgap::known_commands()) {
    auto *sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--N", N, "matrix sizes")->delimiter(',');
    sub->add_option("--reps", reps, "replicas (or coupled paths)");
    sub->add_option("--alpha", alpha, "bulk window cut");
    sub->add_option("--epsilon", epsilon, "smoothing exponent");
    sub->add_option("--p", p, "moment orders")->delimiter(',');
    sub->add_option("--t", t, "mixing / flow time");
    sub->add_option("--dt", dt, "Euler step");
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--workers", workers, "worker threads");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--law", law, "preset name or inline JSON law");
    sub->add_option("--class", symmetry, "real | complex");
    sub->add_option("--E", E, "spectral positions")->delimiter(',');
    sub->add_option("--eta", eta, "imaginary part of z");
    sub->add_option("--in", input, "input CSV for rate");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : wgap::kExitConfig;
  }

  wgap::ExperimentConfig cfg;
  cfg.workers = env_workers();
  CLI::App *sub = app.get_subcommands().front();
  cfg.command = sub->get_name();

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw wgap::Error(wgap::ErrorKind::ConfigError, "cannot read " + config_path);
      wgap::Json doc;
      try {
        doc = wgap::Json::parse(in);
      } catch (const nlohmann::json::exception &e) {
        throw wgap::Error(wgap::ErrorKind::ConfigError, std::string("bad config: ") + e.what());
      }
      const std::string cmd = cfg.command;
      wgap::merge_config(cfg, doc);
      cfg.command = cmd;
    }
  } catch (const wgap::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return wgap::kExitConfig;
  }

  auto given = [&](const char *flag) { return sub->count(flag) > 0; };
  if (given("--N")) cfg.N = N;
  if (given("--reps")) cfg.reps = reps;
  if (given("--alpha")) cfg.alpha = alpha;
  if (given("--epsilon")) cfg.epsilon = epsilon;
  if (given("--p")) cfg.p = p;
  if (given("--t")) cfg.t = t;
  if (given("--dt")) cfg.dt = dt;
  if (given("--seed")) cfg.seed = seed;
  if (given("--workers")) cfg.workers = workers;
  if (given("--out")) cfg.out = out;
  if (given("--class")) cfg.symmetry = symmetry;
  if (given("--E")) cfg.E = E;
  if (given("--eta")) cfg.eta = eta;
  if (given("--in")) cfg.input = input;
  if (given("--law")) {
    const auto j = wgap::Json::parse(law, nullptr, false);
    cfg.law = j.is_discarded() ? wgap::Json(law) : j;
  }

  const auto outcome = wgap::run(cfg);
  if (outcome.exit_code != wgap::kExitOk) {
    std::cerr << "error: " << outcome.message << '\n';
  } else {
    std::cout << "manifest " << outcome.manifest_id << " -> " << cfg.out << '\n';
  }
  return outcome.exit_code;
}
