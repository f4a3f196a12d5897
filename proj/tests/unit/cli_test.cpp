// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "wigner_gaps/experiments.hpp"

namespace wgap {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string &name) {
  const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path p = fs::path(::testing::TempDir()) / "wgap_cli" / info->name() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path &p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(detail::split_csv_line(line));
  return rows;
}

// File contents keyed by name; the manifest wall time is the one field
// allowed to differ between runs.
std::map<std::string, std::string> snapshot(const fs::path &dir) {
  std::map<std::string, std::string> out;
  for (const auto &e : fs::directory_iterator(dir)) {
    std::string body = slurp(e.path());
    if (e.path().filename() == "manifest.json") {
      auto j = Json::parse(body);
      j.erase("wall_time_s");
      body = j.dump();
    }
    out[e.path().filename().string()] = body;
  }
  return out;
}

ExperimentConfig config(const std::string &command, const fs::path &out) {
  ExperimentConfig c;
  c.command = command;
  c.out = out.string();
  return c;
}

TEST(Cli, MomentMatchRademacherP2) {
  auto c = config("moment-match", scratch("mm"));
  c.p = {2};
  const auto r = run(c);
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  const auto j = Json::parse(slurp(fs::path(c.out) / "match.json"));
  EXPECT_LE(j.at("residual").get<double>(), 1e-12);
  EXPECT_EQ(j.at("manifest_id").get<std::string>(), r.manifest_id);
  EXPECT_EQ(j.at("t_used").get<double>(), 0.5);
  const auto m = Json::parse(slurp(fs::path(c.out) / "manifest.json"));
  EXPECT_EQ(m.at("manifest_id").get<std::string>(), r.manifest_id);
  EXPECT_EQ(m.at("version").get<std::string>(), kVersion);
  EXPECT_TRUE(m.at("wall_time_s").is_number());
}

TEST(Cli, SampleGapsSmoke) {
  auto c = config("sample-gaps", scratch("sg"));
  c.N = {64};
  c.reps = 10;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run(c);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_EQ(r.exit_code, kExitOk) << r.message;
  EXPECT_LT(secs, 5.0);
  // Bulk window for N=64, alpha=0.1: k = 7..57.
  const std::size_t width = 51;
  for (const char *name : {"gaps_law.csv", "gaps_gaussian-invariant.csv"}) {
    const auto rows = read_csv(fs::path(c.out) / name);
    ASSERT_EQ(rows.size(), 1 + 10 * width) << name;
    EXPECT_EQ(rows[0], (std::vector<std::string>{"ensemble_id", "N", "seed", "k", "raw_gap",
                                                 "scaled_gap", "manifest_id"}));
    std::set<std::string> seeds;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      ASSERT_EQ(rows[i].size(), rows[0].size());
      ASSERT_EQ(rows[i].back(), r.manifest_id);
      ASSERT_GT(std::stod(rows[i][4]), 0.0);
      seeds.insert(rows[i][2]);
    }
    EXPECT_EQ(seeds.size(), 10u);
    EXPECT_EQ(rows[1][3], "7");
    EXPECT_EQ(rows[width][3], "57");
  }
  const auto dk = read_csv(fs::path(c.out) / "dk_table.csv");
  ASSERT_EQ(dk.size(), 2u);
  EXPECT_EQ(dk[0].back(), "manifest_id");
  EXPECT_EQ(dk[1][2], "law-vs-gaussian-invariant");
}

TEST(Cli, SampleGapsAddsMatchedLegForAtomicLaw) {
  auto c = config("sample-gaps", scratch("sg6"));
  c.law = "six-point";
  c.p = {4};
  c.N = {32};
  c.reps = 5;
  ASSERT_EQ(run(c).exit_code, kExitOk);
  EXPECT_TRUE(fs::exists(fs::path(c.out) / "gaps_gde.csv"));
  EXPECT_EQ(read_csv(fs::path(c.out) / "dk_table.csv").size(), 4u);
}

TEST(Cli, DeterministicAcrossWorkersAndReruns) {
  std::vector<ExperimentConfig> cfgs;
  {
    auto c = config("sample-gaps", "");
    c.N = {32, 48};
    c.reps = 24;
    cfgs.push_back(c);
  }
  {
    auto c = config("min-gap", "");
    c.N = {40};
    c.reps = 30;
    c.symmetry = "complex";
    cfgs.push_back(c);
  }
  {
    auto c = config("relax", "");
    c.N = {20};
    c.reps = 4;
    c.t = 0.1;
    c.dt = 0.01;
    cfgs.push_back(c);
  }
  {
    auto c = config("local-law", "");
    c.N = {40};
    c.reps = 12;
    c.E = {-0.5, 0.0};
    cfgs.push_back(c);
  }
  {
    auto c = config("compare", "");
    c.N = {24};
    c.reps = 40;
    c.p = {2, 4};
    c.law = "six-point";
    cfgs.push_back(c);
  }
  cfgs.push_back(config("kernel", ""));
  for (auto c : cfgs) {
    std::vector<std::map<std::string, std::string>> snaps;
    std::set<std::string> ids;
    int idx = 0;
    for (int workers : {1, 8, 1}) {
      c.workers = workers;
      c.out = scratch(c.command + std::to_string(idx++)).string();
      const auto r = run(c);
      ASSERT_EQ(r.exit_code, kExitOk) << c.command << ": " << r.message;
      ids.insert(r.manifest_id);
      snaps.push_back(snapshot(c.out));
    }
    EXPECT_EQ(ids.size(), 1u) << c.command;
    EXPECT_GT(snaps[0].size(), 1u) << c.command;
    EXPECT_EQ(snaps[0], snaps[1]) << c.command;
    EXPECT_EQ(snaps[0], snaps[2]) << c.command;
  }
}

TEST(Cli, SeedChangesOutputAndManifest) {
  auto a = config("sample-gaps", scratch("a"));
  a.N = {24};
  a.reps = 5;
  auto b = a;
  b.out = scratch("b").string();
  b.seed = 2;
  const auto ra = run(a), rb = run(b);
  EXPECT_NE(ra.manifest_id, rb.manifest_id);
  EXPECT_NE(slurp(fs::path(a.out) / "gaps_law.csv"), slurp(fs::path(b.out) / "gaps_law.csv"));
}

TEST(Cli, ConfigErrorsListEveryViolation) {
  auto c = config("sample-gaps", scratch("bad"));
  c.N = {0};
  c.alpha = 0.7;
  c.reps = -1;
  const auto r = run(c);
  EXPECT_EQ(r.exit_code, kExitConfig);
  const auto err = Json::parse(slurp(fs::path(c.out) / "error.json"));
  EXPECT_EQ(err.at("exit_code").get<int>(), 2);
  EXPECT_EQ(err.at("partial_output").get<bool>(), false);
  EXPECT_GE(err.at("violations").size(), 3u);
  EXPECT_FALSE(fs::exists(fs::path(c.out) / "manifest.json"));
}

TEST(Cli, NumericalFailureExitCode) {
  const auto dir = scratch("rate");
  {
    std::ofstream f(dir / "dk.csv");
    f << "N,d_K\n100,0.1\n100,0.2\n100,0.05\n";
  }
  auto c = config("rate", dir / "out");
  c.input = (dir / "dk.csv").string();
  const auto r = run(c);
  EXPECT_EQ(r.exit_code, kExitNumerical);
  const auto err = Json::parse(slurp(fs::path(c.out) / "error.json"));
  EXPECT_EQ(err.at("kind").get<std::string>(), "DegenerateFit");
  EXPECT_EQ(err.at("partial_output").get<bool>(), true);
}

TEST(Cli, RateFitsComparisonRows) {
  const auto dir = scratch("rate_ok");
  {
    std::ofstream f(dir / "dk.csv");
    f << "N,comparison,d_K\n";
    for (int N : {64, 128, 256}) {
      f << N << ",law-vs-x," << fmt_double(std::pow(N, -0.5)) << "\n";
      f << N << ",other,0.5\n";
    }
  }
  auto c = config("rate", dir / "out");
  c.input = (dir / "dk.csv").string();
  ASSERT_EQ(run(c).exit_code, kExitOk);
  const auto j = Json::parse(slurp(fs::path(c.out) / "rate.json"));
  EXPECT_NEAR(j.at("slope").get<double>(), -0.5, 1e-12);
  EXPECT_EQ(j.at("points").size(), 3u);
}

TEST(Cli, ExitCodeMapping) {
  EXPECT_EQ(exit_code_for(ErrorKind::NoConvergence), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::SingularJacobian), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::NoAdmissibleT), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::NearSingular), 4);
  EXPECT_EQ(exit_code_for(ErrorKind::QuadratureFailure), 4);
  EXPECT_EQ(exit_code_for(ErrorKind::ConfigError), 2);
}

TEST(ParallelMap, EmptyAndOrdering) {
  EXPECT_TRUE(parallel_map(0, 8, [](std::size_t i) { return i; }).empty());
  const auto v = parallel_map(1000, 8, [](std::size_t i) { return derive_seed(42, i); });
  ASSERT_EQ(v.size(), 1000u);
  EXPECT_EQ(std::set<std::uint64_t>(v.begin(), v.end()).size(), 1000u);
  for (std::size_t i = 0; i < v.size(); ++i) ASSERT_EQ(v[i], derive_seed(42, i));
  EXPECT_EQ(v, parallel_map(1000, 1, [](std::size_t i) { return derive_seed(42, i); }));
}

TEST(ParallelMap, WorkerFailurePropagates) {
  for (int workers : {1, 4}) {
    EXPECT_THROW(parallel_map(100, workers,
                              [](std::size_t i) -> int {
                                if (i == 37) throw Error(ErrorKind::EigensolveFailure, "x");
                                return 0;
                              }),
                 Error);
  }
}

int run_binary(const std::string &args) {
  const int status = std::system((std::string(WGAP_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Binary, RunsAndReportsExitCodes) {
  const auto dir = scratch("bin");
  EXPECT_EQ(run_binary("moment-match --law rademacher --p 2 --out " + (dir / "ok").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "match.json"));
  EXPECT_EQ(run_binary("sample-gaps --N 0 --out " + (dir / "bad").string()), 2);
  EXPECT_TRUE(fs::exists(dir / "bad" / "error.json"));
  EXPECT_EQ(run_binary("no-such-command"), 2);
  EXPECT_EQ(run_binary("kernel --config " + (dir / "missing.json").string()), 2);
}

TEST(Binary, FlagsOverrideConfigFile) {
  const auto dir = scratch("prec");
  {
    std::ofstream f(dir / "cfg.json");
    f << R"({"N": [24], "reps": 3, "alpha": 0.2, "seed": 9})";
  }
  const auto out = dir / "out";
  ASSERT_EQ(run_binary("sample-gaps --config " + (dir / "cfg.json").string() +
                       " --reps 4 --out " + out.string()),
            0);
  const auto m = Json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(m.at("config").at("reps").get<int>(), 4);
  EXPECT_EQ(m.at("config").at("seed").get<int>(), 9);
  EXPECT_EQ(m.at("config").at("alpha").get<double>(), 0.2);
}

TEST(Binary, WorkersFromEnvironment) {
  const auto dir = scratch("env");
  ASSERT_EQ(setenv("WIGNER_GAPS_WORKERS", "0", 1), 0);
  EXPECT_EQ(run_binary("kernel --out " + (dir / "a").string()), 2);
  ASSERT_EQ(setenv("WIGNER_GAPS_WORKERS", "3", 1), 0);
  EXPECT_EQ(run_binary("kernel --out " + (dir / "b").string()), 0);
  unsetenv("WIGNER_GAPS_WORKERS");
}

}  // namespace
}  // namespace wgap
