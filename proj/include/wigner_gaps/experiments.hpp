// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// Experiment runner behind the `wigner_gaps` command line tool. Each command
// reads an ExperimentConfig, writes manifest.json first and then its CSV/JSON
// results into the output directory. Results are a pure function of the
// config (worker count and output path excluded) and the master seed.

#ifndef WIGNER_GAPS_EXPERIMENTS_HPP_
#define WIGNER_GAPS_EXPERIMENTS_HPP_

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wigner_gaps/dynamics.hpp"
#include "wigner_gaps/ensembles.hpp"
#include "wigner_gaps/gue_kernel.hpp"
#include "wigner_gaps/law_io.hpp"
#include "wigner_gaps/moment_match.hpp"
#include "wigner_gaps/observables.hpp"
#include "wigner_gaps/parallel.hpp"
#include "wigner_gaps/spectra.hpp"
#include "wigner_gaps/stats.hpp"

namespace wgap {

inline constexpr const char *kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitNumerical = 4;

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoConvergence:
    case ErrorKind::SingularJacobian:
    case ErrorKind::SeparationViolated:
    case ErrorKind::NoAdmissibleT:
      return kExitSolver;
    case ErrorKind::EigensolveFailure:
    case ErrorKind::NearSingular:
    case ErrorKind::QuadratureFailure:
    case ErrorKind::DegenerateFit:
    case ErrorKind::IoError:
      return kExitNumerical;
    default:
      return kExitConfig;
  }
}

// Which matrices to sample: an entry law, or the Gaussian invariant ensemble
// of the configured symmetry class.
struct EnsembleSpec {
  bool invariant = false;
  EntryLaw law = EntryLaw::standard_gaussian();
  std::string name;
};

// Presets: "rademacher", "gaussian", "six-point", "goe"/"gue"/"invariant", or
// an inline law object. Laws are standardized here, once.
inline EnsembleSpec ensemble_from_json(const Json &j) {
  EnsembleSpec spec;
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    spec.name = name;
    if (name == "rademacher") {
      spec.law = EntryLaw::rademacher();
    } else if (name == "gaussian") {
      spec.law = EntryLaw::standard_gaussian();
    } else if (name == "six-point") {
      spec.law = EntryLaw::atomic(standardize(equispaced_law(6, -2.0, 2.0)));
    } else if (name == "goe" || name == "gue" || name == "invariant") {
      spec.invariant = true;
      spec.name = "invariant";
    } else {
      throw Error(ErrorKind::ConfigError, "unknown law preset '" + name + "'");
    }
    return spec;
  }
  spec.law = standardize(law_from_json(j));
  spec.name = spec.law.id();
  return spec;
}

struct ExperimentConfig {
  std::string command;
  Json law = "rademacher";
  std::vector<int> N = {100};
  int reps = 100;
  double alpha = 0.1;
  double epsilon = 0.2;
  double t = 0.5;
  double dt = 0.002;
  std::vector<int> p = {2};
  std::uint64_t seed = 1;
  std::string symmetry = "real";
  std::vector<double> E = {0.0};
  double eta = 0.0;  // <= 0 selects the command default
  std::string input;
  int workers = 1;
  std::string out = "out";

  SymmetryClass cls() const {
    return symmetry == "complex" ? SymmetryClass::ComplexHermitian
                                 : SymmetryClass::RealSymmetric;
  }

  // Everything that determines results. Worker count and output path are
  // deliberately absent.
  Json echo() const {
    return Json{{"command", command}, {"law", law},     {"N", N},
                {"reps", reps},       {"alpha", alpha}, {"epsilon", epsilon},
                {"t", t},             {"dt", dt},       {"p", p},
                {"seed", seed},       {"symmetry", symmetry},
                {"E", E},             {"eta", eta},     {"input", input}};
  }
};

inline const std::vector<std::string> &known_commands() {
  static const std::vector<std::string> cmds = {"moment-match", "sample-gaps", "min-gap",
                                                "relax",        "local-law",   "kernel",
                                                "compare",      "rate"};
  return cmds;
}

// Applies fields present in a config document on top of `cfg`.
inline void merge_config(ExperimentConfig &cfg, const Json &j) {
  try {
    if (j.contains("command")) cfg.command = j.at("command").get<std::string>();
    if (j.contains("law")) cfg.law = j.at("law");
    if (j.contains("N")) {
      cfg.N = j.at("N").is_array() ? j.at("N").get<std::vector<int>>()
                                   : std::vector<int>{j.at("N").get<int>()};
    }
    if (j.contains("reps")) cfg.reps = j.at("reps").get<int>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
    if (j.contains("t")) cfg.t = j.at("t").get<double>();
    if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
    if (j.contains("p")) {
      cfg.p = j.at("p").is_array() ? j.at("p").get<std::vector<int>>()
                                   : std::vector<int>{j.at("p").get<int>()};
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("symmetry")) cfg.symmetry = j.at("symmetry").get<std::string>();
    if (j.contains("E")) {
      cfg.E = j.at("E").is_array() ? j.at("E").get<std::vector<double>>()
                                   : std::vector<double>{j.at("E").get<double>()};
    }
    if (j.contains("eta")) cfg.eta = j.at("eta").get<double>();
    if (j.contains("input")) cfg.input = j.at("input").get<std::string>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::ConfigError, std::string("bad config field: ") + e.what());
  }
}

// Every precondition violation, in one list; empty means valid.
inline std::vector<std::string> validate_config(const ExperimentConfig &c) {
  std::vector<std::string> v;
  const auto &cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) {
    v.push_back("unknown command '" + c.command + "'");
  }
  if (c.N.empty()) v.emplace_back("N list is empty");
  for (int n : c.N) {
    if (n < 2) v.push_back("N=" + std::to_string(n) + " is below 2");
  }
  if (c.reps < 0) v.emplace_back("reps must be >= 0");
  if (!(c.alpha > 0.0 && c.alpha < 0.5)) v.emplace_back("alpha must lie in (0, 1/2)");
  if (!(c.epsilon > 0.0)) v.emplace_back("epsilon must be > 0");
  if (c.p.empty()) v.emplace_back("p list is empty");
  for (int p : c.p) {
    if (p < 1) v.push_back("p=" + std::to_string(p) + " is below 1");
  }
  if (c.symmetry != "real" && c.symmetry != "complex") {
    v.emplace_back("symmetry must be 'real' or 'complex'");
  }
  if (c.workers < 1) v.emplace_back("workers must be >= 1");
  if (c.E.empty()) v.emplace_back("E list is empty");

  EnsembleSpec spec;
  try {
    spec = ensemble_from_json(c.law);
  } catch (const Error &e) {
    v.push_back(std::string("law: ") + e.what());
  }
  const bool law_ok = v.empty() || spec.invariant || !spec.name.empty();

  if (c.command == "moment-match" || c.command == "compare") {
    if (!(c.t > 0.0 && c.t < 1.0)) v.emplace_back("t must lie in (0, 1)");
    if (law_ok && (spec.invariant || spec.law.is_gaussian() || spec.law.is_gaussian_divisible())) {
      v.emplace_back("law must be atomic for " + c.command);
    } else if (law_ok) {
      for (int p : c.p) {
        if (static_cast<std::size_t>(std::max(p, 1)) > spec.law.atomic_part().size()) {
          v.push_back("law has fewer atoms than p=" + std::to_string(p));
        }
      }
    }
  }
  if (c.command == "relax") {
    if (!(c.t > 0.0)) v.emplace_back("t must be > 0");
    if (!(c.dt > 0.0) || c.dt > c.t) v.emplace_back("need 0 < dt <= t");
    if (c.dt > kMaxEulerStep) v.emplace_back("dt must be <= 0.01 (Euler-Maruyama stability)");
    if (law_ok && spec.invariant) v.emplace_back("relax needs an entry law");
  }
  if (c.command == "compare" || c.command == "local-law") {
    if (c.eta < 0.0) v.emplace_back("eta must be >= 0 (0 selects the default)");
    for (double e : c.E) {
      if (std::abs(e) > 10.0) v.emplace_back("|E| must be <= 10");
    }
  }
  if (c.command == "compare" && c.eta > 0.0) {
    for (int n : c.N) {
      if (c.eta < 1.0 / n) v.emplace_back("compare needs eta >= 1/N");
    }
  }
  if (c.command == "rate" && c.input.empty()) v.emplace_back("rate needs --in <csv>");
  return v;
}

// ---------------------------------------------------------------------------
// Output helpers.

inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// FNV-1a, used for manifest ids and output hashes.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path &path, const std::vector<std::string> &header)
      : out_(path) {
    if (!out_) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    row_begin();
    for (const auto &h : header) cell(h);
    row_end();
  }
  CsvWriter &cell(const std::string &s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }
  CsvWriter &cell(double x) { return cell(fmt_double(x)); }
  CsvWriter &cell(long long x) { return cell(std::to_string(x)); }
  CsvWriter &cell(int x) { return cell(std::to_string(x)); }
  CsvWriter &cell(std::uint64_t x) { return cell(std::to_string(x)); }
  void row_begin() { first_ = true; }
  void row_end() { out_ << '\n'; }

 private:
  std::ofstream out_;
  bool first_ = true;
};

inline void write_json(const std::filesystem::path &path, const Json &j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  out << j.dump(2) << '\n';
}

struct RunManifest {
  std::string id;
  Json config;
  Json metadata = Json::object();
  double wall_time_s = -1.0;

  Json to_json() const {
    Json j{{"manifest_id", id},
           {"version", kVersion},
           {"config", config},
           {"seed_derivation", "replica seed = mix64(mix64(master) + index * 0xD1B54A32D192ED03)"},
           {"metadata", metadata}};
    j["wall_time_s"] = wall_time_s < 0.0 ? Json(nullptr) : Json(wall_time_s);
    return j;
  }
};

inline RunManifest make_manifest(const ExperimentConfig &cfg) {
  RunManifest m;
  m.config = cfg.echo();
  m.id = hex64(fnv1a(m.config.dump() + kVersion));
  return m;
}

// ---------------------------------------------------------------------------
// Sampling pipelines shared by the commands and the acceptance suite.

// Spectrum of one replica. Invariant ensembles use the tridiagonal model.
inline Spectrum sample_spectrum(const EnsembleSpec &spec, int N, SymmetryClass cls,
                                std::uint64_t seed) {
  if (spec.invariant) return sample_gxe_spectrum_tridiagonal(N, beta_of(cls), seed);
  return eigenvalues(sample_wigner(spec.law, N, cls, seed));
}

inline std::uint64_t replica_seed(std::uint64_t master, std::uint64_t stream,
                                  std::size_t replica) {
  return derive_seed(derive_seed(master, stream), replica);
}

// N (lambda_{k+1} - lambda_k) at k = N/2 for each replica.
inline std::vector<double> middle_gap_samples(const EnsembleSpec &spec, int N,
                                              SymmetryClass cls, int reps,
                                              std::uint64_t seed, int workers) {
  return parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t r) {
    return gap_at(sample_spectrum(spec, N, cls, derive_seed(seed, r)), N / 2).scaled_gap;
  });
}

inline std::vector<GapRecord> min_gap_samples(const EnsembleSpec &spec, int N,
                                              SymmetryClass cls, double alpha,
                                              double exponent, int reps,
                                              std::uint64_t seed, int workers) {
  return parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t r) {
    return min_bulk_gap(sample_spectrum(spec, N, cls, derive_seed(seed, r)), alpha, exponent);
  });
}

struct MinGapSummary {
  double constant = 0.0;
  bool self_calibrated = false;
  double exponent = 4.0 / 3.0;
  double d_K = 0.0;
  double dkw = 0.0;
  double empirical_median = 0.0;
  double predicted_median = 0.0;
};

// Complex class: Poissonized c(alpha), limit 1 - e^{-x^3}. Real class: the
// constant is self-calibrated so the empirical median matches the limit law.
inline MinGapSummary summarize_min_gaps(const std::vector<GapRecord> &gaps,
                                        SymmetryClass cls, double alpha) {
  MinGapSummary s;
  std::vector<double> scaled;
  for (const auto &g : gaps) scaled.push_back(g.scaled_gap);
  s.empirical_median = median_of(scaled);
  if (cls == SymmetryClass::ComplexHermitian) {
    s.constant = poissonized_gap_constant(alpha);
    s.predicted_median = predicted_min_gap_median(alpha);
  } else {
    s.exponent = 1.5;
    s.self_calibrated = true;
    s.constant = min_gap_limit_median(cls) / s.empirical_median;
    s.predicted_median = s.empirical_median;
  }
  std::vector<double> normalized;
  for (double x : scaled) normalized.push_back(s.constant * x);
  s.d_K = kolmogorov_distance_to(Ecdf(normalized),
                                 [cls](double x) { return min_gap_limit_cdf(x, cls); });
  s.dkw = dkw_bound(normalized.size(), 0.05);
  return s;
}

// Median over paths of per-path bulk errors is not used; all bulk errors of
// all paths are pooled.
struct RelaxationSummary {
  std::vector<std::vector<CouplingSnapshot>> paths;  // [path][checkpoint]
  std::vector<std::uint64_t> seeds;
  std::vector<double> pooled_median;  // per checkpoint
};

inline RelaxationSummary run_relaxation(const EntryLaw &law, int N, std::span<const double> times,
                                        double dt, double alpha, int paths,
                                        std::uint64_t seed, int workers,
                                        SymmetryClass cls = SymmetryClass::RealSymmetric) {
  RelaxationSummary out;
  out.paths = parallel_map(static_cast<std::size_t>(paths), workers, [&](std::size_t r) {
    const std::uint64_t s = derive_seed(seed, r);
    const WignerDraw a0 = sample_wigner(law, N, cls, derive_seed(s, 0));
    const WignerDraw b0 = sample_gaussian_invariant(N, cls, derive_seed(s, 1));
    return coupled_relaxation_path(a0, b0, times, dt, alpha, derive_seed(s, 2));
  });
  for (std::size_t r = 0; r < static_cast<std::size_t>(paths); ++r) {
    out.seeds.push_back(derive_seed(seed, r));
  }
  for (std::size_t c = 0; c < times.size(); ++c) {
    std::vector<double> all;
    for (const auto &p : out.paths) {
      for (const auto &e : p[c].errors) all.push_back(e.abs_err);
    }
    out.pooled_median.push_back(median_of(std::move(all)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands.

namespace detail {

inline std::filesystem::path out_file(const ExperimentConfig &cfg, const char *name) {
  return std::filesystem::path(cfg.out) / name;
}

inline void cmd_moment_match(const ExperimentConfig &cfg, RunManifest &m) {
  const auto spec = ensemble_from_json(cfg.law);
  const int p = cfg.p.front();
  const MatchResult r = build_matched_gde(spec.law.atomic_part(), p, cfg.t);
  Json j = to_json(r);
  j["source_law"] = to_json(spec.law);
  j["p"] = p;
  j["manifest_id"] = m.id;
  m.metadata["t_used"] = r.t_used;
  write_json(out_file(cfg, "match.json"), j);
}

inline void cmd_sample_gaps(const ExperimentConfig &cfg, RunManifest &m) {
  const auto spec = ensemble_from_json(cfg.law);
  const auto cls = cfg.cls();
  std::vector<std::pair<std::string, EnsembleSpec>> ensembles;
  ensembles.emplace_back("law", spec);
  ensembles.emplace_back("gaussian-invariant", EnsembleSpec{true, EntryLaw::standard_gaussian(), "invariant"});
  // Pipeline leg: the p-moment-matched GDE for the same law, when available.
  const int p = cfg.p.front();
  if (!spec.invariant && spec.law.is_atomic() && p >= 3 &&
      spec.law.atomic_part().size() >= static_cast<std::size_t>(p)) {
    const MatchResult match = build_matched_gde(spec.law.atomic_part(), p, cfg.t);
    ensembles.emplace_back("gde", EnsembleSpec{false, match.matched_law, "gde"});
    m.metadata["gde_t_used"] = match.t_used;
  }

  CsvWriter dk(out_file(cfg, "dk_table.csv"),
               {"N", "k", "comparison", "n_a", "n_b", "d_K", "pooled_dkw", "manifest_id"});
  for (std::size_t e = 0; e < ensembles.size(); ++e) {
    const auto &[name, ens] = ensembles[e];
    CsvWriter gaps(out_file(cfg, ("gaps_" + name + ".csv").c_str()),
                   {"ensemble_id", "N", "seed", "k", "raw_gap", "scaled_gap", "manifest_id"});
    for (int N : cfg.N) {
      const std::uint64_t stream = derive_seed(cfg.seed, static_cast<std::uint64_t>(N));
      auto records = parallel_map(static_cast<std::size_t>(cfg.reps), cfg.workers,
                                  [&](std::size_t r) {
                                    const auto seed = replica_seed(stream, e, r);
                                    return std::pair{seed, bulk_gaps(sample_spectrum(ens, N, cls, seed),
                                                                      cfg.alpha)};
                                  });
      for (const auto &[seed, recs] : records) {
        for (const auto &g : recs) {
          gaps.row_begin();
          gaps.cell(name).cell(N).cell(seed).cell(g.k).cell(g.raw_gap).cell(g.scaled_gap).cell(m.id);
          gaps.row_end();
        }
      }
    }
  }
  // Middle-gap distances between ensembles, per N.
  for (int N : cfg.N) {
    const std::uint64_t stream = derive_seed(cfg.seed, static_cast<std::uint64_t>(N));
    std::vector<std::vector<double>> middle;
    for (std::size_t e = 0; e < ensembles.size(); ++e) {
      middle.push_back(middle_gap_samples(ensembles[e].second, N, cls, cfg.reps,
                                          derive_seed(stream, e), cfg.workers));
    }
    if (cfg.reps == 0) continue;
    auto row = [&](std::size_t a, std::size_t b) {
      const double d = kolmogorov_distance(Ecdf(middle[a]), Ecdf(middle[b]));
      dk.row_begin();
      dk.cell(N).cell(N / 2).cell(ensembles[a].first + "-vs-" + ensembles[b].first)
          .cell(middle[a].size()).cell(middle[b].size()).cell(d)
          .cell(pooled_dkw_bound(middle[a].size(), middle[b].size(), 0.05)).cell(m.id);
      dk.row_end();
    };
    row(0, 1);
    if (ensembles.size() > 2) {
      row(2, 1);
      row(0, 2);
    }
  }
}

inline void cmd_min_gap(const ExperimentConfig &cfg, RunManifest &m) {
  auto spec = ensemble_from_json(cfg.law);
  const auto cls = cfg.cls();
  const double exponent = cls == SymmetryClass::ComplexHermitian ? 4.0 / 3.0 : 1.5;
  CsvWriter csv(out_file(cfg, "min_gaps.csv"), {"ensemble_id", "N", "seed", "k", "raw_gap",
                                                "scaled_gap", "normalized", "manifest_id"});
  Json summary = Json::array();
  for (int N : cfg.N) {
    const std::uint64_t stream = derive_seed(cfg.seed, static_cast<std::uint64_t>(N));
    const auto gaps = min_gap_samples(spec, N, cls, cfg.alpha, exponent, cfg.reps, stream,
                                      cfg.workers);
    if (gaps.empty()) continue;
    const auto s = summarize_min_gaps(gaps, cls, cfg.alpha);
    const std::string id = spec.invariant ? (cls == SymmetryClass::RealSymmetric ? "goe" : "gue")
                                          : spec.law.id();
    for (std::size_t r = 0; r < gaps.size(); ++r) {
      csv.row_begin();
      csv.cell(id).cell(N).cell(derive_seed(stream, r)).cell(gaps[r].k).cell(gaps[r].raw_gap)
          .cell(gaps[r].scaled_gap).cell(s.constant * gaps[r].scaled_gap).cell(m.id);
      csv.row_end();
    }
    summary.push_back(Json{{"N", N},
                           {"exponent", s.exponent},
                           {"constant", s.constant},
                           {"constant_mode", s.self_calibrated ? "self-calibrated" : "poissonized"},
                           {"d_K_to_limit", s.d_K},
                           {"dkw_bound", s.dkw},
                           {"empirical_median", s.empirical_median},
                           {"predicted_median", s.predicted_median}});
  }
  write_json(out_file(cfg, "min_gap.json"), Json{{"manifest_id", m.id}, {"results", summary}});
}

inline void cmd_relax(const ExperimentConfig &cfg, RunManifest &m) {
  const auto spec = ensemble_from_json(cfg.law);
  const int N = cfg.N.front();
  const double times[] = {cfg.t};
  const auto res = run_relaxation(spec.law, N, times, cfg.dt, cfg.alpha, cfg.reps, cfg.seed,
                                  cfg.workers, cfg.cls());
  CsvWriter csv(out_file(cfg, "relax.csv"),
                {"k", "gap_a", "gap_b", "abs_err", "N", "t", "seed", "manifest_id"});
  double max_scaled = 0.0;
  for (std::size_t r = 0; r < res.paths.size(); ++r) {
    const auto &snap = res.paths[r].front();
    max_scaled = std::max(max_scaled, snap.max_scaled_error);
    for (const auto &e : snap.errors) {
      csv.row_begin();
      csv.cell(e.k).cell(e.gap_a).cell(e.gap_b).cell(e.abs_err).cell(N).cell(cfg.t)
          .cell(res.seeds[r]).cell(m.id);
      csv.row_end();
    }
  }
  const double median = res.pooled_median.empty() ? 0.0 : res.pooled_median.front();
  const double floor = relaxation_time_floor(N);
  m.metadata["relaxation_time_floor"] = floor;
  m.metadata["below_time_floor"] = cfg.t < floor;
  m.metadata["relaxation_budget"] = 10.0;
  write_json(out_file(cfg, "relax.json"),
             Json{{"manifest_id", m.id},
                  {"coupling", "eigenbasis-rotated"},
                  {"paths", cfg.reps},
                  {"median_abs_err", median},
                  {"target", 10.0 / (static_cast<double>(N) * N * cfg.t)},
                  {"max_scaled_err", max_scaled},
                  {"below_time_floor", cfg.t < floor}});
}

inline void cmd_local_law(const ExperimentConfig &cfg, RunManifest &m) {
  const auto spec = ensemble_from_json(cfg.law);
  const auto cls = cfg.cls();
  constexpr double kBudget = 10.0;
  m.metadata["polylog_budget"] = kBudget;
  CsvWriter csv(out_file(cfg, "local_law.csv"), {"N", "seed", "E", "eta", "stat", "scale",
                                                 "ratio", "ward_residual", "manifest_id"});
  Json summary = Json::array();
  for (int N : cfg.N) {
    const double eta = cfg.eta > 0.0 ? cfg.eta : std::pow(static_cast<double>(N), -0.6);
    const std::uint64_t stream = derive_seed(cfg.seed, static_cast<std::uint64_t>(N));
    struct Row { std::uint64_t seed; double E, stat, scale, ward; };
    auto rows = parallel_map(static_cast<std::size_t>(cfg.reps), cfg.workers, [&](std::size_t r) {
      const auto seed = derive_seed(stream, r);
      const WignerDraw h = spec.invariant ? sample_gaussian_invariant(N, cls, seed)
                                          : sample_wigner(spec.law, N, cls, seed);
      std::vector<Row> out;
      for (double E : cfg.E) {
        const Complex z(E, eta);
        const auto g = resolvent(h, z);
        out.push_back({seed, E, local_law_stat(g), local_law_scale(z, N), ward_check(g)});
      }
      return out;
    });
    int within = 0, total = 0;
    double worst_ward = 0.0;
    for (const auto &draw : rows) {
      for (const auto &r : draw) {
        csv.row_begin();
        csv.cell(N).cell(r.seed).cell(r.E).cell(eta).cell(r.stat).cell(r.scale)
            .cell(r.stat / r.scale).cell(r.ward).cell(m.id);
        csv.row_end();
        within += r.stat <= kBudget * r.scale ? 1 : 0;
        ++total;
        worst_ward = std::max(worst_ward, r.ward);
      }
    }
    summary.push_back(Json{{"N", N}, {"eta", eta},
                           {"fraction_within_budget", total ? double(within) / total : 1.0},
                           {"max_ward_residual", worst_ward}});
  }
  write_json(out_file(cfg, "local_law.json"), Json{{"manifest_id", m.id}, {"results", summary}});
}

inline void cmd_kernel(const ExperimentConfig &cfg, RunManifest &m) {
  CsvWriter csv(out_file(cfg, "kernel.csv"),
                {"N", "x", "u", "rho2", "asymptotic", "ratio", "manifest_id"});
  constexpr int kGrid = 10;
  for (int N : cfg.N) {
    for (double x : cfg.E) {
      for (int i = 0; i < kGrid; ++i) {
        const double u = 1e-4 * std::pow(10.0, static_cast<double>(i) / (kGrid - 1));
        const double r2 = rho2(N, x, u);
        const double lead = small_gap_leading_term(N, x, u);
        csv.row_begin();
        csv.cell(N).cell(x).cell(u).cell(r2).cell(lead).cell(lead > 0.0 ? r2 / lead : 0.0)
            .cell(m.id);
        csv.row_end();
      }
    }
  }
}

inline void cmd_compare(const ExperimentConfig &cfg, RunManifest &m) {
  const auto spec = ensemble_from_json(cfg.law);
  CsvWriter csv(out_file(cfg, "compare.csv"), {"p", "estimate", "stderr", "reps", "N", "E",
                                               "eta", "t_used", "manifest_id"});
  for (int N : cfg.N) {
    const double eta = cfg.eta > 0.0 ? cfg.eta : 0.1;
    for (double E : cfg.E) {
      const auto rows = green_comparison(spec.law.atomic_part(), cfg.p, N, Complex(E, eta),
                                         cfg.reps, derive_seed(cfg.seed, static_cast<std::uint64_t>(N)),
                                         cfg.t, cfg.workers);
      for (const auto &r : rows) {
        csv.row_begin();
        csv.cell(r.p).cell(r.comparison.estimate).cell(r.comparison.std_error)
            .cell(r.comparison.reps).cell(N).cell(E).cell(eta).cell(r.t_used).cell(m.id);
        csv.row_end();
        m.metadata["t_used_p" + std::to_string(r.p)] = r.t_used;
      }
    }
  }
}

inline std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

// Reads (N, d_K) pairs. A `comparison` column, when present, restricts the
// rows to the first comparison listed.
inline std::vector<RatePoint> read_rate_points(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ConfigError, "empty rate input");
  const auto header = split_csv_line(line);
  auto col = [&](const std::string &name) -> long {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const long cn = col("N"), cd = col("d_K"), cc = col("comparison");
  if (cn < 0 || cd < 0) throw Error(ErrorKind::ConfigError, "rate input needs N and d_K columns");
  std::vector<RatePoint> pts;
  std::string first_comparison;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<long>(cells.size()) <= std::max({cn, cd, cc})) {
      throw Error(ErrorKind::ConfigError, "short row in rate input");
    }
    if (cc >= 0) {
      if (first_comparison.empty()) first_comparison = cells[static_cast<std::size_t>(cc)];
      if (cells[static_cast<std::size_t>(cc)] != first_comparison) continue;
    }
    try {
      pts.push_back({std::stod(cells[static_cast<std::size_t>(cn)]),
                     std::stod(cells[static_cast<std::size_t>(cd)])});
    } catch (const std::exception &) {
      throw Error(ErrorKind::ConfigError, "non-numeric value in rate input");
    }
  }
  return pts;
}

inline void cmd_rate(const ExperimentConfig &cfg, RunManifest &m) {
  const auto fit = rate_fit(read_rate_points(cfg.input));
  Json pts = Json::array();
  for (const auto &p : fit.points) pts.push_back(Json{{"N", p.N}, {"d_K", p.dK}});
  write_json(out_file(cfg, "rate.json"), Json{{"manifest_id", m.id},
                                              {"slope", fit.slope},
                                              {"intercept", fit.intercept},
                                              {"r2", fit.r2},
                                              {"points", pts}});
}

}  // namespace detail

struct RunOutcome {
  int exit_code = kExitOk;
  std::string manifest_id;
  std::string message;
};

// Validates, writes the manifest, runs the command. Failures leave an
// error.json record (with a partial-output flag once results had started).
inline RunOutcome run(const ExperimentConfig &cfg) {
  RunOutcome outcome;
  const auto violations = validate_config(cfg);
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  auto write_error = [&](int code, std::string_view kind, const std::string &msg, bool partial,
                         const Json &details = Json::array()) {
    outcome.exit_code = code;
    outcome.message = msg;
    try {
      write_json(fs::path(cfg.out) / "error.json", Json{{"exit_code", code},
                                                        {"kind", kind},
                                                        {"message", msg},
                                                        {"partial_output", partial},
                                                        {"violations", details}});
    } catch (const Error &) {
      // Output directory unusable; the exit code still reports the failure.
    }
  };
  if (!violations.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto &v : violations) msg += " " + v + ";";
    write_error(kExitConfig, "ConfigError", msg, false, Json(violations));
    return outcome;
  }

  RunManifest manifest = make_manifest(cfg);
  outcome.manifest_id = manifest.id;
  const auto start = std::chrono::steady_clock::now();
  bool started = false;
  try {
    write_json(fs::path(cfg.out) / "manifest.json", manifest.to_json());
    started = true;
    const auto &c = cfg.command;
    if (c == "moment-match") detail::cmd_moment_match(cfg, manifest);
    else if (c == "sample-gaps") detail::cmd_sample_gaps(cfg, manifest);
    else if (c == "min-gap") detail::cmd_min_gap(cfg, manifest);
    else if (c == "relax") detail::cmd_relax(cfg, manifest);
    else if (c == "local-law") detail::cmd_local_law(cfg, manifest);
    else if (c == "kernel") detail::cmd_kernel(cfg, manifest);
    else if (c == "compare") detail::cmd_compare(cfg, manifest);
    else if (c == "rate") detail::cmd_rate(cfg, manifest);
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_json(fs::path(cfg.out) / "manifest.json", manifest.to_json());
  } catch (const Error &e) {
    write_error(exit_code_for(e.kind()), to_string(e.kind()), e.what(), started);
  } catch (const std::exception &e) {
    write_error(kExitNumerical, "Internal", e.what(), started);
  }
  return outcome;
}

}  // namespace wgap

#endif  // WIGNER_GAPS_EXPERIMENTS_HPP_
