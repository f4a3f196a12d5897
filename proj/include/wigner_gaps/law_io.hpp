// Copyright 2026 The wigner_gaps Authors. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// JSON form of entry laws and match results:
//   { "type": "atomic", "points": [...], "weights": [...] }
//   { "type": "gaussian" }
//   { "type": "gde", "base": { atomic }, "t": 0.5 }

#ifndef WIGNER_GAPS_LAW_IO_HPP_
#define WIGNER_GAPS_LAW_IO_HPP_

#include <string>

#include "json.hpp"
#include "wigner_gaps/ensembles.hpp"
#include "wigner_gaps/moment_match.hpp"

namespace wgap {

using Json = nlohmann::ordered_json;

inline Json to_json(const AtomicLaw &law) {
  return Json{{"type", "atomic"}, {"points", law.points()}, {"weights", law.weights()}};
}

inline Json to_json(const EntryLaw &law) {
  if (law.is_gaussian()) return Json{{"type", "gaussian"}};
  if (law.is_atomic()) return to_json(law.atomic_part());
  const auto &g = std::get<GaussianDivisibleLaw>(law.variant());
  return Json{{"type", "gde"}, {"base", to_json(g.base)}, {"t", g.mix_time}};
}

namespace detail {

inline AtomicLaw atomic_from_json(const Json &j) {
  if (!j.is_object() || j.value("type", "") != "atomic") {
    throw Error(ErrorKind::ConfigError, "expected an atomic law object");
  }
  if (!j.contains("points") || !j.contains("weights")) {
    throw Error(ErrorKind::ConfigError, "atomic law needs points and weights");
  }
  try {
    return AtomicLaw(j.at("points").get<std::vector<double>>(),
                     j.at("weights").get<std::vector<double>>());
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::ConfigError, std::string("bad atomic law: ") + e.what());
  }
}

}  // namespace detail

// Parses a law without standardizing it.
inline EntryLaw law_from_json(const Json &j) {
  if (!j.is_object() || !j.contains("type")) {
    throw Error(ErrorKind::ConfigError, "law must be an object with a type");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "atomic") return EntryLaw::atomic(detail::atomic_from_json(j));
  if (type == "gaussian") return EntryLaw::standard_gaussian();
  if (type == "gde") {
    if (!j.contains("base") || !j.contains("t") || !j.at("t").is_number()) {
      throw Error(ErrorKind::ConfigError, "gde law needs base and numeric t");
    }
    return EntryLaw::gaussian_divisible(detail::atomic_from_json(j.at("base")),
                                        j.at("t").get<double>());
  }
  throw Error(ErrorKind::ConfigError, "unknown law type '" + type + "'");
}

inline Json to_json(const MatchResult &r) {
  Json atoms = Json::array();
  for (auto a : r.atoms) atoms.push_back(a);
  return Json{{"matched_law", to_json(r.matched_law)},
              {"matched_atoms", atoms},
              {"shifts", r.shift},
              {"t_requested", r.t_requested},
              {"t_used", r.t_used},
              {"residual", r.residual},
              {"iterations", r.iterations},
              {"halvings", r.halvings}};
}

}  // namespace wgap

#endif  // WIGNER_GAPS_LAW_IO_HPP_
