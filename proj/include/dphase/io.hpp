#pragma once

// JSON problem configs and reports, CSV curve emitters. Reports embed the
// full resolved config and use fixed numeric formatting so identical
// (config, seed) runs are byte-identical.

#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include <json.hpp>

#include "dphase/fibering.hpp"
#include "dphase/problem.hpp"
#include "dphase/eigen.hpp"
#include "dphase/solver.hpp"

namespace dphase {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(const std::string& f, const std::string& what)
      : std::runtime_error("config field '" + f + "': " + what), field(f) {}
};

namespace detail {

template <class T>
T require(const json& j, const std::string& field) {
  if (!j.contains(field)) throw ConfigError(field, "missing");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

template <class T>
T optional(const json& j, const std::string& field, T fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace detail

// A problem plus the mesh it lives on; the mesh is heap-held so the
// problem's mesh pointer stays valid across moves.
struct ProblemSetup {
  std::unique_ptr<Mesh> mesh;
  DoublePhaseProblem problem;
  json resolved;  // config with defaults filled in
};

inline Weight weight_from_config(const json& w) {
  const std::string kind = detail::require<std::string>(w, "kind");
  if (kind == "constant") return make_constant_weight(detail::require<double>(w, "c"));
  if (kind == "power") {
    auto z0 = detail::optional<std::vector<double>>(w, "z0", {0.5, 0.5});
    z0.resize(2, 0.0);
    return make_power_weight(detail::require<double>(w, "c"), {z0[0], z0[1]},
                             detail::optional<double>(w, "alpha", 1.0));
  }
  if (kind == "twolevel") {
    auto z0 = detail::optional<std::vector<double>>(w, "z0", {0.5, 0.5});
    z0.resize(2, 0.0);
    return make_two_level_weight(detail::require<double>(w, "a_in"),
                                 detail::require<double>(w, "a_out"), {z0[0], z0[1]},
                                 detail::require<double>(w, "radius"));
  }
  throw ConfigError("weight.kind", "unknown kind '" + kind + "'");
}

inline Reaction reaction_from_config(const json& r, double p) {
  const std::string kind = detail::require<std::string>(r, "kind");
  if (kind == "f1") return make_power_reaction(detail::require<double>(r, "r"), p);
  if (kind == "f2") return make_log_perturbed_reaction(p, detail::require<double>(r, "s"));
  if (kind == "linear") return make_linear_reaction();
  throw ConfigError("reaction.kind", "unknown kind '" + kind + "'");
}

inline ProblemSetup load_problem(const json& cfg) {
  ProblemSetup setup;
  const double p = detail::require<double>(cfg, "p");
  const double q = detail::require<double>(cfg, "q");
  if (!(1.0 < q && q < p)) throw ConfigError("q", "exponents must satisfy 1 < q < p");

  const json dom = detail::require<json>(cfg, "domain");
  const std::string kind = detail::require<std::string>(dom, "kind");
  if (kind == "interval") {
    setup.mesh = std::make_unique<Mesh>(build_interval_mesh(
        detail::require<double>(dom, "length"), detail::require<int>(dom, "n")));
  } else if (kind == "rectangle") {
    setup.mesh = std::make_unique<Mesh>(
        build_rectangle_mesh(detail::require<double>(dom, "lx"), detail::require<double>(dom, "ly"),
                             detail::require<int>(dom, "nx"), detail::require<int>(dom, "ny")));
  } else {
    throw ConfigError("domain.kind", "unknown kind '" + kind + "'");
  }

  Weight w = weight_from_config(detail::require<json>(cfg, "weight"));
  Reaction re = reaction_from_config(detail::require<json>(cfg, "reaction"), p);
  const double eps = detail::optional<double>(cfg, "epsilon", 1e-10);
  try {
    setup.problem = make_problem(*setup.mesh, p, q, std::move(w), std::move(re), eps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("problem", e.what());
  }

  setup.resolved = cfg;
  setup.resolved["epsilon"] = eps;
  return setup;
}

inline SolveOptions solve_options_from_config(const json& cfg) {
  SolveOptions o;
  if (!cfg.contains("solve")) return o;
  const json s = cfg.at("solve");
  o.max_iters = detail::optional<int>(s, "max_iters", o.max_iters);
  o.tol = detail::optional<double>(s, "tol", o.tol);
  o.seed = detail::optional<unsigned long long>(s, "seed", o.seed);
  o.restarts = detail::optional<int>(s, "restarts", o.restarts);
  const std::string init = detail::optional<std::string>(s, "initial", "eigenfunction");
  if (init == "eigenfunction")
    o.initial = InitialGuess::eigenfunction;
  else if (init == "bump")
    o.initial = InitialGuess::bump;
  else if (init == "random")
    o.initial = InitialGuess::random;
  else
    throw ConfigError("solve.initial", "unknown kind '" + init + "'");
  return o;
}

inline json report_to_json(const SolveReport& rep, const json& resolved_config) {
  json j;
  j["config"] = resolved_config;
  j["energy"] = rep.energy;
  j["residual_inf"] = rep.residual_inf;
  j["defects"] = {{"total", rep.defect}, {"positive_part", rep.defect_pos},
                  {"negative_part", rep.defect_neg}};
  j["sign_class"] = to_string(rep.sign_class);
  j["iterations"] = rep.iterations;
  j["converged"] = rep.converged;
  if (!rep.message.empty()) j["message"] = rep.message;
  j["energy_trace"] = rep.energy_trace;
  j["t_trace"] = rep.t_trace;
  return j;
}

inline void write_json(const json& j, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << j.dump(2) << "\n";
}

inline void write_fibering_csv(const std::vector<FiberingRow>& rows, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "t,mu,dmu\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.t, r.mu, r.dmu);
    os << buf;
  }
}

inline void write_lemma1_csv(const Lemma1Diagnostic& diag, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "t,theta,gap\n";
  char buf[128];
  for (const auto& r : diag.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", r.t, r.theta, r.gap);
    os << buf;
  }
}

}  // namespace dphase
