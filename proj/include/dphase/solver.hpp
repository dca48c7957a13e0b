#pragma once

// Projected descent over the Nehari manifold (ground state) and over the
// sign-split constraint set (nodal solutions), with certificates: residual
// norms, per-part Nehari defects, sign classification.

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dphase/eigen.hpp"
#include "dphase/energy.hpp"
#include "dphase/fibering.hpp"
#include "dphase/linalg.hpp"

namespace dphase {

enum class SignClass { positive, negative, nodal, zero };

inline std::string to_string(SignClass s) {
  switch (s) {
    case SignClass::positive: return "positive";
    case SignClass::negative: return "negative";
    case SignClass::nodal: return "nodal";
    case SignClass::zero: return "zero";
  }
  return "?";
}

inline SignClass sign_classification(const Field& u, double tol = 1e-8) {
  double lo = 0.0, hi = 0.0;
  for (double v : u.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double amp = std::max(-lo, hi);
  if (amp <= 1e-14) return SignClass::zero;
  if (lo < -tol * amp && hi > tol * amp) return SignClass::nodal;
  return hi > 0.0 ? SignClass::positive : SignClass::negative;
}

enum class InitialGuess { eigenfunction, bump, random, user };

struct SolveOptions {
  int max_iters = 2000;
  double tol = 1e-8;             // residual_inf <= tol * scale
  double armijo_c = 1e-4;
  double projection_tol = 1e-12;
  InitialGuess initial = InitialGuess::eigenfunction;
  Field user_field;              // used when initial == user
  unsigned long long seed = 0;
  int restarts = 3;
  double mass_floor_factor = 1e-10;  // per-part ||.||_p^p floor, times |Omega|
};

struct SolveReport {
  Field solution;
  double energy = 0.0;
  double residual_inf = 0.0;
  double defect = 0.0;       // <phi'(u), u>
  double defect_pos = 0.0;   // nodal: <phi'(u+), u+>
  double defect_neg = 0.0;   // nodal: <phi'(-u-), -u->
  SignClass sign_class = SignClass::zero;
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<double> energy_trace;
  std::vector<double> t_trace;  // fibering scalings applied per accepted step
};

struct DegenerateIterateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Field random_field(const Mesh& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field u(m);
  for (int i = 0; i < m.n_vertices(); ++i)
    if (!m.is_boundary[i]) u.values[i] = dist(rng);
  return u;
}

namespace detail {

inline Field initial_field(const DoublePhaseProblem& pr, const SolveOptions& opts,
                           std::mt19937_64& rng, bool sign_changing) {
  const Mesh& m = *pr.mesh;
  Field base;
  switch (opts.initial) {
    case InitialGuess::user:
      if (opts.user_field.mesh != &m)
        throw std::invalid_argument("solve: user initial field not on problem mesh");
      return opts.user_field;
    case InitialGuess::random:
      base = random_field(m, rng);
      return base;
    case InitialGuess::eigenfunction: {
      EigenOptions eo;
      eo.max_iters = 200;
      eo.tol = 1e-10;
      base = first_eigenpair(m, pr.p, eo).u1;
      break;
    }
    case InitialGuess::bump:
      base = bump_field(m);
      break;
  }
  if (sign_changing) {
    // multiply by a linear function crossing zero mid-domain
    double x0 = 1e300, x1 = -1e300;
    for (const auto& v : m.vertices) {
      x0 = std::min(x0, v[0]);
      x1 = std::max(x1, v[0]);
    }
    const double mid = 0.5 * (x0 + x1);
    for (int i = 0; i < m.n_vertices(); ++i) base.values[i] *= (m.vertices[i][0] - mid);
    for (int b : m.boundary_nodes) base.values[b] = 0.0;
  }
  return base;
}

inline std::vector<double> preconditioned_direction(const BandedCholesky& K, const Mesh& m,
                                                    const Residual& r) {
  std::vector<double> d = K.solve(r.values);
  for (int b : m.boundary_nodes) d[b] = 0.0;
  return d;
}

}  // namespace detail

// Ground state: minimize phi over the Nehari manifold by preconditioned
// descent with Armijo backtracking; every accepted iterate is reprojected
// onto the manifold by the 1D fibering bisection.
inline SolveReport solve_ground_state(const DoublePhaseProblem& pr, SolveOptions opts = {}) {
  if (!(opts.tol > 0.0) || opts.max_iters < 1)
    throw std::invalid_argument("solve_ground_state: bad options");
  const Mesh& m = *pr.mesh;
  const BandedCholesky K = make_stiffness_preconditioner(m);
  std::mt19937_64 rng(opts.seed);

  SolveReport rep;
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    SolveOptions o = opts;
    if (attempt > 0) o.initial = InitialGuess::random;  // deterministic restart stream
    Field u0 = detail::initial_field(pr, o, rng, false);
    if (u0.is_zero()) continue;
    FiberingResult proj = project_to_nehari(pr, u0, opts.projection_tol);
    Field u = proj.projected;

    rep = SolveReport{};
    rep.t_trace.push_back(proj.t_u);
    double phi = energy(pr, u);
    rep.energy_trace.push_back(phi);

    int it = 0;
    bool stalled = false;
    for (; it < opts.max_iters; ++it) {
      const Residual r = residual(pr, u);
      const double scale = 1.0 + std::abs(phi) + u.inf_norm();
      rep.residual_inf = r.inf_norm();
      if (rep.residual_inf <= opts.tol * scale) {
        rep.converged = true;
        break;
      }
      const std::vector<double> d = detail::preconditioned_direction(K, m, r);
      const double gd = std::inner_product(r.values.begin(), r.values.end(), d.begin(), 0.0);

      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        Field v(m);
        for (int i = 0; i < m.n_vertices(); ++i) v.values[i] = u.values[i] - alpha * d[i];
        if (!v.is_zero()) {
          try {
            FiberingResult fp = project_to_nehari(pr, v, opts.projection_tol);
            const double phi_w = energy(pr, fp.projected);
            if (phi_w <= phi - opts.armijo_c * alpha * gd) {
              u = std::move(fp.projected);
              phi = phi_w;
              rep.t_trace.push_back(fp.t_u);
              accepted = true;
              break;
            }
          } catch (const ProjectionError&) {
            // shrink and retry
          }
        }
        alpha *= 0.5;
      }
      rep.energy_trace.push_back(phi);
      if (!accepted) {
        stalled = true;
        break;
      }
    }

    rep.iterations = it;
    rep.solution = u;
    rep.energy = phi;
    rep.defect = nehari_defect(pr, u);
    rep.residual_inf = residual(pr, u).inf_norm();
    rep.sign_class = sign_classification(u);
    if (rep.converged) return rep;
    rep.message = stalled ? "line search stalled" : "max_iters exceeded";
  }
  return rep;  // last (non-converged) attempt, flagged
}

// Nodal solve: iterates stay in N0 = {u : u+ in N, -u- in N} by projecting
// the positive and negative parts independently after every step.
inline SolveReport solve_nodal(const DoublePhaseProblem& pr, SolveOptions opts = {}) {
  if (!(opts.tol > 0.0) || opts.max_iters < 1)
    throw std::invalid_argument("solve_nodal: bad options");
  const Mesh& m = *pr.mesh;
  const BandedCholesky K = make_stiffness_preconditioner(m);
  std::mt19937_64 rng(opts.seed);
  const double mass_floor = opts.mass_floor_factor * m.domain_measure;

  auto project_parts = [&](const Field& y) -> std::pair<Field, std::array<double, 2>> {
    Field yp = positive_part(y);
    Field yn = negative_part(y);
    if (integrate_power(yp, pr.p) < mass_floor || integrate_power(yn, pr.p) < mass_floor)
      throw DegenerateIterateError("nodal iterate part below mass floor");
    const FiberingResult fp = project_to_nehari(pr, yp, opts.projection_tol);
    const FiberingResult fn = project_to_nehari(pr, yn, opts.projection_tol);
    Field u(m);
    for (int i = 0; i < m.n_vertices(); ++i)
      u.values[i] = fp.t_u * yp.values[i] - fn.t_u * yn.values[i];
    return {u, {fp.t_u, fn.t_u}};
  };

  SolveReport rep;
  for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
    try {
      SolveOptions o = opts;
      if (attempt > 0) o.initial = InitialGuess::random;
      Field y0 = detail::initial_field(pr, o, rng, true);
      auto [u, ts] = project_parts(y0);

      rep = SolveReport{};
      rep.t_trace.push_back(ts[0]);
      rep.t_trace.push_back(ts[1]);
      double phi = energy(pr, u);
      rep.energy_trace.push_back(phi);

      int it = 0;
      bool stalled = false;
      for (; it < opts.max_iters; ++it) {
        const Residual r = residual(pr, u);
        const double scale = 1.0 + std::abs(phi) + u.inf_norm();
        rep.residual_inf = r.inf_norm();
        if (rep.residual_inf <= opts.tol * scale) {
          rep.converged = true;
          break;
        }
        const std::vector<double> d = detail::preconditioned_direction(K, m, r);
        const double gd = std::inner_product(r.values.begin(), r.values.end(), d.begin(), 0.0);

        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
          Field v(m);
          for (int i = 0; i < m.n_vertices(); ++i) v.values[i] = u.values[i] - alpha * d[i];
          try {
            auto [w, tw] = project_parts(v);
            const double phi_w = energy(pr, w);
            if (phi_w <= phi - opts.armijo_c * alpha * gd) {
              u = std::move(w);
              phi = phi_w;
              rep.t_trace.push_back(tw[0]);
              rep.t_trace.push_back(tw[1]);
              accepted = true;
              break;
            }
          } catch (const ProjectionError&) {
          } catch (const DegenerateIterateError&) {
            // part collapsing; shrink the step
          }
          alpha *= 0.5;
        }
        rep.energy_trace.push_back(phi);
        if (!accepted) {
          stalled = true;
          break;
        }
      }

      rep.iterations = it;
      rep.solution = u;
      rep.energy = phi;
      rep.defect = nehari_defect(pr, u);
      rep.defect_pos = nehari_defect(pr, positive_part(u));
      rep.defect_neg = nehari_defect(pr, scaled(negative_part(u), -1.0));
      rep.residual_inf = residual(pr, u).inf_norm();
      rep.sign_class = sign_classification(u);
      if (rep.converged) return rep;
      rep.message = stalled ? "line search stalled" : "max_iters exceeded";
    } catch (const DegenerateIterateError& e) {
      rep.message = e.what();
      rep.converged = false;
    }
  }
  return rep;
}

// 1D only: move the interior node nearest to the detected sign change of u
// onto the (linearly interpolated) zero crossing. Returns the new mesh; the
// caller re-interpolates and re-solves.
inline std::vector<double> aligned_interval_nodes(const Mesh& m, const Field& u) {
  if (m.dim != 1) throw std::invalid_argument("aligned_interval_nodes: 1D mesh required");
  double zstar = -1.0;
  for (int e = 0; e < m.n_elements(); ++e) {
    const double a = u.values[m.elements[e][0]];
    const double b = u.values[m.elements[e][1]];
    if (a * b < 0.0) {
      const double x0 = m.vertices[m.elements[e][0]][0];
      const double x1 = m.vertices[m.elements[e][1]][0];
      zstar = x0 + (x1 - x0) * a / (a - b);
      break;
    }
    if (a != 0.0 && b == 0.0 && !m.is_boundary[m.elements[e][1]]) {
      zstar = m.vertices[m.elements[e][1]][0];  // already nodal
      break;
    }
  }
  if (zstar < 0.0) throw std::invalid_argument("aligned_interval_nodes: no sign change found");
  std::vector<double> nodes(m.n_vertices());
  for (int i = 0; i < m.n_vertices(); ++i) nodes[i] = m.vertices[i][0];
  int nearest = 1;
  for (int i = 1; i + 1 < m.n_vertices(); ++i)
    if (std::abs(nodes[i] - zstar) < std::abs(nodes[nearest] - zstar)) nearest = i;
  nodes[nearest] = zstar;
  return nodes;
}

}  // namespace dphase
