#pragma once

// First p-Laplacian eigenpair by Rayleigh-quotient minimization with
// nonnegativity clamping, and the double-phase quotient diagnostics.

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dphase/energy.hpp"
#include "dphase/linalg.hpp"
#include "dphase/mesh.hpp"
#include "dphase/problem.hpp"

namespace dphase {

inline double grad_p_norm(const Mesh& m, double p, const Field& u) {
  const ElementGradient g = gradient(u);
  double total = 0.0;
  for (int e = 0; e < m.n_elements(); ++e)
    total += m.element_measures[e] * std::pow(detail::norm2(g.values[e]), p);
  return total;
}

// ||Du||_p^p / ||u||_p^p
inline double rayleigh_quotient(const Mesh& m, double p, const Field& u) {
  if (u.is_zero()) throw std::invalid_argument("rayleigh_quotient: u must be nonzero");
  return grad_p_norm(m, p, u) / integrate_power(u, p);
}

struct EigenOptions {
  int max_iters = 400;
  double tol = 1e-12;  // relative quotient stagnation
};

struct EigenResult {
  double lambda1 = 0.0;
  Field u1;
  int iterations = 0;
  bool converged = false;
  std::vector<double> quotient_trace;
};

namespace detail {

// Gradient of ||Du||_p^p w.r.t. nodal values (tiny regularization keeps
// p < 2 finite).
inline std::vector<double> grad_p_gradient(const Mesh& m, double p, const Field& u) {
  std::vector<double> g(m.n_vertices(), 0.0);
  const ElementGradient eg = gradient(u);
  const double eps2 = 1e-28;
  const int k = m.nodes_per_element();
  for (int e = 0; e < m.n_elements(); ++e) {
    const double g2 = eg.values[e][0] * eg.values[e][0] + eg.values[e][1] * eg.values[e][1];
    const double c = p * std::pow(g2 + eps2, 0.5 * (p - 2.0));
    const auto sg = shape_gradients(m, e);
    for (int i = 0; i < k; ++i)
      g[m.elements[e][i]] += m.element_measures[e] * c *
                             (eg.values[e][0] * sg[i][0] + eg.values[e][1] * sg[i][1]);
  }
  return g;
}

// Gradient of ||u||_p^p w.r.t. nodal values.
inline std::vector<double> mass_p_gradient(const Mesh& m, double p, const Field& u) {
  std::vector<double> g(m.n_vertices(), 0.0);
  const double eps2 = 1e-28;
  const int k = m.nodes_per_element();
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto quad = element_quadrature(m, e);
    for (const auto& qp : quad) {
      double uv = 0.0;
      for (int i = 0; i < k; ++i) uv += qp.bary[i] * u.values[m.elements[e][i]];
      const double c = p * std::pow(uv * uv + eps2, 0.5 * (p - 2.0)) * uv;
      for (int i = 0; i < k; ++i) g[m.elements[e][i]] += qp.weight * c * qp.bary[i];
    }
  }
  return g;
}

}  // namespace detail

// Smooth positive bump vanishing on the boundary; default initial guess.
inline Field bump_field(const Mesh& m) {
  Field u(m);
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& v : m.vertices) {
    x0 = std::min(x0, v[0]);
    x1 = std::max(x1, v[0]);
    y0 = std::min(y0, v[1]);
    y1 = std::max(y1, v[1]);
  }
  for (int i = 0; i < m.n_vertices(); ++i) {
    const auto& v = m.vertices[i];
    double val = (v[0] - x0) * (x1 - v[0]);
    if (m.dim == 2) val *= (v[1] - y0) * (y1 - v[1]);
    u.values[i] = val;
  }
  for (int b : m.boundary_nodes) u.values[b] = 0.0;
  return u;
}

inline void normalize_lp(const Mesh&, double p, Field& u) {
  const double mass = integrate_power(u, p);
  if (!(mass > 0.0)) throw std::invalid_argument("normalize_lp: zero field");
  const double s = std::pow(mass, -1.0 / p);
  for (double& v : u.values) v *= s;
}

// Minimize the Rayleigh quotient by stiffness-preconditioned projected
// descent: clamp to nonnegative and renormalize ||u||_p = 1 each step.
inline EigenResult first_eigenpair(const Mesh& m, double p, EigenOptions opts = {}) {
  if (!(p > 1.0)) throw std::invalid_argument("first_eigenpair: p must exceed 1");
  EigenResult res;
  Field u = bump_field(m);
  normalize_lp(m, p, u);
  const BandedCholesky K = make_stiffness_preconditioner(m);

  double R = rayleigh_quotient(m, p, u);
  res.quotient_trace.push_back(R);
  int stagnant = 0;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    const double A = grad_p_norm(m, p, u);
    const double M = integrate_power(u, p);
    const std::vector<double> dA = detail::grad_p_gradient(m, p, u);
    const std::vector<double> dM = detail::mass_p_gradient(m, p, u);
    std::vector<double> g(m.n_vertices());
    for (int i = 0; i < m.n_vertices(); ++i) g[i] = (dA[i] - (A / M) * dM[i]) / M;
    for (int b : m.boundary_nodes) g[b] = 0.0;
    std::vector<double> d = K.solve(g);
    for (int b : m.boundary_nodes) d[b] = 0.0;

    auto quotient_at = [&](double alpha) {
      Field v(m);
      for (int i = 0; i < m.n_vertices(); ++i)
        v.values[i] = std::max(u.values[i] - alpha * d[i], 0.0);
      for (int b : m.boundary_nodes) v.values[b] = 0.0;
      if (v.is_zero()) return std::numeric_limits<double>::infinity();
      return rayleigh_quotient(m, p, v);
    };

    // near-exact line search: coarse geometric scan, golden-section refine
    double best_a = 0.0, best_R = R;
    for (double a = 2.0; a > 1e-8; a *= 0.5) {
      const double Ra = quotient_at(a);
      if (Ra < best_R) {
        best_R = Ra;
        best_a = a;
      }
    }
    if (best_a > 0.0) {
      double lo = best_a * 0.5, hi = best_a * 2.0;
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double a1 = hi - gr * (hi - lo), a2 = lo + gr * (hi - lo);
      double f1 = quotient_at(a1), f2 = quotient_at(a2);
      for (int gs = 0; gs < 40; ++gs) {
        if (f1 < f2) {
          hi = a2;
          a2 = a1;
          f2 = f1;
          a1 = hi - gr * (hi - lo);
          f1 = quotient_at(a1);
        } else {
          lo = a1;
          a1 = a2;
          f1 = f2;
          a2 = lo + gr * (hi - lo);
          f2 = quotient_at(a2);
        }
      }
      const double a_opt = f1 < f2 ? a1 : a2;
      const double R_opt = std::min(f1, f2);
      if (R_opt < best_R) {
        best_R = R_opt;
        best_a = a_opt;
      }
    }

    if (best_a > 0.0 && best_R < R) {
      const double drop = (R - best_R) / (1.0 + std::abs(R));
      Field v(m);
      for (int i = 0; i < m.n_vertices(); ++i)
        v.values[i] = std::max(u.values[i] - best_a * d[i], 0.0);
      for (int b : m.boundary_nodes) v.values[b] = 0.0;
      normalize_lp(m, p, v);
      u = std::move(v);
      R = rayleigh_quotient(m, p, u);
      stagnant = drop < opts.tol ? stagnant + 1 : 0;
    } else {
      ++stagnant;
    }
    res.quotient_trace.push_back(R);
    if (stagnant >= 3) {
      res.converged = true;
      break;
    }
  }
  res.iterations = it;
  normalize_lp(m, p, u);
  res.u1 = std::move(u);
  res.lambda1 = rayleigh_quotient(m, p, res.u1);
  return res;
}

// (||Du||_p^p + (p/q) \int a|Du|^q) / ||u||_p^p
inline double theta_quotient(const DoublePhaseProblem& pr, const Field& u) {
  if (u.is_zero()) throw std::invalid_argument("theta_quotient: u must be nonzero");
  double A = 0.0, B = 0.0;
  const ElementGradient g = gradient(u);
  detail::gradient_summands(pr, g, A, B);
  return (A + pr.p / pr.q * B) / integrate_power(u, pr.p);
}

struct Lemma1Row {
  double t;
  double theta;
  double gap;  // theta - lambda1
};

struct Lemma1Diagnostic {
  std::vector<Lemma1Row> rows;
  double fitted_slope = 0.0;  // log-log slope of gap vs t; expect -(p - q)
};

// theta(t*u1) decays to lambda1 like t^{-(p-q)}; the table and the fitted
// log-log slope demonstrate it.
inline Lemma1Diagnostic lemma1_diagnostic(const DoublePhaseProblem& pr, const Field& u1,
                                          double lambda1, const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("lemma1_diagnostic: empty grid");
  Lemma1Diagnostic diag;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (double t : t_grid) {
    const Field tu = scaled(u1, t);
    const double th = theta_quotient(pr, tu);
    const double gap = th - lambda1;
    diag.rows.push_back({t, th, gap});
    if (gap > 0.0) {
      const double lx = std::log(t), ly = std::log(gap);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
  }
  if (n >= 2) diag.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return diag;
}

}  // namespace dphase
