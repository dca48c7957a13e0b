#pragma once

// Energy functional, weak-form residual and Nehari defect for the
// double-phase problem. The two gradient summands are exact per element
// (piecewise-constant gradients, centroid weight sample); reaction integrals
// use the mesh quadrature on the linear interpolant.

#include <cmath>
#include <stdexcept>

#include "dphase/mesh.hpp"
#include "dphase/problem.hpp"

namespace dphase {

struct EvaluationError : std::runtime_error {
  int element;
  EvaluationError(const std::string& what, int elem) : std::runtime_error(what), element(elem) {}
};

struct EnergyParts {
  double grad_p = 0.0;     // ||Du||_p^p
  double weighted_q = 0.0; // \int a(z) |Du|^q
  double reaction = 0.0;   // \int F(z,u)
  double p = 0.0, q = 0.0;
  double value() const { return grad_p / p + weighted_q / q - reaction; }
};

namespace detail {

inline double norm2(const Vec2& g) { return std::hypot(g[0], g[1]); }

// Gradient summands ||Du||_p^p and \int a|Du|^q, exact per element.
inline void gradient_summands(const DoublePhaseProblem& pr, const ElementGradient& g,
                              double& grad_p, double& weighted_q) {
  grad_p = 0.0;
  weighted_q = 0.0;
  const Mesh& m = *pr.mesh;
  for (int e = 0; e < m.n_elements(); ++e) {
    const double gn = norm2(g.values[e]);
    grad_p += m.element_measures[e] * std::pow(gn, pr.p);
    weighted_q += m.element_measures[e] * pr.weight_at_centroids[e] * std::pow(gn, pr.q);
  }
}

// \int G(z, t*u(z)) * w(z) dz where w is either 1 (for G = F) or u (for
// G = f), shared by energy, defect and fibering so the t = 1 identities are
// exact.
template <class G>
inline double integrate_reaction(const DoublePhaseProblem& pr, const Field& u, double t,
                                 bool times_u, G&& gfun) {
  const Mesh& m = *pr.mesh;
  const int k = m.nodes_per_element();
  double total = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto quad = element_quadrature(m, e);
    double local = 0.0;
    for (const auto& qp : quad) {
      double uv = 0.0;
      for (int i = 0; i < k; ++i) uv += qp.bary[i] * u.values[m.elements[e][i]];
      const double gv = gfun(qp.z, t * uv);
      local += qp.weight * (times_u ? gv * uv : gv);
    }
    if (!std::isfinite(local))
      throw EvaluationError("non-finite reaction integral on element " + std::to_string(e), e);
    total += local;
  }
  return total;
}

}  // namespace detail

inline double integrate_F(const DoublePhaseProblem& pr, const Field& u, double t = 1.0) {
  return detail::integrate_reaction(pr, u, t, false,
                                    [&pr](Vec2 z, double x) { return pr.reaction.F(z, x); });
}

// \int f(z, t*u) u dz
inline double integrate_f_times_u(const DoublePhaseProblem& pr, const Field& u, double t = 1.0) {
  return detail::integrate_reaction(pr, u, t, true,
                                    [&pr](Vec2 z, double x) { return pr.reaction.f(z, x); });
}

inline EnergyParts energy_parts(const DoublePhaseProblem& pr, const Field& u) {
  if (u.mesh != pr.mesh) throw std::invalid_argument("energy: field not on problem mesh");
  EnergyParts parts;
  parts.p = pr.p;
  parts.q = pr.q;
  const ElementGradient g = gradient(u);
  detail::gradient_summands(pr, g, parts.grad_p, parts.weighted_q);
  parts.reaction = integrate_F(pr, u);
  return parts;
}

inline double energy(const DoublePhaseProblem& pr, const Field& u) {
  return energy_parts(pr, u).value();
}

// Galerkin representation of phi'(u): entry i = <phi'(u), hat_i>, boundary
// entries fixed at 0. Gradient norms are regularized as
// (|Du|^2 + eps^2)^{(s-2)/2} Du so descent stays well-defined for s < 2.
struct Residual {
  std::vector<double> values;
  double inf_norm() const {
    double v = 0.0;
    for (double x : values) v = std::max(v, std::abs(x));
    return v;
  }
};

inline Residual residual(const DoublePhaseProblem& pr, const Field& u) {
  if (u.mesh != pr.mesh) throw std::invalid_argument("residual: field not on problem mesh");
  const Mesh& m = *pr.mesh;
  const int k = m.nodes_per_element();
  Residual r;
  r.values.assign(m.n_vertices(), 0.0);
  const ElementGradient g = gradient(u);
  const double eps2 = pr.epsilon * pr.epsilon;
  for (int e = 0; e < m.n_elements(); ++e) {
    const double meas = m.element_measures[e];
    const double g2 = g.values[e][0] * g.values[e][0] + g.values[e][1] * g.values[e][1];
    const double cp = std::pow(g2 + eps2, 0.5 * (pr.p - 2.0));
    const double cq = pr.weight_at_centroids[e] * std::pow(g2 + eps2, 0.5 * (pr.q - 2.0));
    const Vec2 flux = {(cp + cq) * g.values[e][0], (cp + cq) * g.values[e][1]};
    const auto sg = detail::shape_gradients(m, e);
    const auto quad = element_quadrature(m, e);
    for (int i = 0; i < k; ++i) {
      const int node = m.elements[e][i];
      double contrib = meas * (flux[0] * sg[i][0] + flux[1] * sg[i][1]);
      for (const auto& qp : quad) {
        double uv = 0.0;
        for (int j = 0; j < k; ++j) uv += qp.bary[j] * u.values[m.elements[e][j]];
        contrib -= qp.weight * pr.reaction.f(qp.z, uv) * qp.bary[i];
      }
      if (!std::isfinite(contrib))
        throw EvaluationError("non-finite residual on element " + std::to_string(e), e);
      r.values[node] += contrib;
    }
  }
  for (int b : m.boundary_nodes) r.values[b] = 0.0;
  return r;
}

// <phi'(u), u> = ||Du||_p^p + \int a|Du|^q - \int f(z,u)u. Zero exactly on
// the Nehari manifold. Unregularized, so it matches the fibering derivative
// at t = 1 exactly.
inline double nehari_defect(const DoublePhaseProblem& pr, const Field& u) {
  if (u.is_zero()) throw std::invalid_argument("nehari_defect: u must be nonzero");
  double grad_p = 0.0, weighted_q = 0.0;
  const ElementGradient g = gradient(u);
  detail::gradient_summands(pr, g, grad_p, weighted_q);
  return grad_p + weighted_q - integrate_f_times_u(pr, u);
}

// Tolerance scale used across the solver modules.
inline double tolerance_scale(const DoublePhaseProblem& pr, const Field& u) {
  return 1.0 + std::abs(energy(pr, u)) + u.inf_norm();
}

}  // namespace dphase
