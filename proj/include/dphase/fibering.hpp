#pragma once

// Fibering map mu_u(t) = phi(t u), its derivative, and the unique Nehari
// projection scaling t_u found by bracketed bisection on mu'_u.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dphase/energy.hpp"

namespace dphase {

struct ProjectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FiberingResult {
  double t_u = 0.0;
  Field projected;
  double defect_at_root = 0.0;  // <phi'(t_u u), t_u u>
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
};

namespace detail {

// Caches the t-independent gradient summands; only the reaction integral is
// re-evaluated per t.
struct FiberingMap {
  const DoublePhaseProblem* pr;
  const Field* u;
  double A = 0.0;  // ||Du||_p^p
  double B = 0.0;  // \int a|Du|^q

  FiberingMap(const DoublePhaseProblem& problem, const Field& field) : pr(&problem), u(&field) {
    const ElementGradient g = gradient(field);
    gradient_summands(problem, g, A, B);
  }
  double mu(double t) const {
    return std::pow(t, pr->p) / pr->p * A + std::pow(t, pr->q) / pr->q * B -
           integrate_F(*pr, *u, t);
  }
  double dmu(double t) const {
    return std::pow(t, pr->p - 1.0) * A + std::pow(t, pr->q - 1.0) * B -
           integrate_f_times_u(*pr, *u, t);
  }
};

}  // namespace detail

// (mu_u(t), mu'_u(t)); at t = 1 the derivative equals the Nehari defect.
inline std::pair<double, double> fibering_values(const DoublePhaseProblem& pr, const Field& u,
                                                 double t) {
  if (!(t > 0.0)) throw std::invalid_argument("fibering_values: t must be positive");
  if (u.is_zero()) throw std::invalid_argument("fibering_values: u must be nonzero");
  detail::FiberingMap fm(pr, u);
  return {fm.mu(t), fm.dmu(t)};
}

// Unique t_u > 0 with mu'_u(t_u) = 0. Bracket expansion by factors of 2 up
// to 2^+-20, then bisection to |hi - lo| <= tol * t_u.
inline FiberingResult project_to_nehari(const DoublePhaseProblem& pr, const Field& u,
                                        double tol = 1e-12) {
  if (u.is_zero()) throw std::invalid_argument("project_to_nehari: u must be nonzero");
  if (!(tol > 0.0)) throw std::invalid_argument("project_to_nehari: tol must be positive");
  detail::FiberingMap fm(pr, u);

  FiberingResult res;
  double lo = 1.0, hi = 1.0;
  double dlo = fm.dmu(1.0), dhi = dlo;
  int iters = 0;
  // mu' > 0 for small t and < 0 for large t under H(f); expand toward the
  // sign change.
  if (dlo == 0.0) {
    lo = hi = 1.0;
  } else if (dlo > 0.0) {
    for (int k = 0; k < 20 && dhi > 0.0; ++k) {
      lo = hi;
      dlo = dhi;
      hi *= 2.0;
      dhi = fm.dmu(hi);
      ++iters;
    }
    if (dhi > 0.0)
      throw ProjectionError("project_to_nehari: no sign change of mu' up to t = 2^20");
  } else {
    for (int k = 0; k < 20 && dlo < 0.0; ++k) {
      hi = lo;
      dhi = dlo;
      lo *= 0.5;
      dlo = fm.dmu(lo);
      ++iters;
    }
    if (dlo < 0.0)
      throw ProjectionError("project_to_nehari: no sign change of mu' down to t = 2^-20");
  }
  res.bracket_lo = lo;
  res.bracket_hi = hi;

  double mid = 0.5 * (lo + hi);
  while (hi - lo > tol * mid) {
    mid = 0.5 * (lo + hi);
    const double dm = fm.dmu(mid);
    ++iters;
    if (dm == 0.0) {
      lo = hi = mid;
      break;
    }
    if (dm > 0.0)
      lo = mid;
    else
      hi = mid;
    if (iters > 300) break;
  }
  res.t_u = 0.5 * (lo + hi);
  res.projected = scaled(u, res.t_u);
  res.defect_at_root = res.t_u * fm.dmu(res.t_u);
  res.iterations = iters;
  return res;
}

struct FiberingRow {
  double t;
  double mu;
  double dmu;
};

inline std::vector<FiberingRow> fibering_curve(const DoublePhaseProblem& pr, const Field& u,
                                               const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("fibering_curve: empty grid");
  if (u.is_zero()) throw std::invalid_argument("fibering_curve: u must be nonzero");
  detail::FiberingMap fm(pr, u);
  std::vector<FiberingRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("fibering_curve: grid values must be positive");
    rows.push_back({t, fm.mu(t), fm.dmu(t)});
  }
  return rows;
}

inline std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return g;
}

}  // namespace dphase
