#pragma once

// Double-phase problem data: exponents (p,q), weight a(z), reaction f(z,x),
// plus sampled verification of the standing hypotheses on a and f.

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dphase/mesh.hpp"

namespace dphase {

struct Weight {
  std::function<double(Vec2)> eval;
  std::string tag;  // constant | power | twolevel
};

inline Weight make_constant_weight(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("constant weight must be positive");
  return {[c](Vec2) { return c; }, "constant"};
}

// a(z) = c*|z - z0|^alpha: continuous, vanishing at z0, not bounded away
// from zero.
inline Weight make_power_weight(double c, Vec2 z0, double alpha) {
  if (!(c > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("power weight: c and alpha must be positive");
  return {[c, z0, alpha](Vec2 z) {
            const double d = std::hypot(z[0] - z0[0], z[1] - z0[1]);
            return c * std::pow(d, alpha);
          },
          "power"};
}

// Discontinuous two-level weight: a_in on |z - z0| < radius, a_out elsewhere.
inline Weight make_two_level_weight(double a_in, double a_out, Vec2 z0, double radius) {
  if (!(a_in > 0.0) || !(a_out > 0.0))
    throw std::invalid_argument("two-level weight: levels must be positive");
  return {[a_in, a_out, z0, radius](Vec2 z) {
            const double d = std::hypot(z[0] - z0[0], z[1] - z0[1]);
            return d < radius ? a_in : a_out;
          },
          "twolevel"};
}

// Reaction f(z,x) with derivative and antiderivative, together with the
// quantifiers used by the hypothesis checks: growth exponent r and envelope
// constant a0 (|f'_x| <= a0(1+|x|^{r-2})), superlinearity pair (tau, beta0)
// (liminf (fx - pF)/|x|^tau >= beta0).
struct Reaction {
  std::function<double(Vec2, double)> f;
  std::function<double(Vec2, double)> dfdx;  // never called at x = 0
  std::function<double(Vec2, double)> F;
  double r = 0.0;
  double tau = 0.0;
  double beta0 = 0.0;
  double a0 = 0.0;
  std::string tag;  // f1 | f2 | linear
  double s = 0.0;   // f2 only
  double k = 0.0;   // f2 only, k = s - p
};

// f1(x) = |x|^{r-2} x. The superlinearity quantifiers depend on the problem
// exponent p: (fx - pF)/|x|^r = 1 - p/r identically.
inline Reaction make_power_reaction(double r, double p) {
  if (!(r > p)) throw std::invalid_argument("power reaction: need r > p");
  Reaction re;
  re.f = [r](Vec2, double x) { return std::pow(std::abs(x), r - 2.0) * x; };
  re.dfdx = [r](Vec2, double x) { return (r - 1.0) * std::pow(std::abs(x), r - 2.0); };
  re.F = [r](Vec2, double x) { return std::pow(std::abs(x), r) / r; };
  re.r = r;
  re.tau = r;
  re.beta0 = 1.0 - p / r;
  re.a0 = r - 1.0;
  re.tag = "f1";
  return re;
}

// f2(x) = |x|^{s-2}x - |x|^{p-2}x on |x| <= 1 and k|x|^{p-2}x ln|x| beyond,
// with k = s - p > 0. Superlinear but fails the Ambrosetti-Rabinowitz
// condition.
inline Reaction make_log_perturbed_reaction(double p, double s) {
  if (!(s > p)) throw std::invalid_argument("log-perturbed reaction: need s > p");
  const double k = s - p;
  Reaction re;
  re.f = [p, s, k](Vec2, double x) {
    const double ax = std::abs(x);
    if (ax <= 1.0) return std::pow(ax, s - 2.0) * x - std::pow(ax, p - 2.0) * x;
    return k * std::pow(ax, p - 2.0) * x * std::log(ax);
  };
  re.dfdx = [p, s, k](Vec2, double x) {
    const double ax = std::abs(x);
    if (ax <= 1.0) return (s - 1.0) * std::pow(ax, s - 2.0) - (p - 1.0) * std::pow(ax, p - 2.0);
    return k * std::pow(ax, p - 2.0) * ((p - 1.0) * std::log(ax) + 1.0);
  };
  re.F = [p, s, k](Vec2, double x) {
    const double ax = std::abs(x);
    if (ax <= 1.0) return std::pow(ax, s) / s - std::pow(ax, p) / p;
    const double inner = 1.0 / s - 1.0 / p;
    const double lp = std::pow(ax, p);
    return inner + k * (lp * std::log(ax) / p - lp / (p * p) + 1.0 / (p * p));
  };
  re.r = s;
  re.tau = p;
  re.beta0 = k / p;  // (fx - pF)/|x|^p -> k/p
  // |f'| on |x|<=1 is at most (s-1)+(p-1); beyond, k|x|^{p-2}((p-1)ln|x|+1)
  // is dominated by a multiple of |x|^{s-2}.
  re.a0 = s + p;
  re.tag = "f2";
  re.s = s;
  re.k = k;
  return re;
}

// f(x) = x. Violates H(f)(iv) whenever p > 2; used as a negative control.
inline Reaction make_linear_reaction() {
  Reaction re;
  re.f = [](Vec2, double x) { return x; };
  re.dfdx = [](Vec2, double) { return 1.0; };
  re.F = [](Vec2, double x) { return 0.5 * x * x; };
  re.r = 2.0;
  re.tau = 2.0;
  re.beta0 = 0.0;
  re.a0 = 1.0;
  re.tag = "linear";
  return re;
}

struct DoublePhaseProblem {
  double p = 0.0;
  double q = 0.0;
  const Mesh* mesh = nullptr;
  Weight weight;
  std::vector<double> weight_at_centroids;
  Reaction reaction;
  double epsilon = 1e-10;  // gradient regularization in the residual
};

inline DoublePhaseProblem make_problem(const Mesh& mesh, double p, double q, Weight weight,
                                       Reaction reaction, double epsilon = 1e-10) {
  if (!(1.0 < q && q < p))
    throw std::invalid_argument("make_problem: exponents must satisfy 1 < q < p");
  if (epsilon < 0.0) throw std::invalid_argument("make_problem: epsilon must be >= 0");
  DoublePhaseProblem pr;
  pr.p = p;
  pr.q = q;
  pr.mesh = &mesh;
  pr.weight = std::move(weight);
  pr.reaction = std::move(reaction);
  pr.epsilon = epsilon;
  pr.weight_at_centroids.resize(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const double a = pr.weight.eval(mesh.centroid(e));
    if (!(a > 0.0)) throw std::invalid_argument("make_problem: weight must be positive on Omega");
    pr.weight_at_centroids[e] = a;
  }
  return pr;
}

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<Check> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  std::string summary() const {
    std::ostringstream os;
    for (const auto& c : checks)
      os << (c.pass ? "[pass] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
    return os.str();
  }
};

inline double critical_exponent(double p, int N) {
  return p < N ? N * p / (N - p) : std::numeric_limits<double>::infinity();
}

// Exponent windows: 1 < q < p, p < r < p*, tau in (max{1,(r-p)N/p}, p*).
inline ValidationReport validate_exponents(double p, double q, double r, double tau, int N) {
  ValidationReport rep;
  auto add = [&rep](const std::string& name, bool pass, const std::string& detail) {
    rep.checks.push_back({name, pass, detail});
  };
  const double pstar = critical_exponent(p, N);
  {
    std::ostringstream d;
    d << "q=" << q << ", p=" << p;
    add("1 < q < p", 1.0 < q && q < p, d.str());
  }
  {
    std::ostringstream d;
    d << "p=" << p << ", r=" << r << ", p*=" << pstar;
    add("p < r < p*", p < r && r < pstar, d.str());
  }
  {
    const double lo = std::max(1.0, (r - p) * N / p);
    std::ostringstream d;
    d << "tau=" << tau << ", window=(" << lo << ", " << pstar << ")";
    add("tau window", lo < tau && tau < pstar, d.str());
  }
  return rep;
}

inline std::vector<double> default_x_grid() {
  // +-logspace(1e-6, 1e6, 49)
  std::vector<double> xs;
  for (int i = 0; i < 49; ++i) {
    const double x = std::pow(10.0, -6.0 + 12.0 * i / 48.0);
    xs.push_back(x);
    xs.push_back(-x);
  }
  return xs;
}

// Sampled verification of H(f)(i)-(iv). Limits are checked as monotone
// trends on geometric grids; a factor-2 slack is applied to beta0. The
// outcome is evidence, not a proof of the a.e.-uniform statements.
inline ValidationReport check_hypotheses_f(const Reaction& re, double p, double q,
                                           const std::vector<double>& sample_xs,
                                           const std::vector<Vec2>& zs) {
  ValidationReport rep;
  std::vector<double> xs = sample_xs;
  std::sort(xs.begin(), xs.end());

  // (iv), sign part: 0 < (p-1) f x at every sample.
  {
    bool ok = true;
    std::ostringstream d;
    for (const auto& z : zs) {
      for (double x : xs) {
        if (x == 0.0) continue;
        if (!((p - 1.0) * re.f(z, x) * x > 0.0)) {
          ok = false;
          d << "(p-1) f x = " << (p - 1.0) * re.f(z, x) * x << " at x=" << x;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) d << "holds at all samples";
    rep.checks.push_back({"H(f)(iv) sign: 0 < (p-1) f x", ok, d.str()});
  }

  // (iv), monotonicity part: (p-1) f x <= f'_x x^2, i.e. f/|x|^{p-1}
  // nondecreasing away from 0.
  {
    bool ok = true;
    std::ostringstream d;
    for (const auto& z : zs) {
      for (double x : xs) {
        if (x == 0.0) continue;
        const double lhs = (p - 1.0) * re.f(z, x) * x;
        const double rhs = re.dfdx(z, x) * x * x;
        if (lhs > rhs + 1e-12 * (std::abs(lhs) + std::abs(rhs))) {
          ok = false;
          d << "lhs=" << lhs << " > rhs=" << rhs << " at x=" << x;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) d << "holds at all samples";
    rep.checks.push_back({"H(f)(iv) monotonicity: (p-1) f x <= f'_x x^2", ok, d.str()});
  }

  // (iii) f(x)/(|x|^{q-2}x) -> 0 as x -> 0: magnitudes nonincreasing toward
  // 0 along the geometric grid, with the smallest-|x| ratio near zero.
  {
    bool ok = true;
    std::ostringstream d;
    for (const auto& z : zs) {
      for (int sign = -1; sign <= 1 && ok; sign += 2) {
        std::vector<std::pair<double, double>> samples;  // (|x|, |ratio|)
        for (double x : xs) {
          if (sign * x <= 0.0 || std::abs(x) > 1e-1) continue;
          samples.emplace_back(std::abs(x),
                               std::abs(re.f(z, x) / (std::pow(std::abs(x), q - 2.0) * x)));
        }
        std::sort(samples.begin(), samples.end());  // ascending |x|
        if (samples.empty()) {
          ok = false;
          d << "no samples with |x| <= 0.1";
          break;
        }
        double peak = 0.0;
        for (const auto& [ax, ratio] : samples) peak = std::max(peak, ratio);
        for (size_t i = 1; i < samples.size(); ++i) {
          if (samples[i - 1].second > samples[i].second * (1.0 + 1e-9) + 1e-12 * (1.0 + peak)) {
            ok = false;
            d << "ratio not decreasing toward 0 near |x|=" << samples[i].first;
            break;
          }
        }
        if (ok && samples.front().second > 1e-3 * (1.0 + peak)) {
          ok = false;
          d << "smallest-|x| ratio " << samples.front().second << " not near 0";
        }
      }
      if (!ok) break;
    }
    if (ok) d << "ratio decays monotonically toward 0";
    rep.checks.push_back({"H(f)(iii): f/(|x|^{q-2}x) -> 0 at 0", ok, d.str()});
  }

  // (i) |f'_x| <= a0 (1 + |x|^{r-2}).
  {
    bool ok = true;
    std::ostringstream d;
    for (const auto& z : zs) {
      for (double x : xs) {
        if (x == 0.0) continue;
        const double bound = re.a0 * (1.0 + std::pow(std::abs(x), re.r - 2.0));
        if (std::abs(re.dfdx(z, x)) > bound * (1.0 + 1e-12)) {
          ok = false;
          d << "envelope exceeded at x=" << x;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) d << "within envelope a0(1+|x|^{r-2})";
    rep.checks.push_back({"H(f)(i): |f'_x| <= a0(1+|x|^{r-2})", ok, d.str()});
  }

  // (ii) (f x - p F)/|x|^tau >= beta0/2 on the large-|x| part of the grid.
  {
    bool ok = true;
    std::ostringstream d;
    const double floor = 0.5 * re.beta0;
    for (const auto& z : zs) {
      for (double x : xs) {
        if (std::abs(x) < 1e2) continue;
        const double val =
            (re.f(z, x) * x - p * re.F(z, x)) / std::pow(std::abs(x), re.tau);
        if (!(val >= floor)) {
          ok = false;
          d << "quotient " << val << " < beta0/2 at x=" << x;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) d << "quotient >= beta0/2 on large |x|";
    rep.checks.push_back({"H(f)(ii): (fx - pF)/|x|^tau >= beta0/2", ok, d.str()});
  }

  return rep;
}

struct ArReport {
  bool holds = false;
  double theta = 0.0;
  double witness_x = 0.0;  // violating sample when holds == false
  std::string detail;
};

// Ambrosetti-Rabinowitz test: 0 < theta F(z,x) <= f(z,x) x on samples with
// |x| >= x_min (the condition only constrains large arguments).
inline ArReport check_ar_condition(const Reaction& re, double theta,
                                   const std::vector<double>& sample_xs,
                                   const std::vector<Vec2>& zs, double x_min = 1e2) {
  ArReport rep;
  rep.theta = theta;
  if (!(theta > 0.0)) throw std::invalid_argument("check_ar_condition: theta must be positive");
  for (const auto& z : zs) {
    for (double x : sample_xs) {
      if (std::abs(x) < x_min) continue;
      const double tf = theta * re.F(z, x);
      const double fx = re.f(z, x) * x;
      if (!(tf > 0.0) || tf > fx * (1.0 + 1e-12)) {
        rep.holds = false;
        rep.witness_x = x;
        std::ostringstream d;
        d << "theta*F=" << tf << " vs f*x=" << fx << " at x=" << x;
        rep.detail = d.str();
        return rep;
      }
    }
  }
  rep.holds = true;
  rep.detail = "0 < theta F <= f x at all samples with |x| >= " + std::to_string(x_min);
  return rep;
}

inline std::vector<Vec2> element_centroids(const Mesh& m) {
  std::vector<Vec2> zs(m.n_elements());
  for (int e = 0; e < m.n_elements(); ++e) zs[e] = m.centroid(e);
  return zs;
}

}  // namespace dphase
