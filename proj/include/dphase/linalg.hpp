#pragma once

// Banded symmetric positive-definite solver for the piecewise-linear
// stiffness matrix; used as a descent preconditioner. Structured meshes give
// small bandwidth (1 in 1D, nx+2 on the rectangle grid).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dphase/mesh.hpp"

namespace dphase {

class BandedCholesky {
 public:
  BandedCholesky(int n, int bandwidth) : n_(n), bw_(bandwidth), a_(size_t(n) * (bandwidth + 1), 0.0) {}

  double& at(int i, int j) {  // j <= i, i - j <= bw
    return a_[size_t(i) * (bw_ + 1) + (j - i + bw_)];
  }
  double at(int i, int j) const { return a_[size_t(i) * (bw_ + 1) + (j - i + bw_)]; }

  void factorize() {
    for (int i = 0; i < n_; ++i) {
      const int j0 = std::max(0, i - bw_);
      for (int j = j0; j <= i; ++j) {
        double sum = at(i, j);
        const int k0 = std::max(j0, j - bw_);
        for (int k = k0; k < j; ++k) sum -= at(i, k) * at(j, k);
        if (j == i) {
          if (!(sum > 0.0)) throw std::runtime_error("BandedCholesky: matrix not SPD");
          at(i, i) = std::sqrt(sum);
        } else {
          at(i, j) = sum / at(j, j);
        }
      }
    }
    factored_ = true;
  }

  std::vector<double> solve(const std::vector<double>& b) const {
    if (!factored_) throw std::logic_error("BandedCholesky: factorize first");
    std::vector<double> x(b);
    for (int i = 0; i < n_; ++i) {
      double sum = x[i];
      const int j0 = std::max(0, i - bw_);
      for (int j = j0; j < i; ++j) sum -= at(i, j) * x[j];
      x[i] = sum / at(i, i);
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double sum = x[i];
      const int j1 = std::min(n_ - 1, i + bw_);
      for (int j = i + 1; j <= j1; ++j) sum -= at(j, i) * x[j];
      x[i] = sum / at(i, i);
    }
    return x;
  }

  int n() const { return n_; }

 private:
  int n_;
  int bw_;
  std::vector<double> a_;
  bool factored_ = false;
};

// Linear (p = 2) stiffness with identity rows/columns on Dirichlet nodes,
// factorized and ready to apply as K^{-1}.
inline BandedCholesky make_stiffness_preconditioner(const Mesh& m) {
  int bw = 0;
  const int k = m.nodes_per_element();
  for (int e = 0; e < m.n_elements(); ++e)
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) bw = std::max(bw, m.elements[e][i] - m.elements[e][j]);
  BandedCholesky K(m.n_vertices(), bw);
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto sg = detail::shape_gradients(m, e);
    const double meas = m.element_measures[e];
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const int ni = m.elements[e][i], nj = m.elements[e][j];
        if (nj > ni) continue;
        if (m.is_boundary[ni] || m.is_boundary[nj]) continue;
        K.at(ni, nj) += meas * (sg[i][0] * sg[j][0] + sg[i][1] * sg[j][1]);
      }
  }
  for (int b : m.boundary_nodes) K.at(b, b) = 1.0;
  K.factorize();
  return K;
}

}  // namespace dphase
