#pragma once

// Simplicial meshes of an interval or a rectangle, piecewise-linear nodal
// fields with homogeneous Dirichlet values, element gradients and quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dphase {

using Vec2 = std::array<double, 2>;

struct Mesh {
  int dim = 1;  // 1 or 2
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> elements;  // first dim+1 entries used
  std::vector<int> boundary_nodes;           // sorted, unique
  std::vector<char> is_boundary;             // one flag per vertex
  std::vector<double> element_measures;
  double domain_measure = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int nodes_per_element() const { return dim + 1; }

  Vec2 centroid(int e) const {
    Vec2 c{0.0, 0.0};
    const int k = nodes_per_element();
    for (int i = 0; i < k; ++i) {
      c[0] += vertices[elements[e][i]][0];
      c[1] += vertices[elements[e][i]][1];
    }
    c[0] /= k;
    c[1] /= k;
    return c;
  }
};

namespace detail {

inline void finalize_boundary(Mesh& m) {
  m.boundary_nodes.clear();
  for (int i = 0; i < m.n_vertices(); ++i)
    if (m.is_boundary[i]) m.boundary_nodes.push_back(i);
}

}  // namespace detail

// Uniform 1D mesh on (0, length).
inline Mesh build_interval_mesh(double length, int n_cells) {
  if (!(length > 0.0)) throw std::invalid_argument("build_interval_mesh: length must be positive");
  if (n_cells < 2) throw std::invalid_argument("build_interval_mesh: n_cells must be >= 2");
  Mesh m;
  m.dim = 1;
  m.vertices.resize(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) m.vertices[i] = {length * i / n_cells, 0.0};
  m.is_boundary.assign(n_cells + 1, 0);
  m.is_boundary.front() = 1;
  m.is_boundary.back() = 1;
  detail::finalize_boundary(m);
  m.elements.resize(n_cells);
  m.element_measures.resize(n_cells);
  for (int e = 0; e < n_cells; ++e) {
    m.elements[e] = {e, e + 1, -1};
    m.element_measures[e] = m.vertices[e + 1][0] - m.vertices[e][0];
  }
  m.domain_measure = length;
  return m;
}

// 1D mesh from an explicit strictly increasing node list.
inline Mesh build_interval_mesh(const std::vector<double>& nodes) {
  if (nodes.size() < 3) throw std::invalid_argument("build_interval_mesh: need at least 3 nodes");
  Mesh m;
  m.dim = 1;
  const int n = static_cast<int>(nodes.size());
  m.vertices.resize(n);
  for (int i = 0; i < n; ++i) {
    if (i > 0 && !(nodes[i] > nodes[i - 1]))
      throw std::invalid_argument("build_interval_mesh: nodes must be strictly increasing");
    m.vertices[i] = {nodes[i], 0.0};
  }
  m.is_boundary.assign(n, 0);
  m.is_boundary.front() = 1;
  m.is_boundary.back() = 1;
  detail::finalize_boundary(m);
  m.elements.resize(n - 1);
  m.element_measures.resize(n - 1);
  for (int e = 0; e + 1 < n; ++e) {
    m.elements[e] = {e, e + 1, -1};
    m.element_measures[e] = nodes[e + 1] - nodes[e];
  }
  m.domain_measure = nodes.back() - nodes.front();
  return m;
}

// Structured triangulation of (0,lx) x (0,ly); each grid cell is split into
// two triangles along the same diagonal.
inline Mesh build_rectangle_mesh(double lx, double ly, int nx, int ny) {
  if (!(lx > 0.0) || !(ly > 0.0))
    throw std::invalid_argument("build_rectangle_mesh: side lengths must be positive");
  if (nx < 2 || ny < 2) throw std::invalid_argument("build_rectangle_mesh: nx, ny must be >= 2");
  Mesh m;
  m.dim = 2;
  const int npx = nx + 1, npy = ny + 1;
  m.vertices.resize(npx * npy);
  m.is_boundary.assign(npx * npy, 0);
  for (int j = 0; j < npy; ++j)
    for (int i = 0; i < npx; ++i) {
      const int id = j * npx + i;
      m.vertices[id] = {lx * i / nx, ly * j / ny};
      if (i == 0 || j == 0 || i == nx || j == ny) m.is_boundary[id] = 1;
    }
  detail::finalize_boundary(m);
  const double cell_area = (lx / nx) * (ly / ny) / 2.0;
  auto vid = [npx](int i, int j) { return j * npx + i; };
  m.elements.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      m.elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      m.elements.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  m.element_measures.assign(m.elements.size(), cell_area);
  m.domain_measure = lx * ly;
  return m;
}

// Nodal coefficients of a conforming piecewise-linear function with
// homogeneous Dirichlet values. Construction zeroes the boundary entries.
struct Field {
  const Mesh* mesh = nullptr;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Mesh& m) : mesh(&m), values(m.n_vertices(), 0.0) {}
  Field(const Mesh& m, std::vector<double> vals) : mesh(&m), values(std::move(vals)) {
    if (static_cast<int>(values.size()) != m.n_vertices())
      throw std::invalid_argument("Field: value count must match vertex count");
    for (int b : m.boundary_nodes) values[b] = 0.0;
  }

  double inf_norm() const {
    double v = 0.0;
    for (double x : values) v = std::max(v, std::abs(x));
    return v;
  }
  bool is_zero() const {
    for (double x : values)
      if (x != 0.0) return false;
    return true;
  }
};

struct ElementGradient {
  std::vector<Vec2> values;  // one constant gradient per element; [0] only in 1D
};

namespace detail {

// Gradients of the barycentric (hat) shape functions on element e.
inline std::array<Vec2, 3> shape_gradients(const Mesh& m, int e) {
  if (m.dim == 1) {
    const double h = m.element_measures[e];
    return {Vec2{-1.0 / h, 0.0}, Vec2{1.0 / h, 0.0}, Vec2{0.0, 0.0}};
  }
  const auto& el = m.elements[e];
  const Vec2& a = m.vertices[el[0]];
  const Vec2& b = m.vertices[el[1]];
  const Vec2& c = m.vertices[el[2]];
  const double twoA = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
  return {Vec2{(b[1] - c[1]) / twoA, (c[0] - b[0]) / twoA},
          Vec2{(c[1] - a[1]) / twoA, (a[0] - c[0]) / twoA},
          Vec2{(a[1] - b[1]) / twoA, (b[0] - a[0]) / twoA}};
}

}  // namespace detail

inline ElementGradient gradient(const Field& u) {
  const Mesh& m = *u.mesh;
  ElementGradient g;
  g.values.assign(m.n_elements(), Vec2{0.0, 0.0});
  const int k = m.nodes_per_element();
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto sg = detail::shape_gradients(m, e);
    for (int i = 0; i < k; ++i) {
      const double v = u.values[m.elements[e][i]];
      g.values[e][0] += v * sg[i][0];
      g.values[e][1] += v * sg[i][1];
    }
  }
  return g;
}

// One quadrature point: location, weight (weights over an element sum to the
// element measure), and barycentric coordinates of the point.
struct QuadPoint {
  Vec2 z;
  double weight;
  std::array<double, 3> bary;
};

// 3-point Gauss in 1D (exact to degree 5), mid-edge rule in 2D (exact to
// degree 2).
inline std::array<QuadPoint, 3> element_quadrature(const Mesh& m, int e) {
  std::array<QuadPoint, 3> q;
  if (m.dim == 1) {
    const double x0 = m.vertices[m.elements[e][0]][0];
    const double x1 = m.vertices[m.elements[e][1]][0];
    const double h = x1 - x0;
    const double g = std::sqrt(3.0 / 5.0);
    const double ref[3] = {0.5 * (1.0 - g), 0.5, 0.5 * (1.0 + g)};
    const double w[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    for (int k = 0; k < 3; ++k) {
      q[k].z = {x0 + ref[k] * h, 0.0};
      q[k].weight = w[k] * h;
      q[k].bary = {1.0 - ref[k], ref[k], 0.0};
    }
    return q;
  }
  const auto& el = m.elements[e];
  const Vec2& a = m.vertices[el[0]];
  const Vec2& b = m.vertices[el[1]];
  const Vec2& c = m.vertices[el[2]];
  const double w = m.element_measures[e] / 3.0;
  q[0] = {{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])}, w, {0.5, 0.5, 0.0}};
  q[1] = {{0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1])}, w, {0.0, 0.5, 0.5}};
  q[2] = {{0.5 * (a[0] + c[0]), 0.5 * (a[1] + c[1])}, w, {0.5, 0.0, 0.5}};
  return q;
}

// \int_Omega |u|^s dz by per-element quadrature on the linear interpolant.
inline double integrate_power(const Field& u, double s) {
  if (!(s >= 1.0)) throw std::invalid_argument("integrate_power: exponent must be >= 1");
  const Mesh& m = *u.mesh;
  const int k = m.nodes_per_element();
  double total = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto quad = element_quadrature(m, e);
    for (const auto& qp : quad) {
      double v = 0.0;
      for (int i = 0; i < k; ++i) v += qp.bary[i] * u.values[m.elements[e][i]];
      total += qp.weight * std::pow(std::abs(v), s);
    }
  }
  return total;
}

inline Field positive_part(const Field& u) {
  Field r(*u.mesh);
  for (size_t i = 0; i < u.values.size(); ++i) r.values[i] = std::max(u.values[i], 0.0);
  return r;
}

inline Field negative_part(const Field& u) {
  Field r(*u.mesh);
  for (size_t i = 0; i < u.values.size(); ++i) r.values[i] = std::max(-u.values[i], 0.0);
  return r;
}

inline Field scaled(const Field& u, double t) {
  Field r(*u.mesh);
  for (size_t i = 0; i < u.values.size(); ++i) r.values[i] = t * u.values[i];
  return r;
}

// CSV export: header `x[,y],u`, one row per vertex, 17 significant digits.
inline void write_field_csv(const Field& u, std::ostream& os) {
  const Mesh& m = *u.mesh;
  char buf[96];
  os << (m.dim == 1 ? "x,u\n" : "x,y,u\n");
  for (int i = 0; i < m.n_vertices(); ++i) {
    if (m.dim == 1)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", m.vertices[i][0], u.values[i]);
    else
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", m.vertices[i][0], m.vertices[i][1],
                    u.values[i]);
    os << buf;
  }
}

inline void write_field_csv(const Field& u, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_field_csv: cannot open " + path);
  write_field_csv(u, os);
}

// Interpolate a 1D field onto another 1D mesh of the same interval.
inline Field interpolate_1d(const Field& u, const Mesh& target) {
  const Mesh& src = *u.mesh;
  if (src.dim != 1 || target.dim != 1)
    throw std::invalid_argument("interpolate_1d: 1D meshes required");
  Field r(target);
  int e = 0;
  for (int i = 0; i < target.n_vertices(); ++i) {
    const double x = target.vertices[i][0];
    while (e + 1 < src.n_elements() && x > src.vertices[e + 1][0]) ++e;
    const double x0 = src.vertices[e][0], x1 = src.vertices[e + 1][0];
    const double t = std::clamp((x - x0) / (x1 - x0), 0.0, 1.0);
    r.values[i] = (1.0 - t) * u.values[e] + t * u.values[e + 1];
  }
  for (int b : target.boundary_nodes) r.values[b] = 0.0;
  return r;
}

}  // namespace dphase
