#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dphase/solver.hpp"

using namespace dphase;

namespace {

// 1D double-phase test problem: p=2, q=1.5, a(z) = 1e-3 |z - 1/2|, cubic
// reaction (r = 4).
DoublePhaseProblem test_problem(const Mesh& m) {
  return make_problem(m, 2.0, 1.5, make_power_weight(1e-3, {0.5, 0.0}, 1.0),
                      make_power_reaction(4.0, 2.0));
}

}  // namespace

TEST_CASE("sign classification") {
  const Mesh m = build_interval_mesh(1.0, 3);
  CHECK(sign_classification(Field(m, {0.0, 1.0, 2.0, 0.0})) == SignClass::positive);
  CHECK(sign_classification(Field(m, {0.0, -1.0, 1.0, 0.0})) == SignClass::nodal);
  CHECK(sign_classification(Field(m, {0.0, -1.0, -0.5, 0.0})) == SignClass::negative);
  CHECK(sign_classification(Field(m, {0.0, 1e-15, 1e-16, 0.0})) == SignClass::zero);
  // tiny opposite-sign dip below tol*amplitude does not count as nodal
  CHECK(sign_classification(Field(m, {0.0, -1e-12, 1.0, 0.0})) == SignClass::positive);
  CHECK(to_string(SignClass::nodal) == "nodal");
}

TEST_CASE("ground-state solve: certificates") {
  const Mesh m = build_interval_mesh(1.0, 64);
  const DoublePhaseProblem pr = test_problem(m);
  const SolveReport rep = solve_ground_state(pr);
  REQUIRE(rep.converged);
  const double scale = tolerance_scale(pr, rep.solution);
  CHECK(rep.residual_inf <= 1e-8 * scale);
  CHECK(std::abs(rep.defect) <= 1e-8 * scale);
  CHECK(rep.energy > 0.0);
  CHECK((rep.sign_class == SignClass::positive || rep.sign_class == SignClass::negative));
  // energy trace nonincreasing up to line-search tolerance
  for (size_t i = 1; i < rep.energy_trace.size(); ++i)
    CHECK(rep.energy_trace[i] <= rep.energy_trace[i - 1] + 1e-14);
  // reflection symmetry of the even functional
  const Field neg = scaled(rep.solution, -1.0);
  CHECK(energy(pr, neg) == Catch::Approx(rep.energy).epsilon(1e-14));
  CHECK(residual(pr, neg).inf_norm() == Catch::Approx(rep.residual_inf).margin(1e-12));
}

TEST_CASE("ground state minimizes over random Nehari projections") {
  const Mesh m = build_interval_mesh(1.0, 64);
  const DoublePhaseProblem pr = test_problem(m);
  const SolveReport rep = solve_ground_state(pr);
  REQUIRE(rep.converged);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Field w = random_field(m, rng);
    const FiberingResult proj = project_to_nehari(pr, w);
    CHECK(energy(pr, proj.projected) >= rep.energy - 1e-8);
  }
}

TEST_CASE("ground-state energy is mesh-Cauchy") {
  double prev_m = 0.0, prev_gap = 1e300;
  for (int n : {32, 64, 128}) {
    const Mesh mesh = build_interval_mesh(1.0, n);
    const SolveReport rep = solve_ground_state(test_problem(mesh));
    REQUIRE(rep.converged);
    if (n > 32) {
      const double gap = std::abs(rep.energy - prev_m);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    prev_m = rep.energy;
  }
}

TEST_CASE("coercivity trend on the manifold") {
  // projecting increasingly oscillatory fields onto the manifold drives the
  // energy up without bound (sampled trend)
  const Mesh m = build_interval_mesh(1.0, 128);
  const DoublePhaseProblem pr = test_problem(m);
  double prev = -1e300;
  for (int mode : {1, 2, 4, 8}) {
    Field u(m);
    for (int i = 0; i < m.n_vertices(); ++i)
      u.values[i] = std::sin(mode * M_PI * m.vertices[i][0]);
    for (int b : m.boundary_nodes) u.values[b] = 0.0;
    const double phi = energy(pr, project_to_nehari(pr, u).projected);
    CHECK(phi > prev);
    prev = phi;
  }
}

TEST_CASE("nodal solve: certificates") {
  const Mesh m = build_interval_mesh(1.0, 64);
  const DoublePhaseProblem pr = test_problem(m);
  const SolveReport ground = solve_ground_state(pr);
  REQUIRE(ground.converged);
  const SolveReport rep = solve_nodal(pr);
  REQUIRE(rep.converged);
  CHECK(rep.sign_class == SignClass::nodal);
  const double scale = tolerance_scale(pr, rep.solution);
  CHECK(rep.residual_inf <= 1e-8 * scale);
  CHECK(std::abs(rep.defect_pos) <= 1e-8 * scale);
  CHECK(std::abs(rep.defect_neg) <= 1e-8 * scale);
  CHECK(rep.energy >= 2.0 * ground.energy - 1e-6);
}

TEST_CASE("sign-split projection lands in the constraint set") {
  const Mesh m = build_interval_mesh(1.0, 64);
  const DoublePhaseProblem pr = test_problem(m);
  Field y(m);
  for (int i = 0; i < m.n_vertices(); ++i)
    y.values[i] = std::sin(2.0 * M_PI * m.vertices[i][0]);
  for (int b : m.boundary_nodes) y.values[b] = 0.0;
  const Field yp = positive_part(y), yn = negative_part(y);
  const FiberingResult fp = project_to_nehari(pr, yp);
  const FiberingResult fn = project_to_nehari(pr, yn);
  Field u(m);
  for (int i = 0; i < m.n_vertices(); ++i)
    u.values[i] = fp.t_u * yp.values[i] - fn.t_u * yn.values[i];
  const double scale = tolerance_scale(pr, u);
  CHECK(std::abs(nehari_defect(pr, positive_part(u))) <= 1e-10 * scale);
  CHECK(std::abs(nehari_defect(pr, scaled(negative_part(u), -1.0))) <= 1e-10 * scale);
  CHECK(sign_classification(u) == SignClass::nodal);
}

TEST_CASE("solver options are validated") {
  const Mesh m = build_interval_mesh(1.0, 16);
  const DoublePhaseProblem pr = test_problem(m);
  SolveOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(solve_ground_state(pr, bad), std::invalid_argument);
  bad = SolveOptions{};
  bad.max_iters = 0;
  CHECK_THROWS_AS(solve_nodal(pr, bad), std::invalid_argument);
  SolveOptions user;
  user.initial = InitialGuess::user;
  const Mesh other = build_interval_mesh(1.0, 16);
  user.user_field = Field(other);
  CHECK_THROWS_AS(solve_ground_state(pr, user), std::invalid_argument);
}

TEST_CASE("non-convergence is reported, not thrown") {
  const Mesh m = build_interval_mesh(1.0, 32);
  const DoublePhaseProblem pr = test_problem(m);
  SolveOptions opts;
  opts.max_iters = 1;
  opts.tol = 1e-15;
  opts.restarts = 0;
  const SolveReport rep = solve_ground_state(pr, opts);
  CHECK_FALSE(rep.converged);
  CHECK_FALSE(rep.message.empty());
  CHECK(rep.solution.mesh == &m);  // partial data still present
}

TEST_CASE("interval alignment moves a node onto the zero crossing") {
  const Mesh m = build_interval_mesh(1.0, 10);
  Field u(m);
  for (int i = 0; i < m.n_vertices(); ++i) u.values[i] = 0.37 - m.vertices[i][0];
  for (int b : m.boundary_nodes) u.values[b] = 0.0;
  const auto nodes = aligned_interval_nodes(m, u);
  REQUIRE(nodes.size() == static_cast<size_t>(m.n_vertices()));
  bool found = false;
  for (size_t i = 1; i < nodes.size(); ++i) {
    CHECK(nodes[i] > nodes[i - 1]);  // still strictly increasing
    if (std::abs(nodes[i] - 0.37) < 1e-12) found = true;
  }
  CHECK(found);
  const Mesh aligned = build_interval_mesh(nodes);
  CHECK(aligned.n_vertices() == m.n_vertices());

  Field pos(m);
  for (int i = 0; i < m.n_vertices(); ++i)
    if (!m.is_boundary[i]) pos.values[i] = 1.0;
  CHECK_THROWS_AS(aligned_interval_nodes(m, pos), std::invalid_argument);
}
