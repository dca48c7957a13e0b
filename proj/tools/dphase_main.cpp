// Command-line driver: load a problem config, run a subcommand, emit JSON
// reports and CSV plot data. Exit codes: 0 success, 2 validation failure,
// 3 non-convergence (partial artifacts written and flagged).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "dphase/io.hpp"

namespace fs = std::filesystem;
using namespace dphase;

namespace {

json read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path, "cannot open config file");
  json cfg;
  try {
    is >> cfg;
  } catch (const json::exception& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return cfg;
}

int domain_dimension(const json& cfg) {
  return detail::require<std::string>(detail::require<json>(cfg, "domain"), "kind") == "interval"
             ? 1
             : 2;
}

// Solve-type subcommands refuse configs outside the exponent windows.
void validate_or_die(const ProblemSetup& setup) {
  const auto& re = setup.problem.reaction;
  const ValidationReport rep = validate_exponents(setup.problem.p, setup.problem.q, re.r, re.tau,
                                                  setup.mesh->dim);
  if (!rep.all_pass()) {
    std::cerr << "config validation failed (requires 1 < q < p, p < r < p*, tau window):\n"
              << rep.summary();
    std::exit(2);
  }
}

std::vector<double> grid_from_config(const json& cfg, const std::string& key, double lo, double hi,
                                     int n) {
  if (cfg.contains(key)) {
    const json g = cfg.at(key);
    lo = detail::optional<double>(g, "tmin", lo);
    hi = detail::optional<double>(g, "tmax", hi);
    n = detail::optional<int>(g, "n", n);
  }
  return geometric_grid(lo, hi, n);
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<unsigned long long> seed;
  std::optional<double> tol;
  std::optional<int> max_iters;
  std::optional<int> restarts;

  void attach(CLI::App* cmd) {
    cmd->add_option("config", config_path, "problem config (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "random seed (overrides config)");
    cmd->add_option("--tol", tol, "residual tolerance (overrides config)");
    cmd->add_option("--max-iters", max_iters, "iteration cap (overrides config)");
    cmd->add_option("--restarts", restarts, "restart count (overrides config)");
  }

  SolveOptions options(const json& cfg) const {
    SolveOptions o = solve_options_from_config(cfg);
    if (seed) o.seed = *seed;
    if (tol) o.tol = *tol;
    if (max_iters) o.max_iters = *max_iters;
    if (restarts) o.restarts = *restarts;
    return o;
  }
};

json resolved_with_options(const ProblemSetup& setup, const SolveOptions& o) {
  json cfg = setup.resolved;
  cfg["solve"] = {{"tol", o.tol},
                  {"max_iters", o.max_iters},
                  {"restarts", o.restarts},
                  {"seed", o.seed},
                  {"initial", o.initial == InitialGuess::eigenfunction ? "eigenfunction"
                              : o.initial == InitialGuess::bump        ? "bump"
                                                                       : "random"}};
  return cfg;
}

int run_solve(const CommonFlags& flags, bool nodal) {
  const json cfg = read_config(flags.config_path);
  ProblemSetup setup = load_problem(cfg);
  validate_or_die(setup);
  const SolveOptions opts = flags.options(cfg);
  fs::create_directories(flags.out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  const SolveReport rep = nodal ? solve_nodal(setup.problem, opts)
                                : solve_ground_state(setup.problem, opts);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_json(report_to_json(rep, resolved_with_options(setup, opts)),
             flags.out_dir + "/report.json");
  write_field_csv(rep.solution, flags.out_dir + "/solution.csv");
  std::cout << (nodal ? "nodal" : "ground") << " solve: converged=" << rep.converged
            << " energy=" << rep.energy << " residual_inf=" << rep.residual_inf
            << " sign=" << to_string(rep.sign_class) << " iterations=" << rep.iterations
            << " wall_time_s=" << wall << "\n";
  return rep.converged ? 0 : 3;
}

int run_eigen(const CommonFlags& flags) {
  const json cfg = read_config(flags.config_path);
  const double p = detail::require<double>(cfg, "p");
  if (!(p > 1.0)) {
    std::cerr << "config validation failed: p must exceed 1\n";
    return 2;
  }
  ProblemSetup setup = load_problem(cfg);
  fs::create_directories(flags.out_dir);
  EigenOptions eo;
  if (flags.max_iters) eo.max_iters = *flags.max_iters;
  const EigenResult res = first_eigenpair(*setup.mesh, p, eo);
  json j = {{"p", p},
            {"lambda1", res.lambda1},
            {"iterations", res.iterations},
            {"converged", res.converged},
            {"config", setup.resolved}};
  write_json(j, flags.out_dir + "/eigen.json");
  write_field_csv(res.u1, flags.out_dir + "/u1.csv");
  std::cout << "lambda1=" << res.lambda1 << " iterations=" << res.iterations << "\n";
  return res.converged ? 0 : 3;
}

int run_lemma1(const CommonFlags& flags) {
  const json cfg = read_config(flags.config_path);
  ProblemSetup setup = load_problem(cfg);
  fs::create_directories(flags.out_dir);
  const EigenResult res = first_eigenpair(*setup.mesh, setup.problem.p);
  if (!res.converged) return 3;
  const auto grid = grid_from_config(cfg, "lemma1", 10.0, 1e4, 13);
  const Lemma1Diagnostic diag = lemma1_diagnostic(setup.problem, res.u1, res.lambda1, grid);
  write_lemma1_csv(diag, flags.out_dir + "/lemma1.csv");
  json j = {{"lambda1", res.lambda1},
            {"fitted_slope", diag.fitted_slope},
            {"expected_slope", -(setup.problem.p - setup.problem.q)},
            {"config", setup.resolved}};
  write_json(j, flags.out_dir + "/lemma1.json");
  std::cout << "lambda1=" << res.lambda1 << " fitted_slope=" << diag.fitted_slope << "\n";
  return 0;
}

int run_fibering(const CommonFlags& flags) {
  const json cfg = read_config(flags.config_path);
  ProblemSetup setup = load_problem(cfg);
  validate_or_die(setup);
  fs::create_directories(flags.out_dir);
  const Field u = bump_field(*setup.mesh);
  const auto grid = grid_from_config(cfg, "fibering", 1e-4, 1e4, 65);
  const auto rows = fibering_curve(setup.problem, u, grid);
  write_fibering_csv(rows, flags.out_dir + "/fibering.csv");
  const FiberingResult proj = project_to_nehari(setup.problem, u);
  json j = {{"t_u", proj.t_u},
            {"defect_at_root", proj.defect_at_root},
            {"iterations", proj.iterations},
            {"config", setup.resolved}};
  write_json(j, flags.out_dir + "/fibering.json");
  std::cout << "t_u=" << proj.t_u << "\n";
  return 0;
}

int run_check_hypotheses(const CommonFlags& flags, std::optional<double> ar_theta) {
  const json cfg = read_config(flags.config_path);
  ProblemSetup setup = load_problem(cfg);
  fs::create_directories(flags.out_dir);
  const auto& pr = setup.problem;
  const ValidationReport exps =
      validate_exponents(pr.p, pr.q, pr.reaction.r, pr.reaction.tau, setup.mesh->dim);
  const auto xs = default_x_grid();
  const auto zs = element_centroids(*setup.mesh);
  const ValidationReport hf = check_hypotheses_f(pr.reaction, pr.p, pr.q, xs, zs);

  json j;
  auto checks_json = [](const ValidationReport& rep) {
    json arr = json::array();
    for (const auto& c : rep.checks)
      arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    return arr;
  };
  j["exponents"] = checks_json(exps);
  j["hypotheses_f"] = checks_json(hf);
  j["note"] = "sampled evidence, not a proof of the a.e.-uniform statements";
  if (ar_theta) {
    std::vector<double> big = xs;
    for (int k = 2; k <= 8; ++k) {
      big.push_back(std::pow(10.0, k));
      big.push_back(-std::pow(10.0, k));
    }
    const ArReport ar = check_ar_condition(pr.reaction, *ar_theta, big, {zs.front()});
    j["ambrosetti_rabinowitz"] = {{"theta", ar.theta},
                                  {"holds", ar.holds},
                                  {"witness_x", ar.witness_x},
                                  {"detail", ar.detail}};
  }
  j["config"] = setup.resolved;
  write_json(j, flags.out_dir + "/hypotheses.json");
  std::cout << exps.summary() << hf.summary();
  if (ar_theta)
    std::cout << "AR(theta=" << *ar_theta << "): " << (j["ambrosetti_rabinowitz"]["holds"].get<bool>()
                                                           ? "holds"
                                                           : "fails, witness reported")
              << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"double-phase Dirichlet problem solver"};
  app.require_subcommand(1);

  CommonFlags ground, nodal, eigen, lemma1, fibering, hypo;
  std::optional<double> ar_theta;

  ground.attach(app.add_subcommand("solve-ground", "compute the ground state over the Nehari manifold"));
  nodal.attach(app.add_subcommand("solve-nodal", "compute a sign-changing solution"));
  eigen.attach(app.add_subcommand("eigen", "first p-Laplacian eigenpair"));
  lemma1.attach(app.add_subcommand("lemma1", "theta-quotient scaling diagnostic"));
  fibering.attach(app.add_subcommand("fibering", "fibering map curve and Nehari scaling"));
  auto* hypo_cmd = app.add_subcommand("check-hypotheses", "sampled hypothesis verification");
  hypo.attach(hypo_cmd);
  hypo_cmd->add_option("--ar-theta", ar_theta, "also test the Ambrosetti-Rabinowitz condition");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("solve-ground")) return run_solve(ground, false);
    if (app.got_subcommand("solve-nodal")) return run_solve(nodal, true);
    if (app.got_subcommand("eigen")) return run_eigen(eigen);
    if (app.got_subcommand("lemma1")) return run_lemma1(lemma1);
    if (app.got_subcommand("fibering")) return run_fibering(fibering);
    if (app.got_subcommand("check-hypotheses")) return run_check_hypotheses(hypo, ar_theta);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
