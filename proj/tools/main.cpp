// Command-line front end: loads a run configuration, applies flag overrides,
// executes one analysis pipeline and writes its reports.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jacobi/ball.hpp"
#include "jacobi/config.hpp"
#include "jacobi/errors.hpp"
#include "jacobi/perturbation.hpp"
#include "jacobi/potential.hpp"
#include "jacobi/report.hpp"
#include "jacobi/solver.hpp"

namespace {

using namespace jacobi;

int log_level() {
  static int level = [] {
    const char* v = std::getenv("JACOBI_LOG");
    if (!v) return 0;
    std::string s(v);
    if (s.empty() || s == "0" || s == "off") return 0;
    if (s == "debug" || s == "2") return 2;
    return 1;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[jacobiball] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[jacobiball] " << msg << "\n";
}

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<long long> samples;
  std::optional<std::string> out;
  std::optional<std::string> normalization;
};

RunConfig load_run(const Overrides& ov) {
  RunConfig cfg = load_config(ov.config_path);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.samples) cfg.samples = *ov.samples;
  if (ov.out) cfg.out_dir = *ov.out;
  if (ov.normalization) cfg.normalization = *ov.normalization;
  validate_config(cfg);
  log_debug("effective configuration:\n" + serialize_config(cfg));
  return cfg;
}

std::string out_path(const RunConfig& cfg, const char* name) {
  return cfg.out_dir + "/" + name;
}

// Ball center: explicit ball.center wins; otherwise Newton search from the
// configured seeds (origin when none). A degenerate critical point cannot
// anchor the expansion, so it is a hard error naming the offending eigenvalue.
std::vector<double> resolve_center(const RunConfig& cfg, const SystemSpec& spec) {
  if (!cfg.center.empty()) return cfg.center;
  std::vector<std::vector<double>> seeds = cfg.seeds;
  if (seeds.empty()) seeds.emplace_back(cfg.n, 0.0);
  CriticalPointSearch search = find_critical_points(*spec.potential, seeds);
  if (search.points.empty())
    throw NonConvergenceError(
        "critical-point search converged nowhere; set ball.center or improve search.seeds");
  for (const CriticalPoint& p : search.points)
    if (p.kind == CriticalKind::Minimum) {
      log_info("using critical point (minimum) at " + [&] {
        std::string s;
        for (double c : p.location) s += format_double(c) + " ";
        return s;
      }());
      return p.location;
    }
  const CriticalPoint& p = search.points.front();
  if (p.kind == CriticalKind::Degenerate) {
    double small = 0.0;
    for (double e : p.hess_eigenvalues)
      if (small == 0.0 || std::abs(e) < std::abs(small)) small = e;
    throw MathDomainError("critical point is degenerate: Hessian eigenvalue " +
                          format_double(small) + " is near zero");
  }
  return p.location;
}

BoundaryData boundary_from_config(const RunConfig& cfg) {
  if (cfg.boundary.empty()) return constant_boundary(0.0);
  std::shared_ptr<const PotentialField> f = make_expr_potential(cfg.boundary, cfg.n);
  return [f](const std::vector<double>& x) { return f->value(x.data()); };
}

int cmd_curvature(const RunConfig& cfg) {
  SystemSpec spec = system_from_config(cfg);
  std::vector<std::vector<double>> points = cfg.points;
  if (points.empty()) {
    if (!cfg.center.empty())
      points.push_back(cfg.center);
    else
      points.emplace_back(cfg.n, 0.0);
  }
  std::vector<CurvatureRow> rows;
  for (const std::vector<double>& x : points) rows.push_back({x, ricci_scalar_readings(spec, x)});
  write_text_atomic(out_path(cfg, "curvature.csv"), curvature_csv(cfg.n, cfg.energy, rows));
  std::string text = curvature_key_value(cfg.n, cfg.energy, rows);
  write_text_atomic(out_path(cfg, "curvature.txt"), text);
  log_info("wrote " + out_path(cfg, "curvature.csv"));
  std::cout << text;
  return 0;
}

int cmd_entropy(const RunConfig& cfg) {
  SystemSpec spec = system_from_config(cfg);
  std::vector<double> center = resolve_center(cfg, spec);
  BallSpec ball = ball_from_config(cfg, center);
  BallReport rep = ball_report(spec, ball, cfg.samples, cfg.seed, normalization_choice(cfg),
                               cfg.k_b);
  write_text_atomic(out_path(cfg, "entropy.csv"), ball_report_csv(rep));
  std::string text = ball_report_key_value(rep);
  write_text_atomic(out_path(cfg, "entropy.txt"), text);
  log_info("wrote " + out_path(cfg, "entropy.csv"));
  std::cout << text;
  return 0;
}

int cmd_perturb(const RunConfig& cfg) {
  if (cfg.perturbation.empty())
    throw ConfigError("the perturb command needs system.perturbation");
  SystemSpec spec = system_from_config(cfg);
  std::vector<double> center = resolve_center(cfg, spec);
  BallSpec ball = ball_from_config(cfg, center);
  PerturbationReport rep = perturbation_report(spec, ball, normalization_choice(cfg), cfg.k_b);
  write_text_atomic(out_path(cfg, "perturb.csv"), perturbation_report_csv(rep));
  std::string text = perturbation_report_key_value(rep);
  write_text_atomic(out_path(cfg, "perturb.txt"), text);
  log_info("wrote " + out_path(cfg, "perturb.csv"));
  std::cout << text;
  return 0;
}

GridSolution run_solve(const RunConfig& cfg, const SystemSpec& spec,
                       const std::vector<double>& center) {
  if (!(cfg.solver_radius > 0.0))
    throw ConfigError("solver.radius must be positive for this command");
  SolveOptions opt;
  opt.h = cfg.solver_h;
  opt.tol = cfg.solver_tol;
  log_info("solving on coordinate ball of radius " + format_double(cfg.solver_radius));
  return solve_invariance(spec, center, cfg.solver_radius, boundary_from_config(cfg), opt);
}

int cmd_solve(const RunConfig& cfg) {
  SystemSpec spec = system_from_config(cfg);
  std::vector<double> center = resolve_center(cfg, spec);
  GridSolution sol = run_solve(cfg, spec, center);
  write_text_atomic(out_path(cfg, "solution.csv"), grid_csv(sol));
  std::string text = grid_key_value(sol);
  write_text_atomic(out_path(cfg, "solution.txt"), text);
  write_grid_binary(out_path(cfg, "solution.grid"), sol);
  log_info("wrote " + out_path(cfg, "solution.csv"));
  std::cout << text;
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  SystemSpec spec = system_from_config(cfg);
  std::vector<double> center = resolve_center(cfg, spec);
  GridSolution sol = run_solve(cfg, spec, center);
  BallSpec ball = ball_from_config(cfg, center);
  InvarianceCheck chk =
      verify_entropy_invariance(spec, ball, sol, cfg.lambdas, cfg.sample_pairs, cfg.seed);
  if (chk.tally.aborted > 0)
    throw MathDomainError(
        std::to_string(chk.tally.aborted) +
        " sample pairs left the usable region (turning margin or solved grid); "
        "enlarge solver.radius or shrink ball.radius");
  write_text_atomic(out_path(cfg, "verify.csv"), invariance_check_csv(chk));
  std::string text = invariance_check_key_value(chk);
  write_text_atomic(out_path(cfg, "verify.txt"), text);
  log_info("wrote " + out_path(cfg, "verify.csv"));
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic-ball curvature, entropy and invariance toolkit"};
  app.require_subcommand(1);
  Overrides ov;

  auto add_common = [&ov](CLI::App* sub) {
    sub->add_option("--config", ov.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", ov.seed, "override mc.seed");
    sub->add_option("--samples", ov.samples, "override mc.samples");
    sub->add_option("--out", ov.out, "override output.dir");
    sub->add_option("--normalization", ov.normalization,
                    "curvature normalization: paper or oracle")
        ->check(CLI::IsMember({"paper", "oracle"}));
  };

  CLI::App* curvature = app.add_subcommand("curvature", "curvature scalars at chosen points");
  CLI::App* entropy = app.add_subcommand("entropy", "geodesic-ball volume and entropy");
  CLI::App* perturb = app.add_subcommand("perturb", "first-order shifts under the perturbation");
  CLI::App* solve = app.add_subcommand("solve", "solve the invariance equation on a ball");
  CLI::App* verify = app.add_subcommand("verify", "solve, then check the entropy shift order");
  for (CLI::App* sub : {curvature, entropy, perturb, solve, verify}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // bad invocation is a configuration error
  }

  try {
    jacobi::RunConfig cfg = load_run(ov);
    if (curvature->parsed()) return cmd_curvature(cfg);
    if (entropy->parsed()) return cmd_entropy(cfg);
    if (perturb->parsed()) return cmd_perturb(cfg);
    if (solve->parsed()) return cmd_solve(cfg);
    if (verify->parsed()) return cmd_verify(cfg);
    return 1;
  } catch (const jacobi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
