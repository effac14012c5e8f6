#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "jacobi/ball.hpp"
#include "jacobi/errors.hpp"
#include "jacobi/geometry.hpp"
#include "jacobi/perturbation.hpp"
#include "jacobi/potential.hpp"
#include "jacobi/solver.hpp"

namespace py = pybind11;
using namespace jacobi;

namespace {

CurvatureNorm norm_from_token(const std::string& token) {
  if (token == "oracle") return CurvatureNorm::MetricTrace;
  if (token == "paper") return CurvatureNorm::LaplacianForm;
  if (token == "flat-trace") return CurvatureNorm::FlatTrace;
  throw ConfigError("unknown normalization '" + token + "' (expected oracle, paper or flat-trace)");
}

// Owns the parsed system plus the source strings for repr.
struct PySystem {
  SystemSpec spec;
  std::string potential_src;
  std::string perturbation_src;
};

PySystem make_system(int n, double energy, const std::string& potential,
                     const std::string& perturbation, double lambda) {
  PySystem s;
  s.spec.n = n;
  s.spec.energy = energy;
  s.spec.potential = make_expr_potential(potential, n);
  if (!perturbation.empty()) s.spec.perturbation = make_expr_potential(perturbation, n);
  s.spec.lambda = lambda;
  s.spec.validate();
  s.potential_src = potential;
  s.perturbation_src = perturbation;
  return s;
}

// Grid solution plus its interpolant, so values can be queried from python.
struct PyGrid {
  GridSolution sol;
  std::shared_ptr<const PotentialField> field;
};

const char* kind_name(CriticalKind k) {
  switch (k) {
    case CriticalKind::Minimum: return "minimum";
    case CriticalKind::Maximum: return "maximum";
    case CriticalKind::Saddle: return "saddle";
    default: return "degenerate";
  }
}

BallSpec make_ball(const std::vector<double>& center, double radius) {
  BallSpec b;
  b.center = center;
  b.radius = radius;
  return b;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Curvature, geodesic-ball volumes and entropy of mechanical systems";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<MathDomainError>(m, "MathDomainError", PyExc_ArithmeticError);
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);

  py::class_<PySystem>(m, "System")
      .def(py::init(&make_system), py::arg("n"), py::arg("energy"), py::arg("potential"),
           py::arg("perturbation") = std::string(), py::arg("lambda_") = 0.0,
           "Mechanical system with an expression potential in variables x1..xn")
      .def_property_readonly("n", [](const PySystem& s) { return s.spec.n; })
      .def_property_readonly("energy", [](const PySystem& s) { return s.spec.energy; })
      .def_property_readonly("potential", [](const PySystem& s) { return s.potential_src; })
      .def_property_readonly("perturbation", [](const PySystem& s) { return s.perturbation_src; })
      .def_property_readonly("lambda_", [](const PySystem& s) { return s.spec.lambda; })
      .def("__repr__", [](const PySystem& s) {
        return "System(n=" + std::to_string(s.spec.n) + ", energy=" +
               std::to_string(s.spec.energy) + ", potential='" + s.potential_src + "')";
      });

  py::class_<PyGrid>(m, "Grid")
      .def_property_readonly("n", [](const PyGrid& g) { return g.sol.n; })
      .def_property_readonly("spacing", [](const PyGrid& g) { return g.sol.h; })
      .def_property_readonly("radius", [](const PyGrid& g) { return g.sol.radius; })
      .def_property_readonly("side", [](const PyGrid& g) { return g.sol.side(); })
      .def_property_readonly("mass", [](const PyGrid& g) { return g.sol.mass_used; })
      .def_property_readonly("iterations", [](const PyGrid& g) { return g.sol.iterations; })
      .def_property_readonly("residual", [](const PyGrid& g) { return g.sol.residual_norm; })
      .def_property_readonly("values", [](const PyGrid& g) { return g.sol.values; })
      .def("value", [](const PyGrid& g, const std::vector<double>& x) {
        if (static_cast<int>(x.size()) != g.sol.n) throw ConfigError("point dimension mismatch");
        return g.field->value(x.data());
      }, py::arg("point"), "Interpolated solution value inside the solved ball");

  m.def("critical_points",
        [](const PySystem& s, const std::vector<std::vector<double>>& seeds) {
          CriticalPointSearch res = find_critical_points(*s.spec.potential, seeds);
          py::list out;
          for (const CriticalPoint& p : res.points) {
            py::dict d;
            d["location"] = p.location;
            d["kind"] = kind_name(p.kind);
            d["hessian_eigenvalues"] = p.hess_eigenvalues;
            d["value"] = p.value;
            d["gradient_norm"] = p.grad_norm;
            out.append(d);
          }
          return out;
        },
        py::arg("system"), py::arg("seeds"),
        "Newton search for critical points of the potential, one run per seed");

  m.def("curvature_readings",
        [](const PySystem& s, const std::vector<double>& x) {
          ScalarReadings r = ricci_scalar_readings(s.spec, x);
          py::dict d;
          d["flat"] = r.flat_trace;
          d["paper"] = r.laplacian_form;
          d["oracle"] = r.metric;
          return d;
        },
        py::arg("system"), py::arg("point"),
        "All three curvature-scalar readings at a point");

  m.def("scalar_curvature",
        [](const PySystem& s, const std::vector<double>& x, const std::string& normalization) {
          return scalar_for_norm(ricci_scalar_readings(s.spec, x), norm_from_token(normalization));
        },
        py::arg("system"), py::arg("point"), py::arg("normalization") = "oracle");

  m.def("ricci",
        [](const PySystem& s, const std::vector<double>& x) { return ricci_tensor(s.spec, x); },
        py::arg("system"), py::arg("point"),
        "Ricci tensor entries, row-major n*n");

  m.def("ball_volume",
        [](const PySystem& s, const std::vector<double>& center, double radius, long long samples,
           std::uint64_t seed) {
          McEstimate e = ball_volume_numeric(s.spec, make_ball(center, radius), samples, seed);
          py::dict d;
          d["value"] = e.value;
          d["std_error"] = e.std_error;
          d["completed"] = e.tally.completed;
          d["aborted"] = e.tally.aborted;
          return d;
        },
        py::arg("system"), py::arg("center"), py::arg("radius"), py::arg("samples") = 100000,
        py::arg("seed") = 1, "Monte-Carlo geodesic-ball volume");

  m.def("entropy_report",
        [](const PySystem& s, const std::vector<double>& center, double radius, long long samples,
           std::uint64_t seed, const std::string& normalization, double k_b) {
          BallReport r = ball_report(s.spec, make_ball(center, radius), samples, seed,
                                     norm_from_token(normalization), k_b);
          py::dict d;
          d["n"] = r.n;
          d["energy"] = r.energy;
          d["radius"] = r.radius;
          d["scalar"] = r.r_p;
          d["scalar_source"] = r.r_p_source;
          d["vol_expansion"] = r.vol_expansion;
          d["vol_numeric"] = r.vol_numeric;
          d["vol_std_error"] = r.vol_std_error;
          d["entropy_expansion"] = r.entropy_expansion;
          d["entropy_numeric"] = r.entropy_numeric;
          d["samples"] = r.samples;
          d["seed"] = r.seed;
          return d;
        },
        py::arg("system"), py::arg("center"), py::arg("radius"), py::arg("samples") = 100000,
        py::arg("seed") = 1, py::arg("normalization") = "oracle", py::arg("k_b") = 1.0,
        "Series and Monte-Carlo volume with the matching entropies");

  m.def("effective_mass",
        [](const PySystem& s, const std::vector<double>& P) { return effective_mass(s.spec, P); },
        py::arg("system"), py::arg("point"));

  m.def("special_energy",
        [](const PySystem& s, const std::vector<double>& P) { return special_energy(s.spec, P); },
        py::arg("system"), py::arg("point"));

  m.def("perturbation_report",
        [](const PySystem& s, const std::vector<double>& center, double radius,
           const std::string& normalization, double k_b) {
          PerturbationReport r =
              perturbation_report(s.spec, make_ball(center, radius), norm_from_token(normalization),
                                  k_b);
          py::dict d;
          d["lambda"] = r.lambda;
          d["normalization"] = r.normalization;
          d["scalar"] = r.r_p;
          d["sigma_at_center"] = r.sigma_at_center;
          d["b_trace"] = r.b_trace;
          d["b_trace_exact"] = r.b_trace_exact;
          d["delta_scalar"] = r.delta_r;
          d["delta_entropy_exact"] = r.delta_s_exact;
          d["delta_entropy_linear"] = r.delta_s_linear;
          d["mass"] = r.mass;
          d["special_energy"] = r.special_energy_value;
          d["residual_coefficient"] = r.residual_coefficient;
          d["residual_at_center"] = r.invariance_residual_at_center;
          return d;
        },
        py::arg("system"), py::arg("center"), py::arg("radius"),
        py::arg("normalization") = "oracle", py::arg("k_b") = 1.0,
        "First-order effect of the perturbation on curvature and entropy");

  m.def("solve_invariance",
        [](const PySystem& s, const std::vector<double>& center, double radius,
           const std::string& boundary, double h, double tol) {
          BoundaryData data;
          if (boundary.empty()) {
            data = constant_boundary(0.0);
          } else {
            auto f = make_expr_potential(boundary, s.spec.n);
            data = [f](const std::vector<double>& x) { return f->value(x.data()); };
          }
          SolveOptions opt;
          opt.h = h;
          opt.tol = tol;
          PyGrid g;
          g.sol = solve_invariance(s.spec, center, radius, data, opt);
          g.field = make_grid_potential(g.sol);
          return g;
        },
        py::arg("system"), py::arg("center"), py::arg("radius"), py::arg("boundary") = std::string(),
        py::arg("h") = 0.0, py::arg("tol") = 1e-8,
        "Solve the invariance equation with Dirichlet data on the coordinate sphere");

  m.def("verify_invariance",
        [](const PySystem& s, const PyGrid& grid, const std::vector<double>& center,
           double ball_radius, const std::vector<double>& lambdas, long long sample_pairs,
           std::uint64_t seed) {
          InvarianceCheck c = verify_entropy_invariance(s.spec, make_ball(center, ball_radius),
                                                        grid.sol, lambdas, sample_pairs, seed);
          py::dict d;
          d["slope"] = c.slope;
          d["vol_base"] = c.vol_base;
          py::list rows;
          for (const InvarianceCheckRow& r : c.rows) {
            py::dict row;
            row["lambda"] = r.lambda;
            row["delta_entropy"] = r.delta_entropy;
            row["std_error"] = r.std_error;
            rows.append(row);
          }
          d["rows"] = rows;
          d["aborted_pairs"] = c.tally.aborted;
          return d;
        },
        py::arg("system"), py::arg("grid"), py::arg("center"), py::arg("ball_radius"),
        py::arg("lambdas"), py::arg("sample_pairs") = 2000, py::arg("seed") = 1,
        "Switch the solved grid on as the perturbation and fit the entropy-shift order");
}
