#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "jacobi/ball.hpp"
#include "jacobi/system.hpp"

namespace jacobi {

// Dirichlet data on the coordinate sphere bounding the solve domain.
using BoundaryData = std::function<double(const std::vector<double>&)>;

BoundaryData constant_boundary(double value);

struct SolveOptions {
  double h = 0.0;       // grid spacing; 0 selects radius/32
  double tol = 1e-8;    // max-norm residual target for the discrete equation
  long max_iterations = 50000;
  const std::vector<double>* initial = nullptr;  // lattice-sized starting iterate
};

// Discrete solution of the invariance equation on a regular lattice covering
// the coordinate ball (not the geodesic ball; radii here are coordinate
// lengths). Nodes outside the ball hold NaN. The operator is the frozen-
// coefficient form at the center: flat Laplacian / (2(E-Vc(P))) plus the
// signed zeroth-order coefficient whose magnitude is the effective mass.
struct GridSolution {
  int n = 0;
  std::vector<double> center;
  double radius = 0.0;
  double h = 0.0;
  int m = 0;  // per-axis index range -m..m
  std::vector<double> values;  // dense lattice, (2m+1)^n, NaN off the ball
  double mass_used = 0.0;
  double coefficient = 0.0;
  double residual_norm = 0.0;
  long iterations = 0;

  long side() const { return 2L * m + 1; }
  long lattice_size() const;
  long lattice_index(const std::vector<int>& idx) const;  // idx entries in -m..m
  std::vector<double> node_point(const std::vector<int>& idx) const;
  bool interior(const std::vector<int>& idx) const;
};

GridSolution solve_invariance(const SystemSpec& spec, const std::vector<double>& center,
                              double radius, const BoundaryData& boundary,
                              const SolveOptions& opt = {});

// k smallest-magnitude eigenvalues of the discrete operator
// Laplacian/(2(E-Vc(P))) + (n-2)/(4(n-1)) * r_p with Dirichlet boundary,
// ascending by magnitude. r_p is taken in the requested normalization.
std::vector<double> operator_spectrum(const SystemSpec& spec, const std::vector<double>& center,
                                      double radius, double h, int k,
                                      CurvatureNorm norm = CurvatureNorm::LaplacianForm);

// Multilinear interpolant of a grid solution, exposed as a potential field so
// it can serve as the perturbation of a SystemSpec. Queries are accepted only
// on cells whose corners are all solved nodes; outside that region the field
// throws a math-domain error.
std::shared_ptr<const PotentialField> make_grid_potential(const GridSolution& sol);

struct InvarianceCheckRow {
  double lambda = 0.0;
  double delta_entropy = 0.0;
  double std_error = 0.0;
};

struct InvarianceCheck {
  std::vector<InvarianceCheckRow> rows;
  double slope = 0.0;  // log-log fit of |delta_entropy| against lambda; NaN if degenerate
  double vol_base = 0.0;
  SampleTally tally;
};

// Closes the loop: interpolates the grid solution, switches it on as the
// perturbation at each coupling value, and measures the entropy difference by
// paired Monte-Carlo volume runs sharing directions and step sequences.
InvarianceCheck verify_entropy_invariance(const SystemSpec& spec, const BallSpec& ball,
                                          const GridSolution& sol,
                                          const std::vector<double>& lambdas, long long sample_pairs,
                                          std::uint64_t seed);

}  // namespace jacobi
