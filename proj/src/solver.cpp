#include "jacobi/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jacobi/perturbation.hpp"
#include "jacobi/rng.hpp"

namespace jacobi {

BoundaryData constant_boundary(double value) {
  return [value](const std::vector<double>&) { return value; };
}

long GridSolution::lattice_size() const {
  long s = 1;
  for (int d = 0; d < n; ++d) s *= side();
  return s;
}

long GridSolution::lattice_index(const std::vector<int>& idx) const {
  long lin = 0;
  for (int d = 0; d < n; ++d) lin = lin * side() + (idx[d] + m);
  return lin;
}

std::vector<double> GridSolution::node_point(const std::vector<int>& idx) const {
  std::vector<double> x(n);
  for (int d = 0; d < n; ++d) x[d] = center[d] + h * idx[d];
  return x;
}

bool GridSolution::interior(const std::vector<int>& idx) const {
  double r2 = 0.0;
  for (int d = 0; d < n; ++d) {
    double t = h * idx[d];
    r2 += t * t;
  }
  return r2 < radius * radius * (1.0 - 1e-14);
}

namespace {

// Lattice classification and assembly of the shortened-arm stencil. The
// second difference along one axis with arm fractions tp, tm annihilates
// constants exactly and is second-order accurate on smooth solutions.
struct Discretization {
  GridSolution grid;       // geometry fields filled; values empty until solved
  long interior_count = 0;
  std::vector<long> unknown_of_lattice;  // lattice -> unknown index or -1
  std::vector<std::vector<int>> idx_of_unknown;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;

  // distance fraction (0,1] from interior node idx to the sphere along +/-e_d
  double arm_fraction(const std::vector<int>& idx, int d, int sgn) const {
    double p = 0.0, q2 = 0.0;
    for (int e = 0; e < grid.n; ++e) {
      double t = grid.h * idx[e];
      q2 += t * t;
      if (e == d) p = t * sgn;
    }
    double disc = p * p + grid.radius * grid.radius - q2;
    double t = -p + std::sqrt(std::max(disc, 0.0));
    double theta = t / grid.h;
    return std::clamp(theta, 1e-8, 1.0);
  }

  std::vector<double> sphere_point(const std::vector<int>& idx, int d, int sgn,
                                   double theta) const {
    std::vector<double> x = grid.node_point(idx);
    x[d] += sgn * theta * grid.h;
    return x;
  }
};

Discretization discretize(const SystemSpec& spec, const std::vector<double>& center, double radius,
                          double h, double coefficient, const BoundaryData& boundary) {
  SystemSpec base = spec.unperturbed();
  base.validate();
  const int n = base.n;
  if (static_cast<int>(center.size()) != n) throw ConfigError("solver center dimension mismatch");
  if (!(radius > 0.0)) throw ConfigError("solver radius must be positive");
  if (!(h > 0.0)) throw ConfigError("grid spacing must be positive");

  Discretization dz;
  GridSolution& g = dz.grid;
  g.n = n;
  g.center = center;
  g.radius = radius;
  g.h = h;
  g.m = static_cast<int>(std::floor(radius / h));
  if (g.m < 1) throw ConfigError("grid spacing leaves fewer than 3 nodes per axis; reduce h");

  const long lat = g.lattice_size();
  dz.unknown_of_lattice.assign(lat, -1);
  std::vector<int> idx(n, -g.m);
  // row-major sweep over the lattice
  for (long lin = 0; lin < lat; ++lin) {
    if (g.interior(idx)) {
      dz.unknown_of_lattice[lin] = dz.interior_count++;
      dz.idx_of_unknown.push_back(idx);
    }
    for (int d = n - 1; d >= 0; --d) {
      if (++idx[d] <= g.m) break;
      idx[d] = -g.m;
    }
  }
  if (dz.interior_count == 0) throw ConfigError("no interior grid nodes; reduce h");

  const double w = base.w_checked(center.data());
  const double inv2w = 1.0 / (2.0 * w);
  const double invh2 = 1.0 / (h * h);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(dz.interior_count * (2 * n + 1));
  dz.b = Eigen::VectorXd::Zero(dz.interior_count);

  for (long u = 0; u < dz.interior_count; ++u) {
    const std::vector<int>& I = dz.idx_of_unknown[u];
    double diag = coefficient;
    for (int d = 0; d < n; ++d) {
      double theta[2];
      long nb_unknown[2];
      for (int s = 0; s < 2; ++s) {
        int sgn = s == 0 ? 1 : -1;
        std::vector<int> J = I;
        J[d] += sgn;
        bool inside = std::abs(J[d]) <= g.m && g.interior(J);
        if (inside) {
          theta[s] = 1.0;
          nb_unknown[s] = dz.unknown_of_lattice[g.lattice_index(J)];
        } else {
          theta[s] = dz.arm_fraction(I, d, sgn);
          nb_unknown[s] = -1;
        }
      }
      double tp = theta[0], tm = theta[1];
      double cp = 2.0 / (tp * (tp + tm)) * invh2 * inv2w;
      double cm = 2.0 / (tm * (tp + tm)) * invh2 * inv2w;
      diag += -2.0 / (tp * tm) * invh2 * inv2w;
      for (int s = 0; s < 2; ++s) {
        double c = s == 0 ? cp : cm;
        if (nb_unknown[s] >= 0) {
          trip.emplace_back(u, nb_unknown[s], c);
        } else {
          int sgn = s == 0 ? 1 : -1;
          std::vector<double> bp = dz.sphere_point(I, d, sgn, theta[s]);
          dz.b(u) -= c * boundary(bp);
        }
      }
    }
    trip.emplace_back(u, u, diag);
  }
  dz.A.resize(dz.interior_count, dz.interior_count);
  dz.A.setFromTriplets(trip.begin(), trip.end());
  dz.A.makeCompressed();
  return dz;
}

double max_norm_residual(const Discretization& dz, const Eigen::VectorXd& u) {
  Eigen::VectorXd r = dz.A * u - dz.b;
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

// Smallest-magnitude Ritz values of A via inverse subspace iteration. Uses a
// direct factorization; intended for moderate grids (diagnostics and 2-D).
std::vector<double> smallest_magnitude_eigs(const Eigen::SparseMatrix<double>& A, int k) {
  const long N = A.rows();
  if (k < 1) throw ConfigError("eigenvalue count must be >= 1");
  k = static_cast<int>(std::min<long>(k, N));
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    // exactly singular to working precision
    std::vector<double> out(k, 0.0);
    return out;
  }

  Rng rng(0x5eedba11u);
  Eigen::MatrixXd Q(N, k);
  for (long i = 0; i < N; ++i)
    for (int j = 0; j < k; ++j) Q(i, j) = rng.normal();
  auto orthonormalize = [&](Eigen::MatrixXd& M) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    M = qr.householderQ() * Eigen::MatrixXd::Identity(N, k);
  };
  orthonormalize(Q);

  std::vector<double> prev(k, std::numeric_limits<double>::infinity());
  std::vector<double> vals(k, 0.0);
  for (int it = 0; it < 400; ++it) {
    Eigen::MatrixXd Z = lu.solve(Q);
    orthonormalize(Z);
    Q = Z;
    Eigen::MatrixXd C = Q.transpose() * (A * Q);
    Eigen::EigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success) throw NonConvergenceError("eigenvalue iteration failed");
    std::vector<double> cur(k);
    for (int j = 0; j < k; ++j) cur[j] = es.eigenvalues()(j).real();
    std::sort(cur.begin(), cur.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    double drift = 0.0;
    for (int j = 0; j < k; ++j)
      drift = std::max(drift, std::abs(cur[j] - prev[j]) / std::max(1.0, std::abs(cur[j])));
    vals = cur;
    if (drift < 1e-10) return vals;
    prev = cur;
  }
  throw NonConvergenceError("eigenvalue iteration did not settle");
}

// Cheap estimate of the smallest-magnitude eigenvalue using iterative inner
// solves; classification aid on grids too large to factorize.
double smallest_eig_estimate_iterative(const Eigen::SparseMatrix<double>& A) {
  const long N = A.rows();
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
  solver.setTolerance(1e-8);
  solver.setMaxIterations(2000);
  solver.compute(A);
  if (solver.info() != Eigen::Success) return 0.0;
  Rng rng(0x5eedba11u);
  Eigen::VectorXd q(N);
  for (long i = 0; i < N; ++i) q(i) = rng.normal();
  q.normalize();
  double val = 0.0;
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd z = solver.solve(q);
    if (solver.info() != Eigen::Success) return 0.0;
    double nz = z.norm();
    if (!(nz > 0.0)) return 0.0;
    q = z / nz;
    val = q.dot(A * q);
  }
  return val;
}

}  // namespace

GridSolution solve_invariance(const SystemSpec& spec, const std::vector<double>& center,
                              double radius, const BoundaryData& boundary,
                              const SolveOptions& opt) {
  if (!boundary) throw ConfigError("boundary data is required");
  double h = opt.h > 0.0 ? opt.h : radius / 32.0;
  if (!(opt.tol > 0.0)) throw ConfigError("solver tolerance must be positive");

  double kappa = invariance_coefficient(spec, center);
  Discretization dz = discretize(spec, center, radius, h, kappa, boundary);
  GridSolution& g = dz.grid;
  g.mass_used = std::abs(kappa);
  g.coefficient = kappa;

  // Eigen's iterative solvers special-case a zero right-hand side; handle it
  // here so the iteration count stays meaningful.
  if (dz.b.isZero(0.0)) {
    g.iterations = 0;
    g.residual_norm = 0.0;
    g.values.assign(g.lattice_size(), std::numeric_limits<double>::quiet_NaN());
    for (long q = 0; q < dz.interior_count; ++q)
      g.values[g.lattice_index(dz.idx_of_unknown[q])] = 0.0;
    return g;
  }

  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> solver;
  solver.setMaxIterations(opt.max_iterations);
  solver.compute(dz.A);
  if (solver.info() != Eigen::Success)
    throw NonConvergenceError("preconditioner construction failed");

  Eigen::VectorXd u = Eigen::VectorXd::Zero(dz.interior_count);
  if (opt.initial) {
    if (static_cast<long>(opt.initial->size()) != g.lattice_size())
      throw ConfigError("initial iterate does not match the lattice size");
    for (long q = 0; q < dz.interior_count; ++q) {
      double v = (*opt.initial)[g.lattice_index(dz.idx_of_unknown[q])];
      if (!std::isfinite(v)) throw ConfigError("initial iterate holds a non-finite interior value");
      u(q) = v;
    }
  }

  long iters = 0;
  double res = 0.0;
  double reltol = 1e-10;
  for (int round = 0; round < 6; ++round) {
    solver.setTolerance(reltol);
    u = solver.solveWithGuess(dz.b, u);
    iters += solver.iterations();
    res = max_norm_residual(dz, u);
    if (res <= opt.tol) break;
    reltol *= 1e-3;
    if (reltol < 1e-16) reltol = 1e-16;
  }
  if (res > opt.tol) {
    // distinguish a resonant (singular) operator from plain stagnation
    double eig;
    try {
      eig = dz.interior_count <= 20000 ? smallest_magnitude_eigs(dz.A, 1)[0]
                                       : smallest_eig_estimate_iterative(dz.A);
    } catch (const NonConvergenceError&) {
      eig = std::numeric_limits<double>::quiet_NaN();
    }
    if (std::isfinite(eig) && std::abs(eig) < 1e-10) {
      std::ostringstream os;
      os << "the discrete operator is resonant: smallest eigenvalue " << eig;
      throw MathDomainError(os.str());
    }
    std::ostringstream os;
    os << "iterative solve stalled at residual " << res << " (target " << opt.tol << ")";
    throw NonConvergenceError(os.str());
  }

  g.iterations = iters;
  g.residual_norm = res;
  g.values.assign(g.lattice_size(), std::numeric_limits<double>::quiet_NaN());
  for (long q = 0; q < dz.interior_count; ++q)
    g.values[g.lattice_index(dz.idx_of_unknown[q])] = u(q);
  return g;
}

std::vector<double> operator_spectrum(const SystemSpec& spec, const std::vector<double>& center,
                                      double radius, double h, int k, CurvatureNorm norm) {
  SystemSpec base = spec.unperturbed();
  base.validate();
  double r_p = scalar_for_norm(ricci_scalar_readings(base, center), norm);
  double shift = (base.n - 2) * r_p / (4.0 * (base.n - 1));
  Discretization dz = discretize(spec, center, radius, h, shift, constant_boundary(0.0));
  return smallest_magnitude_eigs(dz.A, k);
}

namespace {

// Multilinear interpolation over the solved lattice. C0 only; the geometry
// sees a piecewise-linear perturbation, which is enough for the paired
// volume verification (parity, not smoothness, carries that measurement).
class GridPotential : public PotentialField {
 public:
  explicit GridPotential(GridSolution sol) : g_(std::move(sol)) {}

  int dims() const override { return g_.n; }

  double value(const double* x) const override {
    Cell c = locate(x);
    double acc = 0.0;
    for (int corner = 0; corner < (1 << g_.n); ++corner) {
      double wgt = 1.0;
      for (int d = 0; d < g_.n; ++d) wgt *= (corner >> d) & 1 ? c.f[d] : 1.0 - c.f[d];
      acc += wgt * c.val[corner];
    }
    return acc;
  }

  void jet(const double* x, PotentialJet2& out) const override {
    const int n = g_.n;
    out.resize(n);
    Cell c = locate(x);
    out.value = 0.0;
    std::fill(out.grad.begin(), out.grad.end(), 0.0);
    std::fill(out.hess.begin(), out.hess.end(), 0.0);
    const double invh = 1.0 / g_.h;
    for (int corner = 0; corner < (1 << n); ++corner) {
      double v = c.val[corner];
      double wgt = 1.0;
      for (int d = 0; d < n; ++d) wgt *= (corner >> d) & 1 ? c.f[d] : 1.0 - c.f[d];
      out.value += wgt * v;
      for (int d = 0; d < n; ++d) {
        double wd = (corner >> d) & 1 ? 1.0 : -1.0;
        for (int e = 0; e < n; ++e)
          if (e != d) wd *= (corner >> e) & 1 ? c.f[e] : 1.0 - c.f[e];
        out.grad[d] += invh * wd * v;
        for (int e = d + 1; e < n; ++e) {
          double wde = ((corner >> d) & 1 ? 1.0 : -1.0) * ((corner >> e) & 1 ? 1.0 : -1.0);
          for (int q = 0; q < n; ++q)
            if (q != d && q != e) wde *= (corner >> q) & 1 ? c.f[q] : 1.0 - c.f[q];
          out.hess[static_cast<size_t>(d) * n + e] += invh * invh * wde * v;
        }
      }
    }
    for (int d = 0; d < n; ++d)
      for (int e = d + 1; e < n; ++e)
        out.hess[static_cast<size_t>(e) * n + d] = out.hess[static_cast<size_t>(d) * n + e];
  }

 private:
  struct Cell {
    std::vector<double> f;    // fractional coordinates inside the cell
    std::vector<double> val;  // 2^n corner values
  };

  Cell locate(const double* x) const {
    const int n = g_.n;
    Cell c;
    c.f.resize(n);
    std::vector<int> base(n);
    for (int d = 0; d < n; ++d) {
      double t = (x[d] - g_.center[d]) / g_.h;  // in units of h from the center
      if (!(t >= -g_.m && t <= g_.m))
        throw MathDomainError("interpolation outside the solved region");
      int cd = static_cast<int>(std::floor(t));
      if (cd >= g_.m) cd = g_.m - 1;
      if (cd < -g_.m) cd = -g_.m;
      base[d] = cd;
      c.f[d] = t - cd;
    }
    c.val.resize(1 << n);
    std::vector<int> idx(n);
    for (int corner = 0; corner < (1 << n); ++corner) {
      for (int d = 0; d < n; ++d) idx[d] = base[d] + ((corner >> d) & 1);
      double v = g_.values[g_.lattice_index(idx)];
      if (std::isnan(v)) throw MathDomainError("interpolation outside the solved region");
      c.val[corner] = v;
    }
    return c;
  }

  GridSolution g_;
};

}  // namespace

std::shared_ptr<const PotentialField> make_grid_potential(const GridSolution& sol) {
  if (sol.values.empty()) throw ConfigError("grid solution holds no values");
  return std::make_shared<GridPotential>(sol);
}

InvarianceCheck verify_entropy_invariance(const SystemSpec& spec, const BallSpec& ball,
                                          const GridSolution& sol,
                                          const std::vector<double>& lambdas, long long sample_pairs,
                                          std::uint64_t seed) {
  SystemSpec sys = spec.unperturbed();
  sys.perturbation = make_grid_potential(sol);
  sys.lambda = 0.0;
  TwinVolumeResult twin = ball_volume_twin(sys, lambdas, ball, sample_pairs, seed);

  InvarianceCheck out;
  out.vol_base = twin.vol_base;
  out.tally = twin.tally;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int fitted = 0;
  for (const TwinVolumeRow& row : twin.rows) {
    out.rows.push_back({row.lambda, row.delta_entropy, row.delta_std_error});
    if (row.lambda > 0.0 && row.delta_entropy != 0.0) {
      double lx = std::log(row.lambda), ly = std::log(std::abs(row.delta_entropy));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++fitted;
    }
  }
  if (fitted >= 2) {
    out.slope = (fitted * sxy - sx * sy) / (fitted * sxx - sx * sx);
  } else {
    out.slope = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace jacobi
