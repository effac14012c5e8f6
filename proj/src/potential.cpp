#include "jacobi/potential.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "jacobi/errors.hpp"

namespace jacobi {

ExprPotential::ExprPotential(PotentialExpr expr) : expr_(std::move(expr)) {
  const int n = expr_.dims();
  value_tape_ = ExprTape(expr_);
  std::vector<PotentialExpr> grads;
  grads.reserve(n);
  for (int i = 0; i < n; ++i) {
    grads.push_back(expr_.derivative(i));
    grad_tapes_.emplace_back(grads.back());
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) hess_tapes_.emplace_back(grads[i].derivative(j));
}

double ExprPotential::value(const double* x) const {
  double v = value_tape_.eval(x);
  if (!std::isfinite(v)) throw MathDomainError("potential evaluated to a non-finite value");
  return v;
}

void ExprPotential::jet(const double* x, PotentialJet2& out) const {
  const int n = dims();
  out.value = value_tape_.eval(x);
  bool ok = std::isfinite(out.value);
  for (int i = 0; i < n; ++i) {
    out.grad[i] = grad_tapes_[i].eval(x);
    ok = ok && std::isfinite(out.grad[i]);
  }
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j, ++k) {
      double h = hess_tapes_[k].eval(x);
      ok = ok && std::isfinite(h);
      out.hess[static_cast<size_t>(i) * n + j] = h;
      out.hess[static_cast<size_t>(j) * n + i] = h;
    }
  }
  if (!ok) {
    std::ostringstream os;
    os << "potential derivatives non-finite at (";
    for (int i = 0; i < n; ++i) os << (i ? ", " : "") << x[i];
    os << ")";
    throw MathDomainError(os.str());
  }
}

std::shared_ptr<const PotentialField> make_expr_potential(const std::string& source, int n) {
  return std::make_shared<ExprPotential>(parse_potential(source, n));
}

PotentialJet2 eval_derivs(const PotentialField& f, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != f.dims())
    throw ConfigError("eval point dimension mismatch");
  PotentialJet2 jet;
  jet.resize(f.dims());
  f.jet(x.data(), jet);
  return jet;
}

CriticalPointSearch find_critical_points(const PotentialField& f,
                                         const std::vector<std::vector<double>>& seeds,
                                         double grad_tol, int max_iter) {
  const int n = f.dims();
  if (grad_tol <= 0.0) throw ConfigError("grad_tol must be positive");
  CriticalPointSearch result;
  PotentialJet2 jet;
  jet.resize(n);

  for (const auto& seed : seeds) {
    if (static_cast<int>(seed.size()) != n) throw ConfigError("seed dimension mismatch");
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(seed.data(), n);
    bool converged = false;
    int it = 0;
    for (; it < max_iter; ++it) {
      std::vector<double> xv(x.data(), x.data() + n);
      f.jet(xv.data(), jet);
      Eigen::Map<const Eigen::VectorXd> g(jet.grad.data(), n);
      if (g.norm() <= grad_tol) {
        converged = true;
        break;
      }
      Eigen::Map<const Eigen::MatrixXd> H(jet.hess.data(), n, n);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
      double smax = svd.singularValues()(0);
      Eigen::VectorXd step;
      if (smax <= 0.0 || svd.singularValues()(n - 1) <= 1e-12 * smax) {
        // Singular within tolerance: damped pseudo-inverse step.
        svd.setThreshold(1e-12);
        step = svd.solve(g);
      } else {
        step = H.ldlt().solve(g);
      }
      if (!step.allFinite()) break;
      // Crude trust region keeps wild seeds from escaping to infinity.
      double maxstep = 10.0 * (1.0 + x.norm());
      if (step.norm() > maxstep) step *= maxstep / step.norm();
      x -= step;
    }
    if (!converged) {
      result.failed.push_back(seed);
      continue;
    }

    std::vector<double> loc(x.data(), x.data() + n);
    // Merge with an existing point if within 10*grad_tol.
    bool duplicate = false;
    for (const auto& p : result.points) {
      double d2 = 0.0;
      for (int i = 0; i < n; ++i) d2 += (p.location[i] - loc[i]) * (p.location[i] - loc[i]);
      if (std::sqrt(d2) <= 10.0 * grad_tol) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;

    f.jet(loc.data(), jet);
    Eigen::Map<const Eigen::MatrixXd> H(jet.hess.data(), n, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    CriticalPoint cp;
    cp.location = loc;
    cp.hess_eigenvalues.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
    cp.grad_norm = Eigen::Map<const Eigen::VectorXd>(jet.grad.data(), n).norm();
    cp.value = jet.value;
    cp.iterations = it;
    double max_abs = 0.0;
    for (double ev : cp.hess_eigenvalues) max_abs = std::max(max_abs, std::abs(ev));
    int pos = 0, neg = 0, zero = 0;
    for (double ev : cp.hess_eigenvalues) {
      if (std::abs(ev) < 1e-8 * max_abs || max_abs == 0.0)
        ++zero;
      else if (ev > 0)
        ++pos;
      else
        ++neg;
    }
    if (zero > 0)
      cp.kind = CriticalKind::Degenerate;
    else if (pos == n)
      cp.kind = CriticalKind::Minimum;
    else if (neg == n)
      cp.kind = CriticalKind::Maximum;
    else
      cp.kind = CriticalKind::Saddle;
    result.points.push_back(std::move(cp));
  }
  return result;
}

}  // namespace jacobi
