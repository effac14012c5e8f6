#pragma once

#include <memory>
#include <string>
#include <vector>

#include "jacobi/expr.hpp"

namespace jacobi {

// Value, gradient and Hessian of a scalar field at one point.
struct PotentialJet2 {
  double value = 0.0;
  std::vector<double> grad;  // n
  std::vector<double> hess;  // n*n, row-major, symmetric

  void resize(int n) {
    grad.assign(n, 0.0);
    hess.assign(static_cast<size_t>(n) * n, 0.0);
  }
  double h(int i, int j, int n) const { return hess[static_cast<size_t>(i) * n + j]; }
};

// Evaluation interface shared by parsed expressions and grid-interpolated fields.
class PotentialField {
 public:
  virtual ~PotentialField() = default;
  virtual int dims() const = 0;
  virtual double value(const double* x) const = 0;
  // Fills out (resized by caller to dims()). Throws MathDomainError on non-finite results.
  virtual void jet(const double* x, PotentialJet2& out) const = 0;
};

// Potential backed by a parsed expression; all derivatives are symbolic,
// compiled once to postfix tapes.
class ExprPotential : public PotentialField {
 public:
  explicit ExprPotential(PotentialExpr expr);

  int dims() const override { return expr_.dims(); }
  double value(const double* x) const override;
  void jet(const double* x, PotentialJet2& out) const override;

  const PotentialExpr& expr() const { return expr_; }

 private:
  PotentialExpr expr_;
  ExprTape value_tape_;
  std::vector<ExprTape> grad_tapes_;   // n
  std::vector<ExprTape> hess_tapes_;   // upper triangle, row-major order
};

std::shared_ptr<const PotentialField> make_expr_potential(const std::string& source, int n);

// Convenience op: full second-order jet of a parsed expression at x.
PotentialJet2 eval_derivs(const PotentialField& f, const std::vector<double>& x);

enum class CriticalKind { Minimum, Maximum, Saddle, Degenerate };

struct CriticalPoint {
  std::vector<double> location;
  CriticalKind kind = CriticalKind::Degenerate;
  std::vector<double> hess_eigenvalues;  // ascending
  double grad_norm = 0.0;
  double value = 0.0;
  int iterations = 0;
};

struct CriticalPointSearch {
  std::vector<CriticalPoint> points;          // converged, deduplicated
  std::vector<std::vector<double>> failed;    // seeds whose Newton run did not converge
};

// Newton search from each seed with the analytic Hessian; near-singular Hessians
// fall back to a pseudo-inverse step. Points closer than 10*grad_tol are merged.
// Eigenvalues below 1e-8 * max|eig| mark the point degenerate.
CriticalPointSearch find_critical_points(const PotentialField& f,
                                         const std::vector<std::vector<double>>& seeds,
                                         double grad_tol = 1e-10, int max_iter = 64);

}  // namespace jacobi
