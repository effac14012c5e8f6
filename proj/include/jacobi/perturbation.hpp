#pragma once

#include <string>
#include <vector>

#include "jacobi/ball.hpp"
#include "jacobi/geometry.hpp"
#include "jacobi/system.hpp"

namespace jacobi {

// Log-conformal factor between the perturbed and unperturbed kinetic metrics,
// 0.5*ln(1 - lambda*Vt/(E - Vc)). Domain error when the argument is not
// positive (the perturbation eats the whole kinetic term).
double conformal_factor(const SystemSpec& spec, const std::vector<double>& x);

// Exact trace of the conformal-curvature block at x, no expansion in lambda:
// g^{kl}(d_k d_l sigma) + (n/2 - 1)|grad sigma|^2_g with the unperturbed
// metric, Christoffel-free form valid at a critical point of Vc.
double conformal_trace_exact(const SystemSpec& spec, const std::vector<double>& x);

struct ScalarShift {
  double b_trace = 0.0;  // first order in lambda
  double delta_r = 0.0;  // unperturbed-minus-perturbed scalar, first order
};

// First-order curvature shift at a critical point P of Vc. All inverse-metric
// contractions use the unperturbed kinetic metric at P; the scalar entering
// the shift is taken in the requested normalization.
ScalarShift conformal_scalar_shift(const SystemSpec& spec, const std::vector<double>& P,
                                   CurvatureNorm norm, double grad_tol = 1e-8);

struct EntropyShift {
  double exact = 0.0;   // log of the ratio of the two second-order volumes
  double linear = 0.0;  // the same expanded to first order in lambda
};

// Entropy difference implied by a curvature shift delta_r at fixed geodesic
// radius, in both the closed log form and its linearization.
EntropyShift entropy_shift_first_order(const SystemSpec& spec, const BallSpec& ball, double r_p,
                                       double delta_r, double k_b = 1.0);

// Pointwise residual of the first-order invariance equation in its flat-
// Laplacian form: lap(Vt) + 3*r_p/(n-1)*Vt. Zero iff Vt satisfies it at x.
double invariance_condition_residual(const SystemSpec& spec, const std::vector<double>& x,
                                     double r_p);

// Coefficient of the zeroth-order term of the invariance equation at P,
// signed: 3*lap_g(Vc)(P) / (2*(E - Vc(P))). The mass is its absolute value.
double invariance_coefficient(const SystemSpec& spec, const std::vector<double>& P);

double effective_mass(const SystemSpec& spec, const std::vector<double>& P);

// Energy at which the invariance equation collapses onto the conformal
// Laplacian's kernel; defined for n >= 3 only.
double special_energy(const SystemSpec& spec, const std::vector<double>& P);

struct ConformalCoefficients {
  double lhs = 0.0;  // (n-2)/(4(n-1)) * r_p
  double rhs = 0.0;  // lhs minus the invariance coefficient
};

ConformalCoefficients conformal_laplacian_coefficient(const SystemSpec& spec,
                                                      const std::vector<double>& P, double r_p);

struct PerturbationReport {
  int n = 0;
  double energy = 0.0;
  double lambda = 0.0;
  std::string normalization;
  double r_p = 0.0;
  double sigma_at_center = 0.0;
  double b_trace = 0.0;
  double b_trace_exact = 0.0;
  double delta_r = 0.0;
  double delta_s_exact = 0.0;
  double delta_s_linear = 0.0;
  double mass = 0.0;
  double special_energy_value = 0.0;  // NaN when n = 2
  double residual_coefficient = 0.0;
  double invariance_residual_at_center = 0.0;
};

PerturbationReport perturbation_report(const SystemSpec& spec, const BallSpec& ball,
                                       CurvatureNorm norm, double k_b = 1.0);

}  // namespace jacobi
