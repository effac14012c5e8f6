#include "jacobi/perturbation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace jacobi {

namespace {

struct PointJets {
  int n = 0;
  double wc = 0.0;        // E - Vc
  PotentialJet2 vc, vt;   // unperturbed potential and perturbation (vt may be zero)
  bool has_pert = false;

  PointJets(const SystemSpec& spec, const std::vector<double>& x) {
    spec.validate();
    n = spec.n;
    if (static_cast<int>(x.size()) != n) throw ConfigError("point dimension mismatch");
    vc.resize(n);
    spec.potential->jet(x.data(), vc);
    wc = spec.energy - vc.value;
    if (!(wc > spec.margin())) {
      std::ostringstream os;
      os << "point is inside the turning-point margin: E - V = " << wc;
      throw MathDomainError(os.str());
    }
    vt.resize(n);
    if (spec.perturbation) {
      spec.perturbation->jet(x.data(), vt);
      has_pert = true;
    }
  }

  double lap_vc() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += vc.hess[static_cast<size_t>(i) * n + i];
    return s;
  }
  double lap_vt() const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += vt.hess[static_cast<size_t>(i) * n + i];
    return s;
  }
};

}  // namespace

double conformal_factor(const SystemSpec& spec, const std::vector<double>& x) {
  PointJets pj(spec, x);
  double arg = 1.0 - spec.lambda * pj.vt.value / pj.wc;
  if (!(arg > 0.0)) {
    std::ostringstream os;
    os << "conformal factor degenerates: 1 - lambda*Vt/(E-Vc) = " << arg;
    throw MathDomainError(os.str());
  }
  return 0.5 * std::log(arg);
}

double conformal_trace_exact(const SystemSpec& spec, const std::vector<double>& x) {
  PointJets pj(spec, x);
  const int n = pj.n;
  double wt = pj.wc - spec.lambda * pj.vt.value;
  if (!(wt > 0.0)) throw MathDomainError("perturbed kinetic term is non-positive");

  // sigma = 0.5*(ln wt - ln wc); derivatives assembled from both jets
  double lap_sigma = 0.0, grad_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    double wt_k = -(pj.vc.grad[k] + spec.lambda * pj.vt.grad[k]);
    double wc_k = -pj.vc.grad[k];
    double sk = 0.5 * (wt_k / wt - wc_k / pj.wc);
    grad_sq += sk * sk;
    double wt_kk = -(pj.vc.hess[static_cast<size_t>(k) * n + k] +
                     spec.lambda * pj.vt.hess[static_cast<size_t>(k) * n + k]);
    double wc_kk = -pj.vc.hess[static_cast<size_t>(k) * n + k];
    lap_sigma += 0.5 * (wt_kk / wt - wt_k * wt_k / (wt * wt) - wc_kk / pj.wc +
                        wc_k * wc_k / (pj.wc * pj.wc));
  }
  double inv2w = 0.5 / pj.wc;
  return inv2w * lap_sigma + (0.5 * n - 1.0) * inv2w * grad_sq;
}

ScalarShift conformal_scalar_shift(const SystemSpec& spec, const std::vector<double>& P,
                                   CurvatureNorm norm, double grad_tol) {
  PointJets pj(spec, P);
  for (int i = 0; i < pj.n; ++i)
    if (std::abs(pj.vc.grad[i]) > grad_tol) {
      std::ostringstream os;
      os << "curvature shift is defined at critical points; |dV/dx" << (i + 1)
         << "| = " << std::abs(pj.vc.grad[i]) << " exceeds tolerance " << grad_tol;
      throw ConfigError(os.str());
    }

  const double w = pj.wc;
  const double inv2w = 0.5 / w;
  double bracket = pj.lap_vt() * inv2w + pj.vt.value / w * (pj.lap_vc() * inv2w);

  ScalarShift out;
  out.b_trace = -spec.lambda * inv2w * bracket;
  double r_p = scalar_for_norm(ricci_scalar_readings(spec.unperturbed(), P), norm);
  out.delta_r = 2.0 * (pj.n - 1) * out.b_trace - spec.lambda * pj.vt.value / w * r_p;
  return out;
}

EntropyShift entropy_shift_first_order(const SystemSpec& spec, const BallSpec& ball, double r_p,
                                       double delta_r, double k_b) {
  spec.validate();
  const int n = spec.n;
  const double a = ball.radius * ball.radius / (6.0 * (n + 2));
  double lead = 1.0 - a * r_p;
  if (!(lead > 0.0))
    throw MathDomainError("volume expansion is outside its validity range; reduce the radius");
  EntropyShift out;
  double arg = 1.0 + a * delta_r / lead;
  if (!(arg > 0.0))
    throw MathDomainError("curvature shift exceeds the expansion's validity range");
  out.exact = k_b * std::log(arg);
  out.linear = k_b * a * delta_r / lead;
  return out;
}

double invariance_condition_residual(const SystemSpec& spec, const std::vector<double>& x,
                                     double r_p) {
  spec.validate();
  if (spec.n < 2) throw ConfigError("invariance condition needs dimension >= 2");
  if (!spec.perturbation) return 0.0;
  PointJets pj(spec, x);
  return pj.lap_vt() + 3.0 * r_p / (pj.n - 1) * pj.vt.value;
}

double invariance_coefficient(const SystemSpec& spec, const std::vector<double>& P) {
  SystemSpec base = spec.unperturbed();
  base.validate();
  double lap_g = laplace_jacobi(base, *base.potential, P);
  double w = base.w_checked(P.data());
  return 3.0 * lap_g / (2.0 * w);
}

double effective_mass(const SystemSpec& spec, const std::vector<double>& P) {
  return std::abs(invariance_coefficient(spec, P));
}

double special_energy(const SystemSpec& spec, const std::vector<double>& P) {
  spec.validate();
  if (spec.n < 3)
    throw ConfigError("special energy is defined for dimension >= 3 only");
  if (static_cast<int>(P.size()) != spec.n) throw ConfigError("point dimension mismatch");
  return 6.0 / (spec.n - 2) + spec.potential->value(P.data());
}

ConformalCoefficients conformal_laplacian_coefficient(const SystemSpec& spec,
                                                      const std::vector<double>& P, double r_p) {
  spec.validate();
  if (spec.n < 2) throw ConfigError("conformal coefficients need dimension >= 2");
  ConformalCoefficients out;
  out.lhs = (spec.n - 2) * r_p / (4.0 * (spec.n - 1));
  out.rhs = out.lhs - invariance_coefficient(spec, P);
  return out;
}

PerturbationReport perturbation_report(const SystemSpec& spec, const BallSpec& ball,
                                       CurvatureNorm norm, double k_b) {
  SystemSpec base = spec.unperturbed();
  ball.validate(base);
  const std::vector<double>& P = ball.center;

  PerturbationReport rep;
  rep.n = spec.n;
  rep.energy = spec.energy;
  rep.lambda = spec.lambda;
  rep.normalization = curvature_norm_name(norm);
  rep.r_p = scalar_for_norm(ricci_scalar_readings(base, P), norm);
  rep.sigma_at_center = conformal_factor(spec, P);
  ScalarShift shift = conformal_scalar_shift(spec, P, norm);
  rep.b_trace = shift.b_trace;
  rep.b_trace_exact = conformal_trace_exact(spec, P);
  rep.delta_r = shift.delta_r;
  EntropyShift es = entropy_shift_first_order(spec, ball, rep.r_p, rep.delta_r, k_b);
  rep.delta_s_exact = es.exact;
  rep.delta_s_linear = es.linear;
  rep.mass = effective_mass(spec, P);
  rep.special_energy_value =
      spec.n >= 3 ? special_energy(spec, P) : std::numeric_limits<double>::quiet_NaN();
  rep.residual_coefficient = conformal_laplacian_coefficient(spec, P, rep.r_p).rhs;
  rep.invariance_residual_at_center = invariance_condition_residual(spec, P, rep.r_p);
  return rep;
}

}  // namespace jacobi
