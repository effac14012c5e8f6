#pragma once

#include <cmath>
#include <memory>
#include <sstream>

#include "jacobi/errors.hpp"
#include "jacobi/potential.hpp"

namespace jacobi {

// One mechanical system: dimension, total energy, central potential and an
// optional perturbation switched on by lambda. All geometric quantities are
// derived from the conformal factor 2*(E - V(x)).
struct SystemSpec {
  int n = 0;
  double energy = 0.0;
  std::shared_ptr<const PotentialField> potential;     // V_c
  std::shared_ptr<const PotentialField> perturbation;  // optional
  double lambda = 0.0;
  double turning_margin = 0.0;  // <= 0 selects the default

  // Default margin 1e-6*|E| with a positive floor, so E <= 0 still validates.
  double margin() const {
    if (turning_margin > 0.0) return turning_margin;
    double m = 1e-6 * std::abs(energy);
    return m > 0.0 ? m : 1e-12;
  }

  bool perturbed() const { return perturbation && lambda != 0.0; }

  void validate() const {
    if (n < 1) throw ConfigError("system dimension must be >= 1");
    if (!potential) throw ConfigError("system has no potential");
    if (potential->dims() != n) throw ConfigError("potential dimension mismatch");
    if (perturbation && perturbation->dims() != n)
      throw ConfigError("perturbation dimension mismatch");
    if (!std::isfinite(energy)) throw ConfigError("energy must be finite");
  }

  double total_value(const double* x) const {
    double v = potential->value(x);
    if (perturbed()) v += lambda * perturbation->value(x);
    return v;
  }

  // scratch is only touched when a perturbation is active.
  void total_jet(const double* x, PotentialJet2& scratch, PotentialJet2& out) const {
    potential->jet(x, out);
    if (!perturbed()) return;
    perturbation->jet(x, scratch);
    out.value += lambda * scratch.value;
    for (size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += lambda * scratch.grad[i];
    for (size_t i = 0; i < out.hess.size(); ++i) out.hess[i] += lambda * scratch.hess[i];
  }

  // E - V(x) without any admissibility check.
  double w_raw(const double* x) const { return energy - total_value(x); }

  // E - V(x), rejecting points on or past the turning-point margin.
  double w_checked(const double* x) const {
    double w = w_raw(x);
    if (!(w > margin())) {
      std::ostringstream os;
      os << "point is inside the turning-point margin: E - V = " << w
         << " <= margin " << margin();
      throw MathDomainError(os.str());
    }
    return w;
  }

  SystemSpec unperturbed() const {
    SystemSpec s = *this;
    s.perturbation.reset();
    s.lambda = 0.0;
    return s;
  }
};

}  // namespace jacobi
