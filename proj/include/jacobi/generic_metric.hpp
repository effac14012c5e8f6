#pragma once

#include <functional>
#include <vector>

#include "jacobi/system.hpp"

namespace jacobi {

// Black-box Riemannian metric with two orders of analytic derivatives.
// The curvature routines below use only this interface (plus matrix inversion),
// never the conformal shortcuts, so they serve as an independent check.
class MetricField {
 public:
  virtual ~MetricField() = default;
  virtual int dims() const = 0;
  virtual void metric(const double* x, double* g) const = 0;                    // [i][j]
  virtual void metric_derivative(const double* x, double* dg) const = 0;        // [k][i][j]
  virtual void metric_second_derivative(const double* x, double* ddg) const = 0;  // [l][k][i][j]
};

// Kinetic-energy metric 2*(E - V(x))*delta_ij presented through the generic interface.
class JacobiMetricField : public MetricField {
 public:
  explicit JacobiMetricField(SystemSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

  int dims() const override { return spec_.n; }
  void metric(const double* x, double* g) const override;
  void metric_derivative(const double* x, double* dg) const override;
  void metric_second_derivative(const double* x, double* ddg) const override;

 private:
  SystemSpec spec_;
};

// Central-difference derivatives over a metric-only callable; test scaffolding.
class NumericalMetricDerivs : public MetricField {
 public:
  using MetricFn = std::function<void(const double*, double*)>;
  NumericalMetricDerivs(int n, MetricFn fn, double step = 1e-5)
      : n_(n), fn_(std::move(fn)), h_(step) {}

  int dims() const override { return n_; }
  void metric(const double* x, double* g) const override { fn_(x, g); }
  void metric_derivative(const double* x, double* dg) const override;
  void metric_second_derivative(const double* x, double* ddg) const override;

 private:
  int n_;
  MetricFn fn_;
  double h_;
};

void generic_christoffel(const MetricField& mf, const double* x, double* gamma);
void generic_riemann(const MetricField& mf, const double* x, double* riem);
void generic_ricci(const MetricField& mf, const double* x, double* ricci);
double generic_ricci_scalar(const MetricField& mf, const std::vector<double>& x);

}  // namespace jacobi
