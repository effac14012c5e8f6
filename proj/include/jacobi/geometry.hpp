#pragma once

#include <vector>

#include "jacobi/system.hpp"

namespace jacobi {

// Derivatives of the log-conformal factor phi = 0.5*ln(2*(E-V)) at one point.
// Everything curved about the kinetic-energy metric flows through these.
struct ConformalJet {
  int n = 0;
  double w = 0.0;                 // E - V
  std::vector<double> phi_grad;   // phi_i = -V_i / (2w)
  std::vector<double> phi_hess;   // phi_ij = -V_ij/(2w) - V_i V_j/(2w^2)
  double phi_grad_sq = 0.0;       // |grad phi|^2

  void build(int dims, double w_value, const PotentialJet2& vjet);
};

// Tensor kernels, all in flat row-major buffers sized by the caller.
// Index layout: christoffel[i][j][k]; riemann[i][j][k][m] with the derivative
// pair (k,m) last, so R^i_{jkm} = -R^i_{jmk} and Ricci_jm = sum_i R^i_{jim}.
void christoffel_kernel(const ConformalJet& c, double* gamma);
void riemann_kernel(const ConformalJet& c, double* riem);
void ricci_kernel(int n, double w, const PotentialJet2& vjet, double* ricci);

double scalar_flat_trace_kernel(int n, double w, const PotentialJet2& vjet);
double scalar_laplacian_form_kernel(int n, double w, const PotentialJet2& vjet);
double scalar_metric_kernel(int n, double w, const PotentialJet2& vjet);

// Point ops on a system; every one enforces the turning-point margin.
std::vector<double> jacobi_metric(const SystemSpec& spec, const std::vector<double>& x);
std::vector<double> jacobi_metric_inverse(const SystemSpec& spec, const std::vector<double>& x);
std::vector<double> christoffel(const SystemSpec& spec, const std::vector<double>& x);
std::vector<double> riemann(const SystemSpec& spec, const std::vector<double>& x);
std::vector<double> ricci_tensor(const SystemSpec& spec, const std::vector<double>& x);

// The three curvature-scalar readings. flat_trace contracts Ricci with the
// identity; laplacian_form is (n-1)*lap(V)/(2(E-V)); metric contracts with the
// actual inverse metric and is the geometrically meaningful value.
struct ScalarReadings {
  double flat_trace = 0.0;
  double laplacian_form = 0.0;
  double metric = 0.0;
};
ScalarReadings ricci_scalar_readings(const SystemSpec& spec, const std::vector<double>& x);

double sectional_curvature(const SystemSpec& spec, const std::vector<double>& x,
                           const std::vector<double>& y, const std::vector<double>& z);
double ricci_direction(const SystemSpec& spec, const std::vector<double>& x,
                       const std::vector<double>& y);

// Covariant Laplacian of f in the kinetic metric, from analytic derivatives.
double laplace_jacobi(const SystemSpec& spec, const PotentialField& f,
                      const std::vector<double>& x);

struct CurvatureBundle {
  int n = 0;
  std::vector<double> point;
  std::vector<double> metric;       // n^2
  std::vector<double> christoffel;  // n^3
  std::vector<double> riemann;      // n^4
  std::vector<double> ricci;        // n^2
  double scalar_flat_trace = 0.0;
  double scalar_laplacian_form = 0.0;
  double scalar_oracle = 0.0;       // metric trace via the generic-metric route
};

CurvatureBundle curvature_bundle(const SystemSpec& spec, const std::vector<double>& x);

// Normalization threading for downstream consumers. MetricTrace is the
// honest scalar; FlatTrace and LaplacianForm are the two identity-contracted
// readings (they differ by a factor 2 at critical points). Volume and
// perturbation pipelines take LaplacianForm as the literal choice because the
// special-energy cancellation is exact only under it.
enum class CurvatureNorm { MetricTrace, FlatTrace, LaplacianForm };

double scalar_for_norm(const ScalarReadings& r, CurvatureNorm norm);
const char* curvature_norm_name(CurvatureNorm norm);

}  // namespace jacobi
