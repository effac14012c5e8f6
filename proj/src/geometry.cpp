#include "jacobi/geometry.hpp"

#include <cmath>

#include "jacobi/generic_metric.hpp"

namespace jacobi {

void ConformalJet::build(int dims, double w_value, const PotentialJet2& vjet) {
  n = dims;
  w = w_value;
  phi_grad.assign(n, 0.0);
  phi_hess.assign(static_cast<size_t>(n) * n, 0.0);
  double inv2w = 1.0 / (2.0 * w);
  phi_grad_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    phi_grad[i] = -vjet.grad[i] * inv2w;
    phi_grad_sq += phi_grad[i] * phi_grad[i];
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      phi_hess[static_cast<size_t>(i) * n + j] =
          -vjet.hess[static_cast<size_t>(i) * n + j] * inv2w -
          vjet.grad[i] * vjet.grad[j] * (2.0 * inv2w * inv2w);
}

void christoffel_kernel(const ConformalJet& c, double* gamma) {
  const int n = c.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        if (i == j) v += c.phi_grad[k];
        if (i == k) v += c.phi_grad[j];
        if (j == k) v -= c.phi_grad[i];
        gamma[(static_cast<size_t>(i) * n + j) * n + k] = v;
      }
}

void riemann_kernel(const ConformalJet& c, double* riem) {
  const int n = c.n;
  const auto H = [&](int a, int b) { return c.phi_hess[static_cast<size_t>(a) * n + b]; };
  const auto P = [&](int a) { return c.phi_grad[a]; };
  const double q = c.phi_grad_sq;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          double v = 0.0;
          if (i == m) v += H(j, k);
          if (i == k) v -= H(j, m);
          if (k == j) v += H(i, m);
          if (m == j) v -= H(i, k);
          if (i == k) v += P(j) * P(m);
          if (i == m) v -= P(j) * P(k);
          if (i == m && k == j) v += q;
          if (i == k && m == j) v -= q;
          if (m == j) v += P(i) * P(k);
          if (k == j) v -= P(i) * P(m);
          riem[((static_cast<size_t>(i) * n + j) * n + k) * n + m] = v;
        }
}

void ricci_kernel(int n, double w, const PotentialJet2& vjet, double* ricci) {
  double lap = 0.0, grad_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    lap += vjet.hess[static_cast<size_t>(i) * n + i];
    grad_sq += vjet.grad[i] * vjet.grad[i];
  }
  double c1 = 1.0 / (2.0 * w);
  double c2 = 1.0 / (4.0 * w * w);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = c1 * (n - 2) * vjet.hess[static_cast<size_t>(i) * n + j] +
                 c2 * 3.0 * (n - 2) * vjet.grad[i] * vjet.grad[j];
      if (i == j) v += c1 * lap - c2 * (n - 4) * grad_sq;
      ricci[static_cast<size_t>(i) * n + j] = v;
    }
}

double scalar_flat_trace_kernel(int n, double w, const PotentialJet2& vjet) {
  double lap = 0.0, grad_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    lap += vjet.hess[static_cast<size_t>(i) * n + i];
    grad_sq += vjet.grad[i] * vjet.grad[i];
  }
  return (n - 1) * lap / w - (n - 1) * (n - 6) * grad_sq / (4.0 * w * w);
}

double scalar_laplacian_form_kernel(int n, double w, const PotentialJet2& vjet) {
  double lap = 0.0;
  for (int i = 0; i < n; ++i) lap += vjet.hess[static_cast<size_t>(i) * n + i];
  return (n - 1) * lap / (2.0 * w);
}

double scalar_metric_kernel(int n, double w, const PotentialJet2& vjet) {
  return scalar_flat_trace_kernel(n, w, vjet) / (2.0 * w);
}

namespace {

struct PointEval {
  PotentialJet2 jet, scratch;
  double w = 0.0;

  PointEval(const SystemSpec& spec, const std::vector<double>& x) {
    spec.validate();
    if (static_cast<int>(x.size()) != spec.n) throw ConfigError("point dimension mismatch");
    jet.resize(spec.n);
    scratch.resize(spec.n);
    spec.total_jet(x.data(), scratch, jet);
    w = spec.energy - jet.value;
    if (!(w > spec.margin())) {
      std::ostringstream os;
      os << "point is inside the turning-point margin: E - V = " << w << " <= margin "
         << spec.margin();
      throw MathDomainError(os.str());
    }
  }
};

}  // namespace

std::vector<double> jacobi_metric(const SystemSpec& spec, const std::vector<double>& x) {
  PointEval pe(spec, x);
  std::vector<double> g(static_cast<size_t>(spec.n) * spec.n, 0.0);
  for (int i = 0; i < spec.n; ++i) g[static_cast<size_t>(i) * spec.n + i] = 2.0 * pe.w;
  return g;
}

std::vector<double> jacobi_metric_inverse(const SystemSpec& spec,
                                          const std::vector<double>& x) {
  PointEval pe(spec, x);
  std::vector<double> g(static_cast<size_t>(spec.n) * spec.n, 0.0);
  for (int i = 0; i < spec.n; ++i) g[static_cast<size_t>(i) * spec.n + i] = 0.5 / pe.w;
  return g;
}

std::vector<double> christoffel(const SystemSpec& spec, const std::vector<double>& x) {
  PointEval pe(spec, x);
  ConformalJet c;
  c.build(spec.n, pe.w, pe.jet);
  std::vector<double> gamma(static_cast<size_t>(spec.n) * spec.n * spec.n);
  christoffel_kernel(c, gamma.data());
  return gamma;
}

std::vector<double> riemann(const SystemSpec& spec, const std::vector<double>& x) {
  PointEval pe(spec, x);
  ConformalJet c;
  c.build(spec.n, pe.w, pe.jet);
  std::vector<double> riem(static_cast<size_t>(spec.n) * spec.n * spec.n * spec.n);
  riemann_kernel(c, riem.data());
  return riem;
}

std::vector<double> ricci_tensor(const SystemSpec& spec, const std::vector<double>& x) {
  PointEval pe(spec, x);
  std::vector<double> ric(static_cast<size_t>(spec.n) * spec.n);
  ricci_kernel(spec.n, pe.w, pe.jet, ric.data());
  return ric;
}

ScalarReadings ricci_scalar_readings(const SystemSpec& spec, const std::vector<double>& x) {
  PointEval pe(spec, x);
  ScalarReadings r;
  r.flat_trace = scalar_flat_trace_kernel(spec.n, pe.w, pe.jet);
  r.laplacian_form = scalar_laplacian_form_kernel(spec.n, pe.w, pe.jet);
  r.metric = scalar_metric_kernel(spec.n, pe.w, pe.jet);
  return r;
}

double scalar_for_norm(const ScalarReadings& r, CurvatureNorm norm) {
  switch (norm) {
    case CurvatureNorm::MetricTrace: return r.metric;
    case CurvatureNorm::FlatTrace: return r.flat_trace;
    case CurvatureNorm::LaplacianForm: return r.laplacian_form;
  }
  return r.metric;
}

const char* curvature_norm_name(CurvatureNorm norm) {
  switch (norm) {
    case CurvatureNorm::MetricTrace: return "oracle";
    case CurvatureNorm::FlatTrace: return "flat-trace";
    case CurvatureNorm::LaplacianForm: return "paper";
  }
  return "oracle";
}

double sectional_curvature(const SystemSpec& spec, const std::vector<double>& x,
                           const std::vector<double>& y, const std::vector<double>& z) {
  PointEval pe(spec, x);
  const int n = spec.n;
  if (static_cast<int>(y.size()) != n || static_cast<int>(z.size()) != n)
    throw ConfigError("tangent vector dimension mismatch");
  ConformalJet c;
  c.build(n, pe.w, pe.jet);
  std::vector<double> riem(static_cast<size_t>(n) * n * n * n);
  riemann_kernel(c, riem.data());

  double g = 2.0 * pe.w;  // isotropic metric coefficient
  double yy = 0.0, zz = 0.0, yz = 0.0;
  for (int i = 0; i < n; ++i) {
    yy += y[i] * y[i];
    zz += z[i] * z[i];
    yz += y[i] * z[i];
  }
  double denom = g * g * (yy * zz - yz * yz);
  if (std::abs(denom) < 1e-14)
    throw MathDomainError("sectional curvature undefined: tangent plane is degenerate");

  // Lowered tensor contracted twice with (Y, Z): g_{il} R^l_{jkm} Y^i Z^j Y^k Z^m.
  double num = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m)
          num += g * riem[((static_cast<size_t>(i) * n + j) * n + k) * n + m] * y[i] * z[j] *
                 y[k] * z[m];
  return num / denom;
}

double ricci_direction(const SystemSpec& spec, const std::vector<double>& x,
                       const std::vector<double>& y) {
  PointEval pe(spec, x);
  const int n = spec.n;
  if (static_cast<int>(y.size()) != n) throw ConfigError("tangent vector dimension mismatch");
  std::vector<double> ric(static_cast<size_t>(n) * n);
  ricci_kernel(n, pe.w, pe.jet, ric.data());
  double num = 0.0, yy = 0.0;
  for (int i = 0; i < n; ++i) {
    yy += y[i] * y[i];
    for (int j = 0; j < n; ++j) num += ric[static_cast<size_t>(i) * n + j] * y[i] * y[j];
  }
  double denom = 2.0 * pe.w * yy;
  if (denom < 1e-300) throw MathDomainError("ricci direction undefined for a zero vector");
  return num / denom;
}

double laplace_jacobi(const SystemSpec& spec, const PotentialField& f,
                      const std::vector<double>& x) {
  PointEval pe(spec, x);
  const int n = spec.n;
  if (f.dims() != n) throw ConfigError("field dimension mismatch");
  PotentialJet2 fj;
  fj.resize(n);
  f.jet(x.data(), fj);
  double lap = 0.0, dot = 0.0;
  for (int i = 0; i < n; ++i) {
    lap += fj.hess[static_cast<size_t>(i) * n + i];
    dot += pe.jet.grad[i] * fj.grad[i];
  }
  // (1/sqrt g) d_i (g^{ij} sqrt g d_j f) for g = 2(E-V) delta.
  return lap / (2.0 * pe.w) - (n - 2) * dot / (4.0 * pe.w * pe.w);
}

CurvatureBundle curvature_bundle(const SystemSpec& spec, const std::vector<double>& x) {
  PointEval pe(spec, x);
  const int n = spec.n;
  CurvatureBundle b;
  b.n = n;
  b.point = x;
  b.metric = jacobi_metric(spec, x);
  ConformalJet c;
  c.build(n, pe.w, pe.jet);
  b.christoffel.resize(static_cast<size_t>(n) * n * n);
  christoffel_kernel(c, b.christoffel.data());
  b.riemann.resize(static_cast<size_t>(n) * n * n * n);
  riemann_kernel(c, b.riemann.data());
  b.ricci.resize(static_cast<size_t>(n) * n);
  ricci_kernel(n, pe.w, pe.jet, b.ricci.data());
  b.scalar_flat_trace = scalar_flat_trace_kernel(n, pe.w, pe.jet);
  b.scalar_laplacian_form = scalar_laplacian_form_kernel(n, pe.w, pe.jet);
  b.scalar_oracle = generic_ricci_scalar(JacobiMetricField(spec), x);
  return b;
}

}  // namespace jacobi
