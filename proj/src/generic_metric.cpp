#include "jacobi/generic_metric.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "jacobi/errors.hpp"

namespace jacobi {

void JacobiMetricField::metric(const double* x, double* g) const {
  const int n = spec_.n;
  double w = spec_.w_checked(x);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g[static_cast<size_t>(i) * n + j] = i == j ? 2.0 * w : 0.0;
}

void JacobiMetricField::metric_derivative(const double* x, double* dg) const {
  const int n = spec_.n;
  PotentialJet2 jet, scratch;
  jet.resize(n);
  scratch.resize(n);
  spec_.total_jet(x, scratch, jet);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dg[(static_cast<size_t>(k) * n + i) * n + j] = i == j ? -2.0 * jet.grad[k] : 0.0;
}

void JacobiMetricField::metric_second_derivative(const double* x, double* ddg) const {
  const int n = spec_.n;
  PotentialJet2 jet, scratch;
  jet.resize(n);
  scratch.resize(n);
  spec_.total_jet(x, scratch, jet);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          ddg[((static_cast<size_t>(l) * n + k) * n + i) * n + j] =
              i == j ? -2.0 * jet.hess[static_cast<size_t>(l) * n + k] : 0.0;
}

void NumericalMetricDerivs::metric_derivative(const double* x, double* dg) const {
  std::vector<double> xp(x, x + n_), gp(static_cast<size_t>(n_) * n_),
      gm(static_cast<size_t>(n_) * n_);
  for (int k = 0; k < n_; ++k) {
    double x0 = xp[k];
    xp[k] = x0 + h_;
    fn_(xp.data(), gp.data());
    xp[k] = x0 - h_;
    fn_(xp.data(), gm.data());
    xp[k] = x0;
    for (int i = 0; i < n_ * n_; ++i)
      dg[static_cast<size_t>(k) * n_ * n_ + i] = (gp[i] - gm[i]) / (2.0 * h_);
  }
}

void NumericalMetricDerivs::metric_second_derivative(const double* x, double* ddg) const {
  const int nn = n_ * n_;
  std::vector<double> xp(x, x + n_), a(nn), b(nn), c(nn), d(nn), g0(nn);
  fn_(xp.data(), g0.data());
  for (int l = 0; l < n_; ++l)
    for (int k = 0; k < n_; ++k) {
      double xl = xp[l], xk = xp[k];
      if (l == k) {
        xp[k] = xk + h_;
        fn_(xp.data(), a.data());
        xp[k] = xk - h_;
        fn_(xp.data(), b.data());
        xp[k] = xk;
        for (int i = 0; i < nn; ++i)
          ddg[(static_cast<size_t>(l) * n_ + k) * nn + i] =
              (a[i] - 2.0 * g0[i] + b[i]) / (h_ * h_);
      } else {
        xp[l] = xl + h_;
        xp[k] = xk + h_;
        fn_(xp.data(), a.data());
        xp[k] = xk - h_;
        fn_(xp.data(), b.data());
        xp[l] = xl - h_;
        fn_(xp.data(), d.data());
        xp[k] = xk + h_;
        fn_(xp.data(), c.data());
        xp[l] = xl;
        xp[k] = xk;
        for (int i = 0; i < nn; ++i)
          ddg[(static_cast<size_t>(l) * n_ + k) * nn + i] =
              (a[i] - b[i] - c[i] + d[i]) / (4.0 * h_ * h_);
      }
    }
}

namespace {

struct GenericWorkspace {
  int n;
  std::vector<double> g, ginv, dg, ddg, gamma, dgamma;

  GenericWorkspace(const MetricField& mf, const double* x) : n(mf.dims()) {
    const size_t n2 = static_cast<size_t>(n) * n;
    g.resize(n2);
    ginv.resize(n2);
    dg.resize(n2 * n);
    ddg.resize(n2 * n * n);
    mf.metric(x, g.data());
    mf.metric_derivative(x, dg.data());
    Eigen::Map<const Eigen::MatrixXd> G(g.data(), n, n);
    Eigen::MatrixXd Ginv = G.partialPivLu().inverse();
    if (!Ginv.allFinite()) throw MathDomainError("metric is singular");
    Eigen::Map<Eigen::MatrixXd>(ginv.data(), n, n) = Ginv;
  }

  double dgv(int k, int i, int j) const { return dg[(static_cast<size_t>(k) * n + i) * n + j]; }
  double ddgv(int l, int k, int i, int j) const {
    return ddg[((static_cast<size_t>(l) * n + k) * n + i) * n + j];
  }
  double gi(int i, int j) const { return ginv[static_cast<size_t>(i) * n + j]; }

  // Gamma^i_{jm} = (1/2) g^{il} (d_j g_{lm} + d_m g_{jl} - d_l g_{jm})
  void build_christoffel() {
    gamma.assign(static_cast<size_t>(n) * n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) {
          double s = 0.0;
          for (int l = 0; l < n; ++l)
            s += gi(i, l) * (dgv(j, l, m) + dgv(m, j, l) - dgv(l, j, m));
          gamma[(static_cast<size_t>(i) * n + j) * n + m] = 0.5 * s;
        }
  }

  // d_k Gamma^i_{jm}, using d_k g^{il} = -g^{ia} (d_k g_{ab}) g^{bl}.
  void build_christoffel_derivative(const MetricField& mf, const double* x) {
    mf.metric_second_derivative(x, ddg.data());
    dgamma.assign(static_cast<size_t>(n) * n * n * n, 0.0);
    std::vector<double> dginv(static_cast<size_t>(n) * n * n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += gi(i, a) * dgv(k, a, b) * gi(b, l);
          dginv[(static_cast<size_t>(k) * n + i) * n + l] = -s;
        }
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int m = 0; m < n; ++m) {
            double s = 0.0;
            for (int l = 0; l < n; ++l) {
              s += dginv[(static_cast<size_t>(k) * n + i) * n + l] *
                   (dgv(j, l, m) + dgv(m, j, l) - dgv(l, j, m));
              s += gi(i, l) * (ddgv(k, j, l, m) + ddgv(k, m, j, l) - ddgv(k, l, j, m));
            }
            dgamma[((static_cast<size_t>(k) * n + i) * n + j) * n + m] = 0.5 * s;
          }
  }

  double ga(int i, int j, int m) const { return gamma[(static_cast<size_t>(i) * n + j) * n + m]; }
  double dga(int k, int i, int j, int m) const {
    return dgamma[((static_cast<size_t>(k) * n + i) * n + j) * n + m];
  }
};

}  // namespace

void generic_christoffel(const MetricField& mf, const double* x, double* gamma) {
  GenericWorkspace ws(mf, x);
  ws.build_christoffel();
  std::copy(ws.gamma.begin(), ws.gamma.end(), gamma);
}

void generic_riemann(const MetricField& mf, const double* x, double* riem) {
  GenericWorkspace ws(mf, x);
  ws.build_christoffel();
  ws.build_christoffel_derivative(mf, x);
  const int n = ws.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) {
          double v = ws.dga(k, i, m, j) - ws.dga(m, i, k, j);
          for (int l = 0; l < n; ++l)
            v += ws.ga(i, k, l) * ws.ga(l, m, j) - ws.ga(i, m, l) * ws.ga(l, k, j);
          riem[((static_cast<size_t>(i) * n + j) * n + k) * n + m] = v;
        }
}

void generic_ricci(const MetricField& mf, const double* x, double* ricci) {
  const int n = mf.dims();
  std::vector<double> riem(static_cast<size_t>(n) * n * n * n);
  generic_riemann(mf, x, riem.data());
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        s += riem[((static_cast<size_t>(i) * n + j) * n + i) * n + m];
      ricci[static_cast<size_t>(j) * n + m] = s;
    }
}

double generic_ricci_scalar(const MetricField& mf, const std::vector<double>& x) {
  const int n = mf.dims();
  std::vector<double> ricci(static_cast<size_t>(n) * n);
  generic_ricci(mf, x.data(), ricci.data());
  std::vector<double> g(static_cast<size_t>(n) * n);
  mf.metric(x.data(), g.data());
  Eigen::Map<const Eigen::MatrixXd> G(g.data(), n, n);
  Eigen::MatrixXd Ginv = G.partialPivLu().inverse();
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m) s += Ginv(j, m) * ricci[static_cast<size_t>(j) * n + m];
  return s;
}

}  // namespace jacobi
