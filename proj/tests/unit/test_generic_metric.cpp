#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "jacobi/generic_metric.hpp"
#include "jacobi/geometry.hpp"
#include "jacobi/potential.hpp"

using namespace jacobi;

namespace {

SystemSpec random_poly_system(std::mt19937& gen, int n) {
  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  std::string src;
  for (int i = 1; i <= n; ++i) {
    std::string xi = "x" + std::to_string(i);
    if (i > 1) src += " + ";
    src += std::to_string(coef(gen)) + "*" + xi + "^2";
    src += " + " + std::to_string(coef(gen)) + "*" + xi + "^3";
    if (i < n) src += " + " + std::to_string(coef(gen)) + "*" + xi + "*x" + std::to_string(i + 1);
  }
  SystemSpec s;
  s.n = n;
  s.energy = 4.0;
  s.potential = make_expr_potential(src, n);
  return s;
}

// Round sphere of radius a in angle coordinates (x1, x2) = (theta, phi):
// g = diag(a^2, a^2 sin^2 theta). Scalar curvature must come out 2/a^2.
class SphereMetric : public MetricField {
 public:
  explicit SphereMetric(double a) : a2_(a * a) {}
  int dims() const override { return 2; }
  void metric(const double* x, double* g) const override {
    double s = std::sin(x[0]);
    g[0] = a2_;
    g[1] = g[2] = 0.0;
    g[3] = a2_ * s * s;
  }
  void metric_derivative(const double* x, double* dg) const override {
    std::fill(dg, dg + 8, 0.0);
    dg[3] = a2_ * 2.0 * std::sin(x[0]) * std::cos(x[0]);  // d_theta g_22
  }
  void metric_second_derivative(const double* x, double* ddg) const override {
    std::fill(ddg, ddg + 16, 0.0);
    double c2 = std::cos(2.0 * x[0]);
    ddg[3] = a2_ * 2.0 * c2;  // d_theta d_theta g_22
  }

 private:
  double a2_;
};

}  // namespace

TEST_CASE("generic machinery reproduces the round-sphere scalar") {
  SphereMetric m(1.7);
  std::vector<double> x{1.1, 0.4};
  CHECK(generic_ricci_scalar(m, x) == doctest::Approx(2.0 / (1.7 * 1.7)).epsilon(1e-10));
}

TEST_CASE("closed-form tensors agree with the generic route") {
  std::mt19937 gen(2026);
  for (int n : {2, 3}) {
    for (int rep = 0; rep < 4; ++rep) {
      SystemSpec s = random_poly_system(gen, n);
      std::uniform_real_distribution<double> pos(-0.4, 0.4);
      std::vector<double> x(n);
      for (double& c : x) c = pos(gen);

      JacobiMetricField mf(s);
      std::vector<double> gam_g(n * n * n), riem_g(n * n * n * n), ric_g(n * n);
      generic_christoffel(mf, x.data(), gam_g.data());
      generic_riemann(mf, x.data(), riem_g.data());
      generic_ricci(mf, x.data(), ric_g.data());

      std::vector<double> gam = christoffel(s, x);
      std::vector<double> riem = riemann(s, x);
      std::vector<double> ric = ricci_tensor(s, x);
      for (size_t i = 0; i < gam.size(); ++i) CHECK(gam[i] == doctest::Approx(gam_g[i]).epsilon(1e-10));
      for (size_t i = 0; i < riem.size(); ++i)
        CHECK(riem[i] == doctest::Approx(riem_g[i]).epsilon(1e-10));
      for (size_t i = 0; i < ric.size(); ++i) CHECK(ric[i] == doctest::Approx(ric_g[i]).epsilon(1e-10));

      ScalarReadings r = ricci_scalar_readings(s, x);
      CHECK(generic_ricci_scalar(mf, x) == doctest::Approx(r.metric).epsilon(1e-10));
    }
  }
}

TEST_CASE("finite-difference metric derivatives track the analytic ones") {
  SystemSpec s;
  s.n = 2;
  s.energy = 3.0;
  s.potential = make_expr_potential("0.4*x1^2 + 0.3*x2^2 + 0.2*x1*x2^2", 2);
  std::vector<double> x{0.25, -0.35};

  JacobiMetricField exact(s);
  NumericalMetricDerivs approx(2, [&](const double* p, double* g) { exact.metric(p, g); });
  std::vector<double> ra(16), rb(16);
  generic_riemann(exact, x.data(), ra.data());
  generic_riemann(approx, x.data(), rb.data());
  for (int i = 0; i < 16; ++i) CHECK(ra[i] == doctest::Approx(rb[i]).epsilon(5e-5));
  CHECK(generic_ricci_scalar(approx, x) ==
        doctest::Approx(generic_ricci_scalar(exact, x)).epsilon(5e-6));
}

TEST_CASE("curvature bundle is internally consistent") {
  SystemSpec s;
  s.n = 3;
  s.energy = 2.0;
  s.potential = make_expr_potential("0.5*(x1^2+x2^2+x3^2)", 3);
  std::vector<double> x{0.0, 0.0, 0.0};
  CurvatureBundle b = curvature_bundle(s, x);
  CHECK(b.scalar_flat_trace == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(b.scalar_laplacian_form == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(b.scalar_oracle == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(b.metric[0] == doctest::Approx(4.0));  // 2*(E - V) on the diagonal
  CHECK(b.riemann.size() == 81);
}
