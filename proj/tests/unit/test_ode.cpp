#include <cmath>
#include <vector>

#include "doctest.h"
#include "jacobi/ode.hpp"

using namespace jacobi;

TEST_CASE("exponential growth to requested accuracy") {
  double y = 1.0;
  OdeOptions opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-14;
  OdeStats st = integrate_rk45([](double, const double* y, double* dy) { dy[0] = y[0]; }, 0.0, 1.0,
                               &y, 1, opt);
  CHECK(y == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(st.accepted > 0);
}

TEST_CASE("oscillator keeps its energy over many periods") {
  double y[2] = {1.0, 0.0};
  OdeOptions opt;
  opt.rtol = 1e-9;
  opt.atol = 1e-12;
  integrate_rk45(
      [](double, const double* y, double* dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
      },
      0.0, 20.0 * M_PI, y, 2, opt);
  CHECK(y[0] * y[0] + y[1] * y[1] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(y[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("error control restricted to the leading block") {
  // reference run: controller sees one component
  auto rhs1 = [](double, const double* y, double* dy) { dy[0] = y[0]; };
  double a = 1.0;
  OdeOptions opt;
  opt.rtol = 1e-8;
  opt.atol = 1e-12;
  OdeStats ref = integrate_rk45(rhs1, 0.0, 1.0, &a, 1, opt);

  // same leading component plus a fast passenger; err_dim hides the passenger,
  // so the step sequence must be the one the reference run chose
  auto rhs2 = [](double t, const double* y, double* dy) {
    dy[0] = y[0];
    dy[1] = 40.0 * std::cos(40.0 * t);
  };
  double y[2] = {1.0, 0.0};
  OdeOptions masked = opt;
  masked.err_dim = 1;
  OdeStats st = integrate_rk45(rhs2, 0.0, 1.0, y, 2, masked);
  CHECK(st.accepted == ref.accepted);
  CHECK(st.rejected == ref.rejected);
  CHECK(y[0] == doctest::Approx(a).epsilon(1e-15));
  CHECK(y[1] == doctest::Approx(std::sin(40.0)).epsilon(1e-2));

  // with full error control the passenger forces more steps
  double z[2] = {1.0, 0.0};
  OdeStats full = integrate_rk45(rhs2, 0.0, 1.0, z, 2, opt);
  CHECK(full.accepted > st.accepted);
}

TEST_CASE("step budget exhaustion raises non-convergence") {
  double y = 1.0;
  OdeOptions opt;
  opt.max_steps = 3;
  opt.rtol = 1e-12;
  CHECK_THROWS_AS(integrate_rk45([](double, const double* y, double* dy) { dy[0] = 100.0 * y[0]; },
                                 0.0, 10.0, &y, 1, opt),
                  NonConvergenceError);
}

TEST_CASE("right-hand-side exceptions pass through") {
  double y = 1.0;
  OdeOptions opt;
  CHECK_THROWS_AS(integrate_rk45(
                      [](double t, const double* y, double* dy) {
                        if (t > 0.5) throw MathDomainError("field blew up");
                        dy[0] = y[0];
                      },
                      0.0, 1.0, &y, 1, opt),
                  MathDomainError);
}
