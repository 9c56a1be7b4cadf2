#include <doctest.h>

#include <cmath>
#include <limits>

#include "jitterkit/special.hpp"
#include "oracles.hpp"

using namespace jitterkit;

namespace {
// exp(x^2) erfc(x) to 20 digits, computed with arbitrary-precision arithmetic.
struct Frozen {
  double x;
  double value;
};
constexpr Frozen kErfcx[] = {
    {-3.0, 16205.988853999586625},      {-0.5, 1.9523604891825570933},
    {0.0, 1.0},                         {0.5, 0.61569034419292587487},
    {1.0, 0.42758357615580700441},      {3.0, 0.17900115118138995042},
    {5.5, 0.10096221839949908823},      {10.0, 0.056140992743822585858},
    {25.9, 0.021767181150738212562},    {26.1, 0.021600627726346206602},
    {50.0, 0.0112815362653237725},      {1000.0, 0.0005641893014533876542},
};
}  // namespace

TEST_CASE("erfcx against high-precision values") {
  for (const auto& f : kErfcx) {
    CAPTURE(f.x);
    CHECK(std::abs(erfcx(f.x) - f.value) <= 1e-13 * f.value);
  }
}

TEST_CASE("erfcx is continuous across the continued-fraction switch") {
  const double below = erfcx(std::nextafter(26.0, 0.0));
  const double above = erfcx(26.0);
  CHECK(std::abs(below - above) <= 1e-13 * above);
  // Asymptote 1 / (x sqrt(pi)).
  CHECK(erfcx(1e8) * 1e8 * std::sqrt(std::numbers::pi) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Gaussian density") {
  CHECK(gaussian_density(1.0, 0.0) == doctest::Approx(0.3989422804014327));
  CHECK(gaussian_density(20.0, 13.0) == doctest::Approx(oracle::normal_pdf(20.0, 13.0)));
  CHECK(oracle::integrate([](double x) { return gaussian_density(7.0, x); }, {-200, 0, 200}) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Gaussian-exponential convolution against quadrature") {
  // Frozen high-precision points.
  CHECK(gauss_exp_convolution(20.0, 100.0, 50.0) ==
        doctest::Approx(0.61214749063282607131).epsilon(1e-13));
  CHECK(gauss_exp_convolution(1000.0, 1.0, -500.0) ==
        doctest::Approx(0.00035188903053655996814).epsilon(1e-12));

  for (double sigma : {3.0, 20.0, 80.0}) {
    for (double tau : {5.0, 100.0, 600.0}) {
      for (double x : {-200.0, -40.0, 0.0, 15.0, 90.0, 400.0, 2000.0}) {
        CAPTURE(sigma);
        CAPTURE(tau);
        CAPTURE(x);
        const double ref = oracle::gauss_exp_convolution(sigma, tau, x);
        const double got = gauss_exp_convolution(sigma, tau, x);
        CHECK(std::abs(got - ref) <= 1e-10 * std::max(ref, 1e-300) + 1e-300);
      }
    }
  }
}

TEST_CASE("Gaussian-exponential convolution integrates to tau") {
  const double sigma = 20.0;
  const double tau = 300.0;
  const double area = oracle::integrate(
      [&](double x) { return gauss_exp_convolution(sigma, tau, x); },
      {-400.0, -50.0, 0.0, 50.0, 300.0, 1500.0, 20000.0});
  CHECK(area == doctest::Approx(tau).epsilon(1e-10));
}

TEST_CASE("no overflow in extreme regimes") {
  const double inf = std::numeric_limits<double>::infinity();
  for (double sigma : {0.01, 1.0, 1e4}) {
    for (double tau : {0.01, 1.0, 1e4}) {
      for (double x : {-1e6, -1e3, -1.0, 0.0, 1.0, 1e3, 1e6}) {
        const double v = gauss_exp_convolution(sigma, tau, x);
        CAPTURE(sigma);
        CAPTURE(tau);
        CAPTURE(x);
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
        CHECK(v != inf);
      }
    }
  }
  // sigma / tau = 1000 with the naive form would need exp(5e5).
  CHECK(std::isfinite(gauss_exp_convolution(1000.0, 1.0, 0.0)));
  CHECK(gauss_exp_convolution(1000.0, 1.0, 0.0) > 0.0);
}
