#include "jitterkit/special.hpp"

#include <cmath>
#include <numbers>

namespace jitterkit {

double erfcx(double x) {
  if (x < 26.0) return std::exp(x * x) * std::erfc(x);
  // Continued fraction erfc(x) exp(x^2) = 1/sqrt(pi) * 1/(x + 1/2/(x + 1/(x + 3/2/(x + ...)))),
  // evaluated bottom-up; 60 levels are far beyond double precision at x >= 26.
  double tail = x;
  for (int k = 60; k >= 1; --k) tail = x + (0.5 * k) / tail;
  return 1.0 / (std::sqrt(std::numbers::pi) * tail);
}

double gaussian_density(double sigma, double x) {
  const double z = x / sigma;
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

double gauss_exp_convolution(double sigma, double tau, double x) {
  // h(x) = 1/2 exp(sigma^2 / 2tau^2 - x/tau) erfc(z),  z = (sigma/tau - x/sigma) / sqrt(2).
  // With z^2 = sigma^2/2tau^2 - x/tau + x^2/2sigma^2 the prefactor for z >= 0 is
  // rewritten as exp(-x^2/2sigma^2) erfcx(z), which never overflows.
  const double z = (sigma / tau - x / sigma) / std::numbers::sqrt2;
  if (z >= 0.0) {
    const double g = x / sigma;
    return 0.5 * std::exp(-0.5 * g * g) * erfcx(z);
  }
  const double r = sigma / tau;
  return 0.5 * std::exp(0.5 * r * r - x / tau) * std::erfc(z);
}

}  // namespace jitterkit
