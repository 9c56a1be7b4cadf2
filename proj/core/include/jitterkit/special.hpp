#pragma once

namespace jitterkit {

/// Scaled complementary error function exp(x^2) * erfc(x). Finite for all
/// x >= -26; accurate to a few ulp relative for x >= 0.
double erfcx(double x);

/// Standard normal density scaled to width sigma: exp(-x^2 / 2 sigma^2) / sqrt(2 pi sigma^2).
double gaussian_density(double sigma, double x);

/// Gaussian convolved with the one-sided unnormalized exponential
/// 1{u >= 0} exp(-u / tau); integrates to tau. Overflow-free for any finite
/// x, sigma, tau > 0.
double gauss_exp_convolution(double sigma, double tau, double x);

}  // namespace jitterkit
