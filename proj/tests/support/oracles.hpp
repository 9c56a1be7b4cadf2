#pragma once

// Independent reference computations for tests. Nothing here calls the
// library's closed forms.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <algorithm>
#include <string>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

namespace oracle {

inline double normal_pdf(double sigma, double x) {
  return std::exp(-0.5 * (x / sigma) * (x / sigma)) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

/// Adaptive Gauss-Kronrod integral of f over [a, b], split at `breaks`.
inline double integrate(const std::function<double(double)>& f, std::vector<double> pts,
                        double tol = 1e-13) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] <= pts[i]) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, pts[i], pts[i + 1],
                                                                           15, tol);
  }
  return total;
}

/// int_0^inf G(sigma, x - u) exp(-u / tau) du by quadrature over the
/// integrand's effective support.
inline double gauss_exp_convolution(double sigma, double tau, double x) {
  auto f = [&](double u) { return normal_pdf(sigma, x - u) * std::exp(-u / tau); };
  // The integrand is a Gaussian in u centred at x - sigma^2 / tau.
  const double centre = x - sigma * sigma / tau;
  std::vector<double> pts{0.0};
  for (double k : {-40.0, -10.0, -3.0, 0.0, 3.0, 10.0, 40.0}) {
    const double p = centre + k * sigma;
    if (p > 0.0) pts.push_back(p);
  }
  const double end = std::max(centre + 40.0 * sigma, 0.0) + 60.0 * tau;
  pts.push_back(end);
  std::sort(pts.begin(), pts.end());
  return integrate(f, pts);
}

/// Numeric convolution (f * G(sigma_ref))(t) over [lo, hi] with breakpoints.
inline double convolve(const std::function<double(double)>& f, double sigma_ref, double t,
                       std::vector<double> pts) {
  auto g = [&](double s) { return f(s) * normal_pdf(sigma_ref, t - s); };
  for (double k : {-12.0, -4.0, 0.0, 4.0, 12.0}) pts.push_back(t + k * sigma_ref);
  std::sort(pts.begin(), pts.end());
  return integrate(g, pts);
}

/// O(N1 N2) pair count of t1 - t2 in half-open bins.
inline std::vector<std::uint64_t> brute_force_histogram(const std::vector<std::int64_t>& a,
                                                        const std::vector<std::int64_t>& b,
                                                        std::int64_t lo, std::int64_t hi,
                                                        std::int64_t w) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>((hi - lo) / w), 0);
  for (const auto t1 : a) {
    for (const auto t2 : b) {
      const auto dt = t1 - t2;
      if (dt >= lo && dt < hi) ++counts[static_cast<std::size_t>((dt - lo) / w)];
    }
  }
  return counts;
}

/// FWHM by scanning a dense grid: outermost grid points at or above half max.
inline double grid_fwhm(const std::function<double(double)>& f, double lo, double hi,
                        double step) {
  double peak = 0.0;
  for (double t = lo; t <= hi; t += step) peak = std::max(peak, f(t));
  double left = hi;
  double right = lo;
  for (double t = lo; t <= hi; t += step) {
    if (f(t) >= 0.5 * peak) {
      left = std::min(left, t);
      right = std::max(right, t);
    }
  }
  return right - left;
}

/// Regularized upper incomplete gamma Q(a, x) for chi-square p-values.
inline double chi2_survival(double chi2, double dof) {
  return boost::math::gamma_q(0.5 * dof, 0.5 * chi2);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::path(JITTERKIT_TEST_TMP) / name;
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
