#include "jitterkit/models.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "jitterkit/error.hpp"
#include "jitterkit/special.hpp"

namespace jitterkit {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double quadrature_width(double sigma, double sigma_ref) {
  return std::sqrt(sigma * sigma + sigma_ref * sigma_ref);
}

struct SearchSpan {
  double lo;
  double hi;
  double finest;  // narrowest feature scale
};

SearchSpan span_of(const ResponseModel& m) {
  return std::visit(
      overloaded{
          [](const Gaussian& g) {
            return SearchSpan{g.mu - 10 * g.sigma, g.mu + 10 * g.sigma, g.sigma};
          },
          [](const GaussExpTail& g) {
            const double tail = g.B > 0.0 ? 40.0 * g.tau : 0.0;
            return SearchSpan{g.mu - 10 * g.sigma, g.mu + 10 * g.sigma + tail,
                              std::min(g.sigma, g.B > 0.0 ? g.tau : g.sigma)};
          },
          [](const DoubleGaussian& g) {
            double lo = g.mu1 - 10 * g.sigma1;
            double hi = g.mu1 + 10 * g.sigma1;
            double finest = g.sigma1;
            if (g.B > 0.0) {
              lo = std::min(lo, g.mu2 - 10 * g.sigma2);
              hi = std::max(hi, g.mu2 + 10 * g.sigma2);
              finest = std::min(finest, g.sigma2);
            }
            return SearchSpan{lo, hi, finest};
          },
      },
      m);
}

// Brackets a crossing of `level` between a (below) and b (above) by bisection.
template <class F>
double bisect_level(F&& f, double below, double above, double level) {
  for (int i = 0; i < 200 && std::abs(above - below) > 1e-7; ++i) {
    const double mid = 0.5 * (below + above);
    (f(mid) >= level ? above : below) = mid;
  }
  return 0.5 * (below + above);
}

}  // namespace

std::string to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::Gaussian:
      return "gauss";
    case ModelFamily::GaussExpTail:
      return "gauss-exp";
    case ModelFamily::DoubleGaussian:
      return "double-gauss";
  }
  return "unknown";
}

ModelFamily parse_model_family(const std::string& s) {
  if (s == "gauss") return ModelFamily::Gaussian;
  if (s == "gauss-exp") return ModelFamily::GaussExpTail;
  if (s == "double-gauss") return ModelFamily::DoubleGaussian;
  throw ConfigError("unknown model family '" + s + "' (expected gauss, gauss-exp, double-gauss)");
}

ModelFamily family_of(const ResponseModel& m) {
  return static_cast<ModelFamily>(m.index());
}

void validate(const ResponseModel& m) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
  };
  auto non_negative = [](double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(what) + " must be non-negative");
    }
  };
  auto finite = [](double v, const char* what) {
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + " must be finite");
  };
  std::visit(overloaded{
                 [&](const Gaussian& g) {
                   finite(g.mu, "mu");
                   positive(g.sigma, "sigma");
                 },
                 [&](const GaussExpTail& g) {
                   non_negative(g.A, "A");
                   non_negative(g.B, "B");
                   finite(g.mu, "mu");
                   positive(g.sigma, "sigma");
                   positive(g.tau, "tau");
                   positive(g.A + g.B * g.tau, "total weight A + B tau");
                 },
                 [&](const DoubleGaussian& g) {
                   positive(g.A, "A");
                   non_negative(g.B, "B");
                   finite(g.mu1, "mu1");
                   finite(g.mu2, "mu2");
                   positive(g.sigma1, "sigma1");
                   positive(g.sigma2, "sigma2");
                 },
             },
             m);
}

double total_weight(const ResponseModel& m) {
  return std::visit(overloaded{
                        [](const Gaussian&) { return 1.0; },
                        [](const GaussExpTail& g) { return g.A + g.B * g.tau; },
                        [](const DoubleGaussian& g) { return g.A + g.B; },
                    },
                    m);
}

ResponseModel normalized(const ResponseModel& m) {
  const double w = total_weight(m);
  return std::visit(overloaded{
                        [](const Gaussian& g) -> ResponseModel { return g; },
                        [w](GaussExpTail g) -> ResponseModel {
                          g.A /= w;
                          g.B /= w;
                          return g;
                        },
                        [w](DoubleGaussian g) -> ResponseModel {
                          g.A /= w;
                          g.B /= w;
                          return g;
                        },
                    },
                    m);
}

double evaluate(const ResponseModel& m, double t) {
  return std::visit(
      overloaded{
          [t](const Gaussian& g) { return gaussian_density(g.sigma, t - g.mu); },
          [t](const GaussExpTail& g) {
            const double x = t - g.mu;
            double v = g.A * gaussian_density(g.sigma, x);
            if (g.B > 0.0) v += g.B * gauss_exp_convolution(g.sigma, g.tau, x);
            return v;
          },
          [t](const DoubleGaussian& g) {
            double v = g.A * gaussian_density(g.sigma1, t - g.mu1);
            if (g.B > 0.0) v += g.B * gaussian_density(g.sigma2, t - g.mu2);
            return v;
          },
      },
      m);
}

ResponseModel convolve_with_gaussian(const ResponseModel& m, double sigma_ref) {
  if (!(sigma_ref >= 0.0)) throw ConfigError("reference width must be non-negative");
  return std::visit(overloaded{
                        [sigma_ref](Gaussian g) -> ResponseModel {
                          g.sigma = quadrature_width(g.sigma, sigma_ref);
                          return g;
                        },
                        [sigma_ref](GaussExpTail g) -> ResponseModel {
                          g.sigma = quadrature_width(g.sigma, sigma_ref);
                          return g;
                        },
                        [sigma_ref](DoubleGaussian g) -> ResponseModel {
                          g.sigma1 = quadrature_width(g.sigma1, sigma_ref);
                          g.sigma2 = quadrature_width(g.sigma2, sigma_ref);
                          return g;
                        },
                    },
                    m);
}

double predicted_c12(const ResponseModel& m, double sigma_ref, double n_pairs,
                     double floor_per_bin, double bin_width, double t) {
  if (n_pairs == 0.0) return floor_per_bin;
  const ResponseModel broadened = convolve_with_gaussian(normalized(m), sigma_ref);
  return n_pairs * bin_width * evaluate(broadened, t) + floor_per_bin;
}

FwhmResult fwhm(const ResponseModel& m) {
  validate(m);
  if (const auto* g = std::get_if<Gaussian>(&m)) {
    const double half = 0.5 * kFwhmPerSigma * g->sigma;
    return {kFwhmPerSigma * g->sigma, g->mu, g->mu - half, g->mu + half, false};
  }

  const SearchSpan span = span_of(m);
  const double step_wanted = span.finest / 8.0;
  const auto n = static_cast<std::size_t>(
      std::clamp((span.hi - span.lo) / step_wanted, 4000.0, 400000.0));
  const double step = (span.hi - span.lo) / static_cast<double>(n);
  std::vector<double> grid(n + 1);
  std::size_t imax = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    grid[i] = evaluate(m, span.lo + step * static_cast<double>(i));
    if (grid[i] > grid[imax]) imax = i;
  }

  // Golden-section refinement of the maximum inside the neighbouring cells.
  auto f = [&m](double t) { return evaluate(m, t); };
  double a = span.lo + step * static_cast<double>(imax == 0 ? 0 : imax - 1);
  double b = span.lo + step * static_cast<double>(std::min(imax + 1, n));
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-7) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const double peak_t = 0.5 * (a + b);
  const double peak = std::max(f(peak_t), grid[imax]);
  const double half = 0.5 * peak;

  std::size_t il = 0;
  while (il <= n && grid[il] < half) ++il;
  std::size_t ir = n;
  while (ir > 0 && grid[ir] < half) --ir;
  if (il == 0 || ir == n) throw SolverError("half-maximum crossing outside the search span");

  FwhmResult r;
  r.peak_time = peak_t;
  r.left = bisect_level(f, span.lo + step * static_cast<double>(il - 1),
                        span.lo + step * static_cast<double>(il), half);
  r.right = bisect_level(f, span.lo + step * static_cast<double>(ir + 1),
                         span.lo + step * static_cast<double>(ir), half);
  r.fwhm = r.right - r.left;
  for (std::size_t i = il; i <= ir; ++i) {
    if (grid[i] < half) {
      r.multimodal = true;
      break;
    }
  }
  return r;
}

double ratio_R(const GaussExpTail& m) {
  if (!(m.B > 0.0)) throw DomainError("ratio R undefined: exponential weight B is zero");
  if (!(m.tau > 0.0)) throw DomainError("ratio R undefined: tau must be positive");
  return m.A / (m.B * m.tau);
}

FigureOfMerit figure_of_merit(const ResponseModel& m) {
  FigureOfMerit fom;
  const FwhmResult w = fwhm(m);
  fom.fwhm = w.fwhm;
  fom.multimodal = w.multimodal;
  std::visit(overloaded{
                 [&](const Gaussian&) { fom.first_component_integral = 1.0; },
                 [&](const GaussExpTail& g) {
                   fom.first_component_integral = g.A;
                   fom.second_component_integral = g.B * g.tau;
                   if (g.B > 0.0) fom.ratio_R = ratio_R(g);
                 },
                 [&](const DoubleGaussian& g) {
                   fom.first_component_integral = g.A;
                   fom.second_component_integral = g.B;
                   if (g.B > 0.0) fom.ratio_R = g.A / g.B;
                 },
             },
             m);
  return fom;
}

double sample(const ResponseModel& m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  return std::visit(overloaded{
                        [&](const Gaussian& g) { return g.mu + g.sigma * normal(rng); },
                        [&](const GaussExpTail& g) {
                          const double prompt = g.A / (g.A + g.B * g.tau);
                          double t = g.mu + g.sigma * normal(rng);
                          if (uniform(rng) >= prompt) {
                            t += std::exponential_distribution<double>(1.0 / g.tau)(rng);
                          }
                          return t;
                        },
                        [&](const DoubleGaussian& g) {
                          const double first = g.A / (g.A + g.B);
                          return uniform(rng) < first ? g.mu1 + g.sigma1 * normal(rng)
                                                      : g.mu2 + g.sigma2 * normal(rng);
                        },
                    },
                    m);
}

}  // namespace jitterkit
