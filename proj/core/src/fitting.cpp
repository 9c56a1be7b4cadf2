#include "jitterkit/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jitterkit/error.hpp"
#include "jitterkit/special.hpp"

namespace jitterkit {
namespace {

constexpr double kMinWidth = 1e-3;  // ps

std::size_t parameter_count(ModelFamily f) {
  switch (f) {
    case ModelFamily::Gaussian:
      return 4;
    case ModelFamily::GaussExpTail:
      return 6;
    case ModelFamily::DoubleGaussian:
      return 7;
  }
  return 0;
}

void clamp_to_domain(ModelFamily f, std::vector<double>& p) {
  p[0] = std::max(p[0], 0.0);
  p[1] = std::max(p[1], 0.0);
  switch (f) {
    case ModelFamily::Gaussian:
      p[3] = std::max(p[3], kMinWidth);
      break;
    case ModelFamily::GaussExpTail:
      p[3] = std::max(p[3], kMinWidth);
      p[4] = std::max(p[4], kMinWidth);
      p[5] = std::max(p[5], 0.0);
      break;
    case ModelFamily::DoubleGaussian:
      p[3] = std::max(p[3], kMinWidth);
      p[5] = std::max(p[5], kMinWidth);
      p[6] = std::clamp(p[6], 1e-9, 1.0 - 1e-9);
      break;
  }
}

struct Selection {
  std::vector<double> t;
  std::vector<double> y;
};

Selection select(const BinnedData& data, const FitOptions& options) {
  Selection s;
  for (std::size_t i = 0; i < data.counts.size(); ++i) {
    const double c = data.center(i);
    if (options.fit_range && !(c >= options.fit_range->lo_ps && c < options.fit_range->hi_ps)) {
      continue;
    }
    s.t.push_back(c);
    s.y.push_back(data.counts[i]);
  }
  return s;
}

double cost_of(const Selection& s, ModelFamily family, std::span<const double> p,
               double sigma_ref, double width) {
  double cost = 0.0;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    const double r = s.y[i] - predicted_counts(family, p, sigma_ref, width, s.t[i]);
    cost += r * r / std::max(s.y[i], 1.0);
  }
  return cost;
}

// Normal matrix J^T W J and gradient J^T W r at p.
void normal_equations(const Selection& s, ModelFamily family, const std::vector<double>& p,
                      double sigma_ref, double width, Eigen::MatrixXd& a, Eigen::VectorXd& g) {
  const auto n = static_cast<Eigen::Index>(p.size());
  a.setZero(n, n);
  g.setZero(n);
  Eigen::VectorXd row(n);
  std::vector<double> grad(p.size());
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    const double f = predicted_counts(family, p, sigma_ref, width, s.t[i], grad);
    const double w = 1.0 / std::max(s.y[i], 1.0);
    for (Eigen::Index k = 0; k < n; ++k) row[k] = grad[static_cast<std::size_t>(k)];
    a.selfadjointView<Eigen::Lower>().rankUpdate(row, w);
    g += row * (w * (s.y[i] - f));
  }
  a = a.selfadjointView<Eigen::Lower>();
}

[[noreturn]] void degenerate(ModelFamily family, const Eigen::VectorXd& direction,
                             const std::string& why) {
  const auto names = parameter_names(family);
  std::ostringstream msg;
  msg << "degenerate fit (" << why << "): parameters {";
  bool first = true;
  const double scale = direction.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < direction.size(); ++k) {
    if (std::abs(direction[k]) >= 0.25 * scale) {
      msg << (first ? "" : ", ") << names[static_cast<std::size_t>(k)];
      first = false;
    }
  }
  msg << "} are not separately identifiable";
  throw FitError(msg.str());
}

Eigen::MatrixXd checked_inverse(ModelFamily family, const Eigen::MatrixXd& a) {
  const auto n = a.rows();
  Eigen::VectorXd d(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(a(k, k) > 0.0)) {
      degenerate(family, Eigen::VectorXd::Unit(n, k), "parameter does not affect the model");
    }
    d[k] = 1.0 / std::sqrt(a(k, k));
  }
  const Eigen::MatrixXd scaled = d.asDiagonal() * a * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 1e-13 * hi)) {
    Eigen::Index imin = 0;
    eig.eigenvalues().minCoeff(&imin);
    degenerate(family, eig.eigenvectors().col(imin), "singular normal matrix");
  }
  const Eigen::MatrixXd inv_scaled =
      eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
      eig.eigenvectors().transpose();
  return d.asDiagonal() * inv_scaled * d.asDiagonal();
}

double moving_average(const std::vector<double>& c, std::size_t i, std::size_t half) {
  const std::size_t lo = i >= half ? i - half : 0;
  const std::size_t hi = std::min(c.size() - 1, i + half);
  double s = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) s += c[k];
  return s / static_cast<double>(hi - lo + 1);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

void validate(const JitterValue& j) {
  if (!(j.sigma >= 0.0) || !std::isfinite(j.sigma)) throw DomainError("jitter must be >= 0");
  if (!(j.sigma_err >= 0.0)) throw DomainError("jitter uncertainty must be >= 0");
}

JitterValue subtract_reference(const JitterValue& combined, const JitterValue& reference) {
  validate(combined);
  validate(reference);
  if (!(combined.sigma > reference.sigma)) {
    throw DomainError("unphysical subtraction: reference jitter " +
                      std::to_string(reference.sigma) + " ps is not below the combined width " +
                      std::to_string(combined.sigma) + " ps");
  }
  JitterValue out;
  // (a - b)(a + b) keeps the difference accurate when the widths are close.
  out.sigma = std::sqrt((combined.sigma - reference.sigma) * (combined.sigma + reference.sigma));
  out.sigma_err =
      std::hypot(combined.sigma * combined.sigma_err, reference.sigma * reference.sigma_err) /
      out.sigma;
  out.wavelength_nm = combined.wavelength_nm;
  return out;
}

BinnedData BinnedData::from(const CorrelationHistogram& h) {
  BinnedData d;
  // Integer dt = k stands for the continuous cell [k - 1/2, k + 1/2), so the
  // bin holding k = lo .. lo + w - 1 is centred half a picosecond low.
  d.lo = static_cast<double>(h.window_lo_ps) - 0.5;
  d.width = static_cast<double>(h.bin_width_ps);
  d.counts.assign(h.counts.begin(), h.counts.end());
  return d;
}

std::vector<std::string> parameter_names(ModelFamily family) {
  switch (family) {
    case ModelFamily::Gaussian:
      return {"N", "C0", "mu", "sigma"};
    case ModelFamily::GaussExpTail:
      return {"N", "C0", "mu", "sigma", "tau", "R"};
    case ModelFamily::DoubleGaussian:
      return {"N", "C0", "mu1", "sigma1", "mu2", "sigma2", "w"};
  }
  return {};
}

ResponseModel model_from_parameters(ModelFamily family, std::span<const double> p) {
  if (p.size() != parameter_count(family)) throw ConfigError("wrong parameter count for family");
  switch (family) {
    case ModelFamily::Gaussian:
      return Gaussian{p[2], p[3]};
    case ModelFamily::GaussExpTail: {
      const double r = p[5];
      const double tau = p[4];
      return GaussExpTail{r / (1.0 + r), 1.0 / (tau * (1.0 + r)), p[2], p[3], tau};
    }
    case ModelFamily::DoubleGaussian:
      return DoubleGaussian{p[6], 1.0 - p[6], p[2], p[3], p[4], p[5]};
  }
  throw ConfigError("unknown model family");
}

std::vector<double> parameters_from_model(const ResponseModel& m, double n_pairs,
                                          double floor_per_bin) {
  validate(m);
  if (const auto* g = std::get_if<Gaussian>(&m)) return {n_pairs, floor_per_bin, g->mu, g->sigma};
  if (const auto* g = std::get_if<GaussExpTail>(&m)) {
    return {n_pairs, floor_per_bin, g->mu, g->sigma, g->tau, ratio_R(*g)};
  }
  const auto& g = std::get<DoubleGaussian>(m);
  return {n_pairs, floor_per_bin, g.mu1, g.sigma1, g.mu2, g.sigma2, g.A / (g.A + g.B)};
}

double predicted_counts(ModelFamily family, std::span<const double> p, double sigma_ref,
                        double bin_width, double t, std::span<double> gradient) {
  const double n = p[0];
  const double c0 = p[1];
  const double nd = n * bin_width;
  const bool want = !gradient.empty();
  const double sr2 = sigma_ref * sigma_ref;

  switch (family) {
    case ModelFamily::Gaussian: {
      const double sigma = p[3];
      const double s = std::sqrt(sigma * sigma + sr2);
      const double x = t - p[2];
      const double g = gaussian_density(s, x);
      if (want) {
        gradient[0] = bin_width * g;
        gradient[1] = 1.0;
        gradient[2] = nd * g * x / (s * s);
        gradient[3] = nd * g * (x * x / (s * s) - 1.0) / s * (sigma / s);
      }
      return nd * g + c0;
    }
    case ModelFamily::GaussExpTail: {
      const double sigma = p[3];
      const double tau = p[4];
      const double r = p[5];
      const double s = std::sqrt(sigma * sigma + sr2);
      const double x = t - p[2];
      const double g = gaussian_density(s, x);
      const double h = gauss_exp_convolution(s, tau, x);
      const double q = h / tau;
      const double norm = 1.0 / (1.0 + r);
      const double f = (r * g + q) * norm;
      if (want) {
        const double dg_dx = -x / (s * s) * g;
        const double dq_dx = (g - q) / tau;
        const double dg_ds = g * (x * x / (s * s) - 1.0) / s;
        const double dh_ds = -(x / s) * g - s * (g - q) / tau;
        const double dh_dtau = h * (x / (tau * tau) - s * s / (tau * tau * tau)) +
                               (s * s) / (tau * tau) * g;
        const double dq_dtau = dh_dtau / tau - h / (tau * tau);
        gradient[0] = bin_width * f;
        gradient[1] = 1.0;
        gradient[2] = -nd * (r * dg_dx + dq_dx) * norm;
        gradient[3] = nd * (r * dg_ds + dh_ds / tau) * norm * (sigma / s);
        gradient[4] = nd * dq_dtau * norm;
        gradient[5] = nd * (g - q) * norm * norm;
      }
      return nd * f + c0;
    }
    case ModelFamily::DoubleGaussian: {
      const double w = p[6];
      const double s1 = std::sqrt(p[3] * p[3] + sr2);
      const double s2 = std::sqrt(p[5] * p[5] + sr2);
      const double x1 = t - p[2];
      const double x2 = t - p[4];
      const double g1 = gaussian_density(s1, x1);
      const double g2 = gaussian_density(s2, x2);
      const double f = w * g1 + (1.0 - w) * g2;
      if (want) {
        gradient[0] = bin_width * f;
        gradient[1] = 1.0;
        gradient[2] = nd * w * g1 * x1 / (s1 * s1);
        gradient[3] = nd * w * g1 * (x1 * x1 / (s1 * s1) - 1.0) / s1 * (p[3] / s1);
        gradient[4] = nd * (1.0 - w) * g2 * x2 / (s2 * s2);
        gradient[5] = nd * (1.0 - w) * g2 * (x2 * x2 / (s2 * s2) - 1.0) / s2 * (p[5] / s2);
        gradient[6] = nd * (g1 - g2);
      }
      return nd * f + c0;
    }
  }
  return c0;
}

double weighted_cost(const BinnedData& data, ModelFamily family, std::span<const double> p,
                     double sigma_ref) {
  return cost_of(select(data, {}), family, p, sigma_ref, data.width);
}

InitialGuess initial_guess(const CorrelationHistogram& h, ModelFamily family, double sigma_ref) {
  return initial_guess(BinnedData::from(h), family, sigma_ref);
}

InitialGuess initial_guess(const BinnedData& data, ModelFamily family, double sigma_ref) {
  const auto& c = data.counts;
  const std::size_t nb = c.size();
  if (nb < 20) throw InsufficientDataError("histogram too short for an initial guess");

  // Floor from the outer 15% on each side.
  const std::size_t edge = std::max<std::size_t>(nb * 15 / 100, 1);
  std::vector<double> side(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(edge));
  side.insert(side.end(), c.end() - static_cast<std::ptrdiff_t>(edge), c.end());
  const double floor = median_of(side);

  const double max_bin = *std::max_element(c.begin(), c.end());
  if (!(max_bin > floor + 5.0 * std::sqrt(floor))) {
    throw InsufficientDataError(
        "no discernible coincidence peak above the accidental floor; acquire longer");
  }

  std::vector<double> smooth(nb);
  for (std::size_t i = 0; i < nb; ++i) smooth[i] = moving_average(c, i, 2);
  const std::size_t ipk =
      static_cast<std::size_t>(std::max_element(smooth.begin(), smooth.end()) - smooth.begin());
  const double peak = smooth[ipk];
  const double level = floor + 0.5 * (peak - floor);

  auto crossing = [&](std::size_t from, int dir) {
    std::size_t i = from;
    while (true) {
      if (dir < 0 && i == 0) return data.lo;
      if (dir > 0 && i + 1 >= nb) return data.lo + data.width * static_cast<double>(nb);
      const std::size_t j = dir < 0 ? i - 1 : i + 1;
      if (smooth[j] < level) {
        const double frac = (smooth[i] - level) / (smooth[i] - smooth[j]);
        return data.center(i) + dir * frac * data.width;
      }
      i = j;
    }
  };
  const double left = crossing(ipk, -1);
  const double right = crossing(ipk, +1);
  const double sigma_obs = std::max((right - left) / kFwhmPerSigma, 0.5 * data.width);
  const double sigma_dut = std::sqrt(
      std::max(sigma_obs * sigma_obs - sigma_ref * sigma_ref, 0.0625 * sigma_obs * sigma_obs));

  double n_pairs = 0.0;
  for (const double v : c) n_pairs += v - floor;
  if (!(n_pairs > 0.0)) {
    throw InsufficientDataError("background-subtracted coincidence count is not positive");
  }

  InitialGuess guess;
  guess.family = family;
  double mu = data.center(ipk);
  if (ipk == 0 || ipk + 1 == nb) {
    guess.mu_at_window_edge = true;
    guess.notes.push_back("coincidence peak at the histogram edge; mu clamped to the window");
    const double lo = data.lo + 0.5 * data.width;
    const double hi = data.lo + (static_cast<double>(nb) - 0.5) * data.width;
    mu = std::clamp(mu, lo, hi);
  }

  switch (family) {
    case ModelFamily::Gaussian:
      guess.parameters = {n_pairs, floor, mu, sigma_dut};
      break;
    case ModelFamily::GaussExpTail: {
      // Slope of log(counts - floor) on the right flank beyond 2 sigma.
      const double noise = 3.0 * std::sqrt(floor + 1.0);
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int m = 0;
      for (std::size_t i = ipk; i < nb; ++i) {
        const double t = data.center(i);
        if (t < mu + 2.0 * sigma_obs) continue;
        const double excess = smooth[i] - floor;
        if (excess <= noise) break;
        const double y = std::log(excess);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++m;
      }
      double tau = sigma_obs;
      if (m >= 5) {
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        if (slope < 0.0) tau = -1.0 / slope;
      } else {
        guess.notes.push_back("right tail too short for a slope estimate; tau seeded at sigma");
      }
      const double span = data.width * static_cast<double>(nb);
      tau = std::clamp(tau, 0.25 * sigma_obs, span);
      guess.parameters = {n_pairs, floor, mu, sigma_dut, tau, 1.0};
      break;
    }
    case ModelFamily::DoubleGaussian: {
      // Look for a shoulder in the residual left by the main Gaussian.
      const double amp = peak - floor;
      double best = 0.0;
      std::size_t ibest = 0;
      for (std::size_t i = 0; i < nb; ++i) {
        const double z = (data.center(i) - mu) / sigma_obs;
        const double resid = smooth[i] - floor - amp * std::exp(-0.5 * z * z);
        if (resid > best) {
          best = resid;
          ibest = i;
        }
      }
      if (best > 0.1 * amp) {
        const double w = std::clamp(1.0 - best / amp, 0.5, 0.95);
        guess.parameters = {n_pairs, floor, mu, sigma_dut, data.center(ibest), sigma_dut, w};
      } else {
        guess.parameters = {n_pairs, floor, mu, sigma_dut, mu + 2.0 * sigma_obs, sigma_dut, 0.9};
      }
      break;
    }
  }
  return guess;
}

const FitParameter& FitResult::parameter(const std::string& name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return p;
  }
  throw ConfigError("fit result has no parameter '" + name + "'");
}

FitResult fit_histogram(const CorrelationHistogram& h, ModelFamily family, double sigma_ref,
                        std::optional<std::vector<double>> init, const FitOptions& options) {
  return fit_binned(BinnedData::from(h), family, sigma_ref, std::move(init), options);
}

FitResult fit_binned(const BinnedData& data, ModelFamily family, double sigma_ref,
                     std::optional<std::vector<double>> init, const FitOptions& options) {
  if (!(sigma_ref >= 0.0)) throw ConfigError("reference width must be non-negative");
  const std::size_t np = parameter_count(family);
  const Selection sel = select(data, options);
  if (sel.t.size() < 3 * np) {
    throw ConfigError("fit needs at least 3x more bins than free parameters");
  }

  std::vector<double> p =
      init ? std::move(*init) : initial_guess(data, family, sigma_ref).parameters;
  if (p.size() != np) throw ConfigError("initial parameter vector has the wrong length");
  clamp_to_domain(family, p);

  const double width = data.width;
  double cost = cost_of(sel, family, p, sigma_ref, width);
  double lambda = 1e-3;
  Eigen::MatrixXd a;
  Eigen::VectorXd g;
  std::vector<double> trial(np);

  FitResult result;
  result.family = family;
  result.sigma_ref = sigma_ref;
  result.cost_history.push_back(cost);

  int iter = 0;
  bool converged = false;
  while (iter < options.max_iterations && !converged) {
    ++iter;
    normal_equations(sel, family, p, sigma_ref, width, a, g);
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = a;
      for (Eigen::Index k = 0; k < damped.rows(); ++k) {
        damped(k, k) += lambda * std::max(a(k, k), 1e-30);
      }
      const Eigen::VectorXd step = damped.ldlt().solve(g);
      for (std::size_t k = 0; k < np; ++k) trial[k] = p[k] + step[static_cast<Eigen::Index>(k)];
      clamp_to_domain(family, trial);
      const double trial_cost = cost_of(sel, family, trial, sigma_ref, width);
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        double max_rel_step = 0.0;
        for (std::size_t k = 0; k < np; ++k) {
          max_rel_step =
              std::max(max_rel_step, std::abs(trial[k] - p[k]) / (std::abs(p[k]) + 1.0));
        }
        const double rel_cost = (cost - trial_cost) / std::max(cost, 1e-300);
        // A heavily damped step is small because of the damping, not convergence.
        const bool near_gauss_newton = lambda <= 1.0;
        p = trial;
        cost = trial_cost;
        result.cost_history.push_back(cost);
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        converged = (near_gauss_newton && (max_rel_step < options.step_tolerance ||
                                           rel_cost < options.cost_tolerance)) ||
                    cost == 0.0;
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) {
          // No descent direction left at machine precision: a stationary point.
          converged = true;
          break;
        }
      }
    }
  }

  normal_equations(sel, family, p, sigma_ref, width, a, g);
  Eigen::MatrixXd inv;
  try {
    inv = checked_inverse(family, a);
  } catch (const FitError&) {
    // Degeneracy at an unconverged point says nothing about the model.
    if (converged) throw;
    inv = Eigen::MatrixXd::Constant(a.rows(), a.cols(), std::numeric_limits<double>::quiet_NaN());
  }
  const int dof = static_cast<int>(sel.t.size()) - static_cast<int>(np);
  const double red = cost / dof;

  const auto names = parameter_names(family);
  result.covariance.resize(np * np);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      result.covariance[i * np + j] =
          inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * red;
    }
  }
  for (std::size_t i = 0; i < np; ++i) {
    result.parameters.push_back(
        {names[i], p[i], std::sqrt(std::max(result.covariance[i * np + i], 0.0))});
  }
  result.model = model_from_parameters(family, p);
  result.chi2 = cost;
  result.degrees_of_freedom = dof;
  result.reduced_chi2 = red;
  result.iterations = iter;
  result.converged = converged;
  result.figure = figure_of_merit(result.model);

  // FWHM uncertainty by numerical propagation through the shape parameters.
  std::vector<double> grad(np, 0.0);
  for (std::size_t k = 2; k < np && std::isfinite(result.parameters[k].error); ++k) {
    const double h = std::max(1e-3 * result.parameters[k].error, 1e-7 * (std::abs(p[k]) + 1.0));
    std::vector<double> up = p;
    std::vector<double> dn = p;
    up[k] += h;
    dn[k] -= h;
    clamp_to_domain(family, up);
    clamp_to_domain(family, dn);
    if (up[k] == dn[k]) continue;
    grad[k] = (fwhm(model_from_parameters(family, up)).fwhm -
               fwhm(model_from_parameters(family, dn)).fwhm) /
              (up[k] - dn[k]);
  }
  double var = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) var += grad[i] * result.covariance[i * np + j] * grad[j];
  }
  result.fwhm_err = std::isnan(var) ? var : std::sqrt(std::max(var, 0.0));

  if (family == ModelFamily::GaussExpTail) {
    result.ratio_R_err = result.parameters[5].error;
  } else if (family == ModelFamily::DoubleGaussian) {
    const double w = p[6];
    result.ratio_R_err = result.parameters[6].error / ((1.0 - w) * (1.0 - w));
  }
  return result;
}

}  // namespace jitterkit
