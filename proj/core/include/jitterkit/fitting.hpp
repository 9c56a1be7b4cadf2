#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jitterkit/correlation.hpp"
#include "jitterkit/models.hpp"

namespace jitterkit {

/// A width with its 1-sigma uncertainty, e.g. a detector's timing jitter.
struct JitterValue {
  double sigma = 0.0;
  double sigma_err = 0.0;
  std::optional<double> wavelength_nm;

  double fwhm() const noexcept { return kFwhmPerSigma * sigma; }
  double fwhm_err() const noexcept { return kFwhmPerSigma * sigma_err; }
};

void validate(const JitterValue& j);

/// Removes a known reference width in quadrature, sqrt(s12^2 - sref^2), with
/// first-order error propagation. Throws DomainError when the reference is
/// at least as wide as the combined distribution.
JitterValue subtract_reference(const JitterValue& combined, const JitterValue& reference);

/// Histogram counts as real numbers on a uniform grid, bin i centred at
/// lo + (i + 1/2) * width. from() shifts integer-picosecond bins by -1/2 ps.
struct BinnedData {
  double lo = 0.0;
  double width = 1.0;
  std::vector<double> counts;

  double center(std::size_t i) const noexcept {
    return lo + (static_cast<double>(i) + 0.5) * width;
  }
  static BinnedData from(const CorrelationHistogram& h);
};

/// Free parameters, in order:
///   gauss        N, C0, mu, sigma
///   gauss-exp    N, C0, mu, sigma, tau, R        (R = A / (B tau))
///   double-gauss N, C0, mu1, sigma1, mu2, sigma2, w   (w = A / (A + B))
/// N counts correlated pairs, C0 is the accidental floor per bin. Widths are
/// those of the device under test; the reference width is folded in.
std::vector<std::string> parameter_names(ModelFamily family);

/// Unit-integral response model for a parameter vector.
ResponseModel model_from_parameters(ModelFamily family, std::span<const double> p);
/// Inverse of model_from_parameters; the model's normalization is discarded.
std::vector<double> parameters_from_model(const ResponseModel& m, double n_pairs,
                                          double floor_per_bin);

/// Expected counts in the bin centred at t and, when `gradient` is
/// non-empty, its analytic derivatives with respect to each parameter.
double predicted_counts(ModelFamily family, std::span<const double> p, double sigma_ref,
                        double bin_width, double t, std::span<double> gradient = {});

struct InitialGuess {
  ModelFamily family = ModelFamily::Gaussian;
  std::vector<double> parameters;
  bool mu_at_window_edge = false;
  std::vector<std::string> notes;
};

/// Moment-based starting point. Throws InsufficientDataError when no bin
/// rises 5 sqrt(floor) above the sideband floor.
InitialGuess initial_guess(const BinnedData& data, ModelFamily family, double sigma_ref = 0.0);
InitialGuess initial_guess(const CorrelationHistogram& h, ModelFamily family,
                           double sigma_ref = 0.0);

struct FitOptions {
  std::optional<TimeRange> fit_range;  // default: whole histogram
  int max_iterations = 500;
  double step_tolerance = 1e-8;
  double cost_tolerance = 1e-12;
};

struct FitParameter {
  std::string name;
  double value = 0.0;
  double error = 0.0;
};

struct FitResult {
  ModelFamily family = ModelFamily::Gaussian;
  std::vector<FitParameter> parameters;
  std::vector<double> covariance;  // row-major, parameters.size()^2
  ResponseModel model;             // unit-integral DUT response
  double sigma_ref = 0.0;
  double chi2 = 0.0;
  double reduced_chi2 = 0.0;
  int degrees_of_freedom = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_history;  // initial cost, then one entry per accepted step
  FigureOfMerit figure;
  double fwhm_err = 0.0;
  std::optional<double> ratio_R_err;

  const FitParameter& parameter(const std::string& name) const;
  double value(const std::string& name) const { return parameter(name).value; }
  double error(const std::string& name) const { return parameter(name).error; }
  double n_pairs() const { return parameters.at(0).value; }
  double floor() const { return parameters.at(1).value; }
};

/// Weighted least squares with weights max(counts, 1), minimized by a
/// Levenberg-Marquardt iteration with analytic Jacobian. The covariance is
/// the inverse normal matrix scaled by the reduced chi-square. A run that
/// exhausts max_iterations is returned with converged == false (its
/// uncertainties are NaN if the normal matrix is singular there). Throws
/// FitError when the normal matrix is singular, naming the parameters that
/// cannot be told apart.
FitResult fit_binned(const BinnedData& data, ModelFamily family, double sigma_ref,
                     std::optional<std::vector<double>> init = std::nullopt,
                     const FitOptions& options = {});

FitResult fit_histogram(const CorrelationHistogram& h, ModelFamily family, double sigma_ref,
                        std::optional<std::vector<double>> init = std::nullopt,
                        const FitOptions& options = {});

/// Weighted cost sum (counts - predicted)^2 / max(counts, 1) over `data`.
double weighted_cost(const BinnedData& data, ModelFamily family, std::span<const double> p,
                     double sigma_ref);

struct CharacterizeConfig {
  HistogramConfig histogram;
  std::optional<std::vector<TimeRange>> sidebands;  // default: outer 15% each side
  FitOptions fit;
  unsigned threads = 1;
};

struct CharacterizationReport {
  CorrelationHistogram histogram;
  NormalizedCorrelation g2;
  InitialGuess guess;
  FitResult fit;
  JitterValue reference;
  std::optional<JitterValue> dut_sigma;  // gauss family only
  double dut_fwhm = 0.0;
  double dut_fwhm_err = 0.0;
};

/// cross_correlation -> normalize_g2 -> initial_guess -> fit_histogram ->
/// figures of merit. A failing stage rethrows with the stage name prefixed.
CharacterizationReport characterize(const TimeTagStream& dut, const TimeTagStream& reference,
                                    const JitterValue& sigma_ref, ModelFamily family,
                                    const CharacterizeConfig& config = {});

}  // namespace jitterkit
