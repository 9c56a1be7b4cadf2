#pragma once

#include <optional>
#include <random>
#include <string>
#include <variant>

namespace jitterkit {

/// Single Gaussian response, unit integral.
struct Gaussian {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Prompt Gaussian plus a Gaussian-smeared one-sided exponential diffusion
/// tail: f = A G(sigma, t - mu) + B [G(sigma) * 1{x >= 0} e^{-x/tau}](t - mu).
/// Integrates to A + B tau.
struct GaussExpTail {
  double A = 1.0;
  double B = 0.0;
  double mu = 0.0;
  double sigma = 1.0;
  double tau = 1.0;
};

/// Two weighted Gaussians; integrates to A + B.
struct DoubleGaussian {
  double A = 1.0;
  double B = 0.0;
  double mu1 = 0.0;
  double sigma1 = 1.0;
  double mu2 = 0.0;
  double sigma2 = 1.0;
};

using ResponseModel = std::variant<Gaussian, GaussExpTail, DoubleGaussian>;

enum class ModelFamily { Gaussian, GaussExpTail, DoubleGaussian };

/// CLI / file names: "gauss", "gauss-exp", "double-gauss".
std::string to_string(ModelFamily f);
ModelFamily parse_model_family(const std::string& s);
ModelFamily family_of(const ResponseModel& m);

/// Throws ConfigError when widths are non-positive, weights negative, or the
/// total weight vanishes.
void validate(const ResponseModel& m);

/// Integral of the model over the real line.
double total_weight(const ResponseModel& m);

/// Rescales weights so the model integrates to one.
ResponseModel normalized(const ResponseModel& m);

/// Density in 1/ps. Closed form everywhere, including the exponential tail.
double evaluate(const ResponseModel& m, double t);

/// Model convolved with a zero-mean Gaussian of width sigma_ref.
ResponseModel convolve_with_gaussian(const ResponseModel& m, double sigma_ref);

/// Expected coincidences per bin of width `bin_width` centred on dt = t:
/// N * bin_width * (normalized(m) * G(sigma_ref))(t) + floor.
double predicted_c12(const ResponseModel& m, double sigma_ref, double n_pairs,
                     double floor_per_bin, double bin_width, double t);

struct FwhmResult {
  double fwhm = 0.0;
  double peak_time = 0.0;
  double left = 0.0;
  double right = 0.0;
  bool multimodal = false;  // density dips below half maximum between the crossings
};

inline constexpr double kFwhmPerSigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

/// Full width at half maximum. Exact for Gaussian, numeric otherwise; when
/// the model is multimodal the outermost crossings are reported.
FwhmResult fwhm(const ResponseModel& m);

/// Ratio of the prompt to the tail integral, A / (B tau). Throws DomainError
/// for B = 0 (the ratio is unbounded).
double ratio_R(const GaussExpTail& m);

struct FigureOfMerit {
  double fwhm = 0.0;
  bool multimodal = false;
  std::optional<double> ratio_R;     // GaussExpTail: A/(B tau); DoubleGaussian: A/B
  double first_component_integral = 0.0;
  double second_component_integral = 0.0;
};

FigureOfMerit figure_of_merit(const ResponseModel& m);

/// One draw from the normalized density of `m`.
double sample(const ResponseModel& m, std::mt19937_64& rng);

}  // namespace jitterkit
