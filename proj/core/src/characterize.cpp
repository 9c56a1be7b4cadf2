#include <utility>

#include "jitterkit/error.hpp"
#include "jitterkit/fitting.hpp"

namespace jitterkit {
namespace {

// Runs one pipeline stage, prefixing any library error with the stage name
// while keeping its category.
template <class F>
auto run_stage(const char* stage, F&& body) -> decltype(body()) {
  const std::string prefix = std::string("stage ") + stage + ": ";
  try {
    return body();
  } catch (const ParseError& e) {
    throw ParseError(prefix + e.what(), e.offset());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const SolverError& e) {
    throw SolverError(prefix + e.what());
  } catch (const InsufficientDataError& e) {
    throw InsufficientDataError(prefix + e.what());
  } catch (const FitError& e) {
    throw FitError(prefix + e.what());
  }
}

}  // namespace

CharacterizationReport characterize(const TimeTagStream& dut, const TimeTagStream& reference,
                                    const JitterValue& sigma_ref, ModelFamily family,
                                    const CharacterizeConfig& config) {
  CharacterizationReport report;
  report.reference = sigma_ref;
  run_stage("reference", [&] { validate(sigma_ref); });
  report.histogram = run_stage("cross_correlation", [&] {
    return cross_correlation(dut, reference, config.histogram, config.threads);
  });
  report.g2 = run_stage("normalize_g2", [&] {
    return normalize_g2(report.histogram,
                        config.sidebands.value_or(default_sidebands(report.histogram)));
  });
  report.guess = run_stage("initial_guess", [&] {
    return initial_guess(report.histogram, family, sigma_ref.sigma);
  });
  report.fit = run_stage("fit_histogram", [&] {
    return fit_histogram(report.histogram, family, sigma_ref.sigma, report.guess.parameters,
                         config.fit);
  });
  report.dut_fwhm = report.fit.figure.fwhm;
  report.dut_fwhm_err = report.fit.fwhm_err;
  if (family == ModelFamily::Gaussian) {
    const auto& s = report.fit.parameter("sigma");
    report.dut_sigma = JitterValue{s.value, s.error, std::nullopt};
  }
  return report;
}

}  // namespace jitterkit
