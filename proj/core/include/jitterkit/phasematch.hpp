#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jitterkit/dispersion.hpp"

namespace jitterkit {

/// Which daughter photon of the Type-II pair is ordinarily polarized. The
/// pump is always extraordinary.
enum class PolarizationAssignment { SignalOrdinary, SignalExtraordinary };

/// Direction in which a positive external angle of incidence rotates the
/// internal pump direction relative to the optic axis.
enum class RotationSense { TowardAxis, AwayFromAxis };

struct SourceGeometry {
  UniaxialCrystal crystal;
  double theta_cut_deg = 43.6;
  double phi_cut_deg = 30.0;  // recorded; the collinear scalar model ignores it
  double lambda_pump_nm = 405.0;
  double crystal_length_mm = 2.0;
  PolarizationAssignment polarization = PolarizationAssignment::SignalOrdinary;
  RotationSense rotation = RotationSense::TowardAxis;
};

/// 405 nm pumped BBO cut at 43.6 deg / 30 deg, with the polarization and
/// rotation flags calibrated against the published tuning range.
SourceGeometry default_geometry();

/// Reads a key=value geometry file. `crystal` names a built-in crystal or
/// `crystal_file` points at a coefficient file relative to the geometry file.
SourceGeometry load_geometry(const std::filesystem::path& path);

std::string to_string(PolarizationAssignment p);
std::string to_string(RotationSense r);
PolarizationAssignment parse_polarization(const std::string& s);
RotationSense parse_rotation(const std::string& s);

struct PhaseMatchSolution {
  double theta_incidence_deg = 0.0;
  double theta_internal_deg = 0.0;
  double lambda_signal_nm = 0.0;
  double lambda_idler_nm = 0.0;
  double residual_mismatch = 0.0;  // |dk|, rad/um
};

/// Energy conservation 1/l_i = 1/l_p - 1/l_s.
double idler_from_signal(double lambda_pump_nm, double lambda_signal_nm);

/// Internal propagation angle to the optic axis for an external angle of
/// incidence, solved self-consistently with the pump's extraordinary index.
double internal_angle(const SourceGeometry& geometry, double theta_incidence_deg);

/// Collinear k_pump - k_signal - k_idler in rad/um.
double phase_mismatch(const SourceGeometry& geometry, double theta_internal_deg,
                      double lambda_signal_nm);

constexpr double kSignalSearchMinNm = 480.0;
constexpr double kSignalSearchMaxNm = 790.0;
constexpr double kMismatchTolerance = 1e-6;  // rad/um

PhaseMatchSolution solve_signal_wavelength(const SourceGeometry& geometry,
                                           double theta_incidence_deg);

struct TuningRow {
  double theta_incidence_deg = 0.0;
  std::optional<PhaseMatchSolution> solution;
  std::string error;  // set when `solution` is empty
};

std::vector<TuningRow> tuning_curve(const SourceGeometry& geometry, double theta_start_deg,
                                    double theta_end_deg, int n_points);

/// CSV with columns theta_incidence_deg, theta_internal_deg, lambda_signal_nm,
/// lambda_idler_nm, residual. Failed rows carry `nan` and a trailing status.
std::string tuning_curve_csv(const std::vector<TuningRow>& rows);

struct FilterCalibration {
  std::string name;
  std::vector<double> wavelength_nm;
  std::vector<double> transmission;
  double wavelength_uncertainty_nm = 0.0;
};

void validate(const FilterCalibration& cal);

/// Two-column CSV (wavelength_nm, transmission); a non-numeric first line is
/// treated as a header.
FilterCalibration load_filter_calibration(const std::filesystem::path& path,
                                          double wavelength_uncertainty_nm);

/// Piecewise-linear forward model T(lambda).
double transmission_at(const FilterCalibration& cal, double wavelength_nm);

struct WavelengthEstimate {
  double wavelength_nm = 0.0;
  double uncertainty_nm = 0.0;
};

WavelengthEstimate wavelength_from_transmission(const FilterCalibration& cal,
                                                double measured_transmission,
                                                double transmission_uncertainty);

}  // namespace jitterkit
