#include "jitterkit/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "jitterkit/error.hpp"
#include "keyvalue.hpp"

namespace jitterkit {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void validate(const SourceGeometry& g) {
  if (!(g.theta_cut_deg > 0.0 && g.theta_cut_deg < 90.0)) {
    throw ConfigError("cut angle must lie in (0, 90) degrees");
  }
  if (!g.crystal.extraordinary_principal.in_range(g.lambda_pump_nm * 1e-3) ||
      !g.crystal.ordinary.in_range(g.lambda_pump_nm * 1e-3)) {
    throw ConfigError("pump wavelength outside the crystal's dispersion validity range");
  }
}

double wavevector(double index, double lambda_nm) {
  return 2.0 * std::numbers::pi * index / (lambda_nm * 1e-3);
}

}  // namespace

SourceGeometry default_geometry() {
  SourceGeometry g;
  g.crystal = load_builtin_crystal("bbo");
  return g;
}

std::string to_string(PolarizationAssignment p) {
  return p == PolarizationAssignment::SignalOrdinary ? "signal-ordinary" : "signal-extraordinary";
}

std::string to_string(RotationSense r) {
  return r == RotationSense::TowardAxis ? "toward-axis" : "away-from-axis";
}

PolarizationAssignment parse_polarization(const std::string& s) {
  if (s == "signal-ordinary") return PolarizationAssignment::SignalOrdinary;
  if (s == "signal-extraordinary") return PolarizationAssignment::SignalExtraordinary;
  throw ConfigError("unknown polarization assignment '" + s +
                    "' (expected signal-ordinary or signal-extraordinary)");
}

RotationSense parse_rotation(const std::string& s) {
  if (s == "toward-axis") return RotationSense::TowardAxis;
  if (s == "away-from-axis") return RotationSense::AwayFromAxis;
  throw ConfigError("unknown rotation sense '" + s + "' (expected toward-axis or away-from-axis)");
}

SourceGeometry load_geometry(const std::filesystem::path& path) {
  const auto kv = detail::KeyValueFile::read(path);
  SourceGeometry g;
  if (auto file = kv.find("crystal_file")) {
    std::filesystem::path p = *file;
    if (p.is_relative()) p = path.parent_path() / p;
    g.crystal = load_crystal(p);
  } else {
    g.crystal = load_builtin_crystal(kv.find("crystal").value_or("bbo"));
  }
  g.theta_cut_deg = kv.number_or("theta_cut_deg", g.theta_cut_deg);
  g.phi_cut_deg = kv.number_or("phi_cut_deg", g.phi_cut_deg);
  g.lambda_pump_nm = kv.number_or("lambda_pump_nm", g.lambda_pump_nm);
  g.crystal_length_mm = kv.number_or("crystal_length_mm", g.crystal_length_mm);
  if (auto p = kv.find("polarization")) g.polarization = parse_polarization(*p);
  if (auto r = kv.find("rotation")) g.rotation = parse_rotation(*r);
  validate(g);
  return g;
}

double idler_from_signal(double lambda_pump_nm, double lambda_signal_nm) {
  if (!(lambda_pump_nm > 0.0) || !(lambda_signal_nm > lambda_pump_nm)) {
    throw DomainError("signal wavelength must exceed the pump wavelength for a real idler");
  }
  return 1.0 / (1.0 / lambda_pump_nm - 1.0 / lambda_signal_nm);
}

double internal_angle(const SourceGeometry& geometry, double theta_incidence_deg) {
  if (!(std::abs(theta_incidence_deg) < 90.0)) {
    throw DomainError("angle of incidence must satisfy |theta| < 90 degrees");
  }
  const double sign = geometry.rotation == RotationSense::AwayFromAxis ? 1.0 : -1.0;
  const double s = std::sin(theta_incidence_deg * kDeg);
  const double pump_um = geometry.lambda_pump_nm * 1e-3;
  double theta = geometry.theta_cut_deg;
  constexpr int kMaxIterations = 200;
  for (int i = 0; i < kMaxIterations; ++i) {
    const double n_pump = n_extraordinary(geometry.crystal, pump_um, theta * kDeg);
    const double next = geometry.theta_cut_deg + sign * std::asin(s / n_pump) / kDeg;
    if (!(next >= 0.0 && next <= 90.0)) {
      throw DomainError("internal propagation angle leaves [0, 90] degrees");
    }
    if (std::abs(next - theta) <= 1e-9) return next;
    theta = next;
  }
  throw SolverError("internal angle iteration did not converge");
}

double phase_mismatch(const SourceGeometry& geometry, double theta_internal_deg,
                      double lambda_signal_nm) {
  const double idler_nm = idler_from_signal(geometry.lambda_pump_nm, lambda_signal_nm);
  const double theta = theta_internal_deg * kDeg;
  const auto& c = geometry.crystal;
  const double n_pump = n_extraordinary(c, geometry.lambda_pump_nm * 1e-3, theta);
  double n_signal = 0.0;
  double n_idler = 0.0;
  if (geometry.polarization == PolarizationAssignment::SignalOrdinary) {
    n_signal = n_ordinary(c, lambda_signal_nm * 1e-3);
    n_idler = n_extraordinary(c, idler_nm * 1e-3, theta);
  } else {
    n_signal = n_extraordinary(c, lambda_signal_nm * 1e-3, theta);
    n_idler = n_ordinary(c, idler_nm * 1e-3);
  }
  return wavevector(n_pump, geometry.lambda_pump_nm) - wavevector(n_signal, lambda_signal_nm) -
         wavevector(n_idler, idler_nm);
}

PhaseMatchSolution solve_signal_wavelength(const SourceGeometry& geometry,
                                           double theta_incidence_deg) {
  const double theta_int = internal_angle(geometry, theta_incidence_deg);

  // Keep signal and idler inside the dispersion validity window.
  const auto& o = geometry.crystal.ordinary;
  const auto& e = geometry.crystal.extraordinary_principal;
  const double max_valid_nm = std::min(o.lambda_max_um, e.lambda_max_um) * 1e3;
  const double min_signal_for_idler =
      1.0 / (1.0 / geometry.lambda_pump_nm - 1.0 / max_valid_nm);
  const double lo = std::max(kSignalSearchMinNm, min_signal_for_idler * (1.0 + 1e-12));
  const double hi = std::min(kSignalSearchMaxNm, max_valid_nm);
  if (!(hi > lo)) throw SolverError("empty signal-wavelength search bracket");

  auto mismatch = [&](double ls) { return phase_mismatch(geometry, theta_int, ls); };

  constexpr int kScan = 620;
  std::vector<std::pair<double, double>> brackets;
  double prev_l = lo;
  double prev_v = mismatch(lo);
  for (int i = 1; i <= kScan; ++i) {
    const double l = lo + (hi - lo) * i / kScan;
    const double v = mismatch(l);
    if (prev_v == 0.0) {
      brackets.emplace_back(prev_l, prev_l);
    } else if ((prev_v < 0.0) != (v < 0.0) && v != 0.0) {
      brackets.emplace_back(prev_l, l);
    }
    prev_l = l;
    prev_v = v;
  }
  if (prev_v == 0.0) brackets.emplace_back(hi, hi);

  if (brackets.empty()) {
    std::ostringstream msg;
    msg << "no phase-matched solution at this angle (" << theta_incidence_deg << " deg)";
    throw SolverError(msg.str());
  }
  if (brackets.size() > 1) {
    throw SolverError("phase mismatch changes sign more than once in the search bracket");
  }

  auto [a, b] = brackets.front();
  double fa = mismatch(a);
  double mid = a;
  double fm = fa;
  while (b > a) {
    mid = 0.5 * (a + b);
    fm = mismatch(mid);
    if (std::abs(fm) <= 1e-9 || mid == a || mid == b) break;
    if ((fm < 0.0) == (fa < 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  if (std::abs(fm) > kMismatchTolerance) {
    throw SolverError("phase-mismatch root did not reach the residual tolerance");
  }

  PhaseMatchSolution sol;
  sol.theta_incidence_deg = theta_incidence_deg;
  sol.theta_internal_deg = theta_int;
  sol.lambda_signal_nm = mid;
  sol.lambda_idler_nm = idler_from_signal(geometry.lambda_pump_nm, mid);
  sol.residual_mismatch = std::abs(fm);
  return sol;
}

std::vector<TuningRow> tuning_curve(const SourceGeometry& geometry, double theta_start_deg,
                                    double theta_end_deg, int n_points) {
  if (n_points < 2) throw ConfigError("tuning curve needs at least 2 points");
  std::vector<TuningRow> rows;
  rows.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    TuningRow row;
    row.theta_incidence_deg =
        i == n_points - 1
            ? theta_end_deg
            : theta_start_deg + (theta_end_deg - theta_start_deg) * i / (n_points - 1);
    try {
      row.solution = solve_signal_wavelength(geometry, row.theta_incidence_deg);
    } catch (const DomainError& e) {
      row.error = e.what();
    } catch (const SolverError& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string tuning_curve_csv(const std::vector<TuningRow>& rows) {
  std::string out =
      "theta_incidence_deg,theta_internal_deg,lambda_signal_nm,lambda_idler_nm,residual,status\n";
  char line[256];
  for (const auto& row : rows) {
    if (row.solution) {
      const auto& s = *row.solution;
      std::snprintf(line, sizeof line, "%.6f,%.9f,%.6f,%.6f,%.3e,ok\n", s.theta_incidence_deg,
                    s.theta_internal_deg, s.lambda_signal_nm, s.lambda_idler_nm,
                    s.residual_mismatch);
    } else {
      std::snprintf(line, sizeof line, "%.6f,nan,nan,nan,nan,no-solution\n",
                    row.theta_incidence_deg);
    }
    out += line;
  }
  return out;
}

void validate(const FilterCalibration& cal) {
  if (cal.wavelength_nm.size() != cal.transmission.size()) {
    throw ConfigError("filter calibration columns differ in length");
  }
  if (cal.wavelength_nm.size() < 2) throw ConfigError("filter calibration needs >= 2 points");
  if (!(cal.wavelength_uncertainty_nm >= 0.0)) {
    throw ConfigError("filter wavelength uncertainty must be >= 0");
  }
  for (std::size_t i = 0; i < cal.transmission.size(); ++i) {
    const double t = cal.transmission[i];
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("filter transmission outside [0, 1]");
    if (i > 0) {
      if (!(cal.wavelength_nm[i] > cal.wavelength_nm[i - 1])) {
        throw ConfigError("filter calibration wavelengths must be strictly increasing");
      }
      if (t < cal.transmission[i - 1]) {
        throw ConfigError("longpass filter transmission must be non-decreasing in wavelength");
      }
    }
  }
}

FilterCalibration load_filter_calibration(const std::filesystem::path& path,
                                          double wavelength_uncertainty_nm) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  FilterCalibration cal;
  cal.name = path.stem().string();
  cal.wavelength_uncertainty_nm = wavelength_uncertainty_nm;
  std::string line;
  std::uint64_t offset = 0;
  bool first = true;
  while (std::getline(in, line)) {
    const std::uint64_t here = offset;
    offset += line.size() + 1;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double wl = 0.0;
    double t = 0.0;
    if (!(fields >> wl >> t)) {
      if (first) {
        first = false;
        continue;
      }
      throw ParseError(path.string() + ": expected 'wavelength_nm,transmission'", here);
    }
    first = false;
    cal.wavelength_nm.push_back(wl);
    cal.transmission.push_back(t);
  }
  validate(cal);
  return cal;
}

double transmission_at(const FilterCalibration& cal, double wavelength_nm) {
  const auto& x = cal.wavelength_nm;
  const auto& y = cal.transmission;
  if (wavelength_nm <= x.front()) return y.front();
  if (wavelength_nm >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), wavelength_nm);
  const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
  const double f = (wavelength_nm - x[i]) / (x[i + 1] - x[i]);
  return y[i] + f * (y[i + 1] - y[i]);
}

WavelengthEstimate wavelength_from_transmission(const FilterCalibration& cal,
                                                double measured_transmission,
                                                double transmission_uncertainty) {
  validate(cal);
  const auto& x = cal.wavelength_nm;
  const auto& y = cal.transmission;
  const double t = measured_transmission;
  if (!(t >= y.front() && t <= y.back()) || !(transmission_uncertainty >= 0.0)) {
    throw DomainError("filter not discriminating at this wavelength: transmission " +
                      std::to_string(t) + " outside calibrated range");
  }
  // The preimage of t must be a single point; a plateau at t is ambiguous.
  const auto first_ge = std::lower_bound(y.begin(), y.end(), t);
  const auto last_le = std::upper_bound(y.begin(), y.end(), t);
  const std::size_t i_ge = static_cast<std::size_t>(first_ge - y.begin());
  const std::size_t n_equal = static_cast<std::size_t>(last_le - first_ge);
  if (n_equal > 1) {
    throw DomainError("filter not discriminating at this wavelength: transmission plateau");
  }

  double lambda = 0.0;
  double slope = 0.0;
  if (n_equal == 1) {
    lambda = x[i_ge];
    const bool has_right = i_ge + 1 < x.size();
    const bool has_left = i_ge > 0;
    const double right = has_right ? (y[i_ge + 1] - y[i_ge]) / (x[i_ge + 1] - x[i_ge]) : 0.0;
    const double left = has_left ? (y[i_ge] - y[i_ge - 1]) / (x[i_ge] - x[i_ge - 1]) : 0.0;
    if (has_left && has_right) {
      slope = 0.5 * (left + right);
    } else {
      slope = has_right ? right : left;
    }
  } else {
    const std::size_t i = i_ge - 1;  // y[i] < t < y[i+1]
    slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    lambda = x[i] + (t - y[i]) / slope;
  }
  if (!(slope > 0.0)) {
    throw DomainError("filter not discriminating at this wavelength: zero local slope");
  }
  const double from_t = transmission_uncertainty / slope;
  return {lambda, std::hypot(cal.wavelength_uncertainty_nm, from_t)};
}

}  // namespace jitterkit
