#pragma once

#include <filesystem>
#include <string>

namespace jitterkit {

/// Sellmeier form n^2 = b1 + b2 / (lambda^2 - b3) - b4 * lambda^2 with
/// lambda in micrometres.
struct SellmeierSet {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b4 = 0.0;
  double lambda_min_um = 0.0;
  double lambda_max_um = 0.0;

  bool in_range(double lambda_um) const noexcept {
    return lambda_um >= lambda_min_um && lambda_um <= lambda_max_um;
  }
  /// n^2 without range checking.
  double index_squared(double lambda_um) const noexcept;
};

struct UniaxialCrystal {
  std::string name;
  std::string source;  // literature citation of the coefficients
  SellmeierSet ordinary;
  SellmeierSet extraordinary_principal;
};

/// Checks pole-free, n^2 > 1 and negative birefringence on a dense grid over
/// the shared validity range. Throws ConfigError on violation.
void validate(const UniaxialCrystal& crystal);

/// Parses a key=value crystal file (see docs/file-formats.md).
UniaxialCrystal load_crystal(const std::filesystem::path& path);

/// Locates `<name>.crystal` in the data directory. The directory is taken
/// from $JITTERKIT_DATA_DIR, then the install location, then the source tree.
UniaxialCrystal load_builtin_crystal(const std::string& name);
std::filesystem::path data_directory();

double n_ordinary(const UniaxialCrystal& crystal, double lambda_um);
double n_extraordinary_principal(const UniaxialCrystal& crystal, double lambda_um);

/// Extraordinary index for propagation at `theta_rad` to the optic axis,
/// from the index ellipse 1/n^2 = cos^2/n_o^2 + sin^2/n_e^2.
double n_extraordinary(const UniaxialCrystal& crystal, double lambda_um, double theta_rad);

}  // namespace jitterkit
