#include "jitterkit/dispersion.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "jitterkit/error.hpp"
#include "keyvalue.hpp"

namespace jitterkit {
namespace {

double checked_index(const SellmeierSet& set, double lambda_um, const char* which) {
  if (!std::isfinite(lambda_um) || !set.in_range(lambda_um)) {
    std::ostringstream msg;
    msg << which << " index: wavelength " << lambda_um << " um outside validity range ["
        << set.lambda_min_um << ", " << set.lambda_max_um << "] um";
    throw DomainError(msg.str());
  }
  return std::sqrt(set.index_squared(lambda_um));
}

SellmeierSet read_set(const detail::KeyValueFile& kv, const std::string& prefix) {
  SellmeierSet set;
  set.b1 = kv.number(prefix + ".b1");
  set.b2 = kv.number(prefix + ".b2");
  set.b3 = kv.number(prefix + ".b3");
  set.b4 = kv.number(prefix + ".b4");
  set.lambda_min_um = kv.number("lambda_min_um");
  set.lambda_max_um = kv.number("lambda_max_um");
  return set;
}

}  // namespace

double SellmeierSet::index_squared(double lambda_um) const noexcept {
  const double l2 = lambda_um * lambda_um;
  return b1 + b2 / (l2 - b3) - b4 * l2;
}

void validate(const UniaxialCrystal& crystal) {
  const SellmeierSet& o = crystal.ordinary;
  const SellmeierSet& e = crystal.extraordinary_principal;
  if (!(o.lambda_min_um > 0.0 && o.lambda_max_um > o.lambda_min_um)) {
    throw ConfigError(crystal.name + ": empty validity range");
  }
  const double lo = std::max(o.lambda_min_um, e.lambda_min_um);
  const double hi = std::min(o.lambda_max_um, e.lambda_max_um);
  constexpr int kGrid = 2000;
  for (int i = 0; i <= kGrid; ++i) {
    const double l = lo + (hi - lo) * i / kGrid;
    for (const SellmeierSet* set : {&o, &e}) {
      if (l * l - set->b3 <= 0.0) {
        throw ConfigError(crystal.name + ": Sellmeier pole inside validity range");
      }
      if (set->index_squared(l) <= 1.0) {
        throw ConfigError(crystal.name + ": n^2 <= 1 inside validity range");
      }
    }
    if (e.index_squared(l) >= o.index_squared(l)) {
      throw ConfigError(crystal.name + ": crystal is not negative uniaxial over its range");
    }
  }
}

UniaxialCrystal load_crystal(const std::filesystem::path& path) {
  const auto kv = detail::KeyValueFile::read(path);
  UniaxialCrystal crystal;
  crystal.name = kv.string("name");
  crystal.source = kv.find("source").value_or("");
  crystal.ordinary = read_set(kv, "ordinary");
  crystal.extraordinary_principal = read_set(kv, "extraordinary");
  validate(crystal);
  return crystal;
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("JITTERKIT_DATA_DIR"); env && *env) return env;
  const std::filesystem::path installed = JITTERKIT_INSTALL_DATA_DIR;
  if (std::filesystem::exists(installed / "bbo.crystal")) return installed;
  return JITTERKIT_SOURCE_DATA_DIR;
}

UniaxialCrystal load_builtin_crystal(const std::string& name) {
  const auto path = data_directory() / (name + ".crystal");
  if (!std::filesystem::exists(path)) {
    throw IoError("no crystal data file for '" + name + "' at " + path.string());
  }
  return load_crystal(path);
}

double n_ordinary(const UniaxialCrystal& crystal, double lambda_um) {
  return checked_index(crystal.ordinary, lambda_um, "ordinary");
}

double n_extraordinary_principal(const UniaxialCrystal& crystal, double lambda_um) {
  return checked_index(crystal.extraordinary_principal, lambda_um, "extraordinary");
}

double n_extraordinary(const UniaxialCrystal& crystal, double lambda_um, double theta_rad) {
  if (!(theta_rad >= 0.0 && theta_rad <= std::numbers::pi / 2)) {
    std::ostringstream msg;
    msg << "propagation angle " << theta_rad << " rad outside [0, pi/2]";
    throw DomainError(msg.str());
  }
  const double no = n_ordinary(crystal, lambda_um);
  if (theta_rad == 0.0) return no;
  const double ne = n_extraordinary_principal(crystal, lambda_um);
  const double c = std::cos(theta_rad);
  const double s = std::sin(theta_rad);
  return 1.0 / std::sqrt(c * c / (no * no) + s * s / (ne * ne));
}

}  // namespace jitterkit
