#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include "jitterkit/correlation.hpp"
#include "jitterkit/models.hpp"

namespace jitterkit {

struct DetectorConfig {
  ResponseModel response = Gaussian{0.0, 20.0};
  double efficiency = 1.0;  // detection probability per photon
  double dark_rate_hz = 0.0;
  double delay_ps = 0.0;
  double dead_time_ps = 0.0;  // non-paralyzable; 0 disables
};

struct SimConfig {
  double pair_rate_hz = 1e4;
  double duration_s = 1.0;
  DetectorConfig a;
  DetectorConfig b;
  std::uint64_t seed = 1;
};

void validate(const SimConfig& config);

/// Expected tags over both channels before dead time.
double expected_tag_count(const SimConfig& config);
inline constexpr double kMaxExpectedTags = 1e8;

struct SimTruth {
  std::uint64_t pairs_emitted = 0;
  std::uint64_t pairs_detected_both = 0;  // before dead time
  std::uint64_t darks_a = 0;
  std::uint64_t darks_b = 0;
  std::uint64_t dead_time_dropped_a = 0;
  std::uint64_t dead_time_dropped_b = 0;
  std::uint64_t out_of_range_dropped = 0;  // jitter pushed a tag outside [0, T]
};

struct SimOutput {
  TimeTagStream a;
  TimeTagStream b;
  SimTruth truth;
};

/// Simultaneous pair emission on a homogeneous Poisson process, per-photon
/// detection and response sampling, independent dark counts, optional dead
/// time. Each component draws from its own seeded substream so enabling one
/// leaves the others' draws unchanged. Throws ConfigError when more than
/// 1e8 tags are expected.
SimOutput simulate(const SimConfig& config);

/// Accidental floor per bin, r_a r_b T w with r = pair_rate * eff + dark.
/// Ignores dead time and the correlated peak.
double expected_accidentals(const SimConfig& config, double bin_width_ps);

/// Expected coincidences in the correlated peak, pair_rate * T * eff_a * eff_b.
double expected_true_coincidences(const SimConfig& config);

/// Substream seed for component `stream` of a run seeded with `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace jitterkit
