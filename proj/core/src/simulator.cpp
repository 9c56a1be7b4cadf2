#include "jitterkit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "jitterkit/error.hpp"

namespace jitterkit {
namespace {

enum Stream : std::uint64_t {
  kPairTimes = 1,
  kEfficiencyA,
  kEfficiencyB,
  kResponseA,
  kResponseB,
  kDarkA,
  kDarkB,
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void validate(const DetectorConfig& d, const char* name) {
  const std::string n = name;
  if (!(d.efficiency >= 0.0 && d.efficiency <= 1.0)) {
    throw ConfigError("detector " + n + ": efficiency must lie in [0, 1]");
  }
  if (!(d.dark_rate_hz >= 0.0)) throw ConfigError("detector " + n + ": dark rate must be >= 0");
  if (!(d.dead_time_ps >= 0.0)) throw ConfigError("detector " + n + ": dead time must be >= 0");
  if (!std::isfinite(d.delay_ps)) throw ConfigError("detector " + n + ": delay must be finite");
  jitterkit::validate(d.response);
}

void add_darks(std::vector<Picoseconds>& tags, double rate_hz, double duration_ps,
               Picoseconds t_max, std::mt19937_64& rng, std::uint64_t& count) {
  if (rate_hz <= 0.0) return;
  std::poisson_distribution<std::uint64_t> n_dist(rate_hz * duration_ps * 1e-12);
  std::uniform_real_distribution<double> when(0.0, duration_ps);
  const std::uint64_t n = n_dist(rng);
  for (std::uint64_t i = 0; i < n; ++i) {
    tags.push_back(std::clamp<Picoseconds>(std::llround(when(rng)), 0, t_max));
  }
  count = n;
}

std::uint64_t apply_dead_time(std::vector<Picoseconds>& tags, double dead_ps) {
  if (dead_ps <= 0.0 || tags.empty()) return 0;
  std::vector<Picoseconds> kept;
  kept.reserve(tags.size());
  double ready = -1e300;
  for (const Picoseconds t : tags) {
    if (static_cast<double>(t) >= ready) {
      kept.push_back(t);
      ready = static_cast<double>(t) + dead_ps;
    }
  }
  const auto dropped = static_cast<std::uint64_t>(tags.size() - kept.size());
  tags = std::move(kept);
  return dropped;
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(0xa5a5a5a5ULL + stream));
}

void validate(const SimConfig& config) {
  if (!(config.pair_rate_hz >= 0.0)) throw ConfigError("pair rate must be >= 0");
  if (!(config.duration_s > 0.0) || !std::isfinite(config.duration_s)) {
    throw ConfigError("duration must be positive");
  }
  validate(config.a, "a");
  validate(config.b, "b");
}

double expected_tag_count(const SimConfig& c) {
  return c.duration_s * (c.pair_rate_hz * (c.a.efficiency + c.b.efficiency) + c.a.dark_rate_hz +
                         c.b.dark_rate_hz);
}

double expected_accidentals(const SimConfig& c, double bin_width_ps) {
  const double ra = c.pair_rate_hz * c.a.efficiency + c.a.dark_rate_hz;
  const double rb = c.pair_rate_hz * c.b.efficiency + c.b.dark_rate_hz;
  return ra * rb * c.duration_s * bin_width_ps * 1e-12;
}

double expected_true_coincidences(const SimConfig& c) {
  return c.pair_rate_hz * c.duration_s * c.a.efficiency * c.b.efficiency;
}

SimOutput simulate(const SimConfig& config) {
  validate(config);
  const double expected = expected_tag_count(config);
  if (expected > kMaxExpectedTags) {
    std::ostringstream msg;
    msg << "simulation refused: about " << expected << " tags expected, limit is "
        << kMaxExpectedTags;
    throw ConfigError(msg.str());
  }

  const double duration_ps = config.duration_s * 1e12;
  const Picoseconds t_max = std::llround(duration_ps);
  auto engine = [&](Stream s) { return std::mt19937_64(substream_seed(config.seed, s)); };
  std::mt19937_64 pair_rng = engine(kPairTimes);
  std::mt19937_64 eff_a = engine(kEfficiencyA);
  std::mt19937_64 eff_b = engine(kEfficiencyB);
  std::mt19937_64 resp_a = engine(kResponseA);
  std::mt19937_64 resp_b = engine(kResponseB);
  std::mt19937_64 dark_a = engine(kDarkA);
  std::mt19937_64 dark_b = engine(kDarkB);

  SimOutput out;
  out.a.channel = 0;
  out.b.channel = 1;
  out.a.duration_ps = t_max;
  out.b.duration_ps = t_max;
  const auto reserve = static_cast<std::size_t>(expected * 0.5 * 1.1 + 16);
  out.a.tags.reserve(reserve);
  out.b.tags.reserve(reserve);

  auto place = [&](std::vector<Picoseconds>& tags, double t) {
    const Picoseconds r = std::llround(t);
    if (r < 0 || r > t_max) {
      ++out.truth.out_of_range_dropped;
      return;
    }
    tags.push_back(r);
  };

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  if (config.pair_rate_hz > 0.0) {
    std::exponential_distribution<double> gap(config.pair_rate_hz * 1e-12);
    for (double t = gap(pair_rng); t < duration_ps; t += gap(pair_rng)) {
      ++out.truth.pairs_emitted;
      const bool hit_a = uniform(eff_a) < config.a.efficiency;
      const bool hit_b = uniform(eff_b) < config.b.efficiency;
      if (hit_a) place(out.a.tags, t + config.a.delay_ps + sample(config.a.response, resp_a));
      if (hit_b) place(out.b.tags, t + config.b.delay_ps + sample(config.b.response, resp_b));
      if (hit_a && hit_b) ++out.truth.pairs_detected_both;
    }
  }
  add_darks(out.a.tags, config.a.dark_rate_hz, duration_ps, t_max, dark_a, out.truth.darks_a);
  add_darks(out.b.tags, config.b.dark_rate_hz, duration_ps, t_max, dark_b, out.truth.darks_b);

  std::sort(out.a.tags.begin(), out.a.tags.end());
  std::sort(out.b.tags.begin(), out.b.tags.end());
  out.truth.dead_time_dropped_a = apply_dead_time(out.a.tags, config.a.dead_time_ps);
  out.truth.dead_time_dropped_b = apply_dead_time(out.b.tags, config.b.dead_time_ps);
  return out;
}

}  // namespace jitterkit
