#include "jitterkit/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "jitterkit/error.hpp"

namespace jitterkit {
namespace {

void check_config(const HistogramConfig& c) {
  if (c.bin_width_ps <= 0) throw ConfigError("bin width must be positive");
  if (c.window_hi_ps <= c.window_lo_ps) throw ConfigError("correlation window is empty");
  if ((c.window_hi_ps - c.window_lo_ps) % c.bin_width_ps != 0) {
    throw ConfigError("correlation window is not an integer number of bins");
  }
}

// Adds pairs for a[first, last) into `counts`.
void sweep(const std::vector<Picoseconds>& a, std::size_t first, std::size_t last,
           const std::vector<Picoseconds>& b, const HistogramConfig& c,
           std::vector<std::uint64_t>& counts) {
  if (first >= last || b.empty()) return;
  // dt = t1 - t2 in [lo, hi)  <=>  t2 in (t1 - hi, t1 - lo]
  auto start = std::upper_bound(b.begin(), b.end(), a[first] - c.window_hi_ps);
  for (std::size_t i = first; i < last; ++i) {
    const Picoseconds t1 = a[i];
    while (start != b.end() && *start <= t1 - c.window_hi_ps) ++start;
    for (auto it = start; it != b.end() && *it <= t1 - c.window_lo_ps; ++it) {
      const Picoseconds dt = t1 - *it;
      ++counts[static_cast<std::size_t>((dt - c.window_lo_ps) / c.bin_width_ps)];
    }
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

CorrelationHistogram cross_correlation(const TimeTagStream& a, const TimeTagStream& b,
                                       const HistogramConfig& config, unsigned threads) {
  check_config(config);
  validate(a);
  validate(b);

  CorrelationHistogram h;
  h.bin_width_ps = config.bin_width_ps;
  h.window_lo_ps = config.window_lo_ps;
  h.window_hi_ps = config.window_hi_ps;
  h.counts.assign(
      static_cast<std::size_t>((config.window_hi_ps - config.window_lo_ps) / config.bin_width_ps),
      0);
  h.channel_a = a.channel;
  h.channel_b = b.channel;
  h.duration_ps = std::max(a.duration_ps, b.duration_ps);
  h.rate_a_hz = a.rate_hz();
  h.rate_b_hz = b.rate_hz();

  const std::size_t n = a.tags.size();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n / 4096 + 1)));
  if (threads == 1) {
    sweep(a.tags, 0, n, b.tags, config, h.counts);
  } else {
    std::vector<std::vector<std::uint64_t>> partial(threads,
                                                    std::vector<std::uint64_t>(h.bins(), 0));
    {
      std::vector<std::jthread> workers;
      for (unsigned k = 0; k < threads; ++k) {
        const std::size_t first = n * k / threads;
        const std::size_t last = n * (k + 1) / threads;
        workers.emplace_back([&, first, last, k] {
          sweep(a.tags, first, last, b.tags, config, partial[k]);
        });
      }
    }
    for (const auto& p : partial) {
      for (std::size_t i = 0; i < h.bins(); ++i) h.counts[i] += p[i];
    }
  }
  for (const auto c : h.counts) h.total_pairs += c;
  return h;
}

std::vector<TimeRange> default_sidebands(const CorrelationHistogram& h, double fraction) {
  const double lo = static_cast<double>(h.window_lo_ps);
  const double hi = static_cast<double>(h.window_hi_ps);
  const double span = (hi - lo) * fraction;
  return {{lo, lo + span}, {hi - span, hi}};
}

NormalizedCorrelation normalize_g2(const CorrelationHistogram& h,
                                   const std::vector<TimeRange>& sideband) {
  std::vector<double> side;
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double c = h.bin_center(i);
    for (const auto& r : sideband) {
      if (c >= r.lo_ps && c < r.hi_ps) {
        side.push_back(static_cast<double>(h.counts[i]));
        break;
      }
    }
  }
  if (side.size() < kMinSidebandBins) {
    throw ConfigError("sideband region must contain at least 10 bins");
  }
  const double n = static_cast<double>(side.size());
  double mean = 0.0;
  for (const double v : side) mean += v;
  mean /= n;
  if (!(mean > 0.0)) {
    throw InsufficientDataError("sideband holds no accidental coincidences; cannot normalize");
  }
  double ss = 0.0;
  for (const double v : side) ss += (v - mean) * (v - mean);

  NormalizedCorrelation out;
  out.floor = mean;
  out.floor_err = std::sqrt(ss / (n - 1.0) / n);
  out.sideband_bins = side.size();

  std::vector<double> all(h.counts.begin(), h.counts.end());
  const double poisson_err = std::sqrt(mean / n);
  out.peak_contamination = mean - median(all) > 5.0 * poisson_err;

  out.g2.resize(h.bins());
  out.g2_err.resize(h.bins());
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double c = static_cast<double>(h.counts[i]);
    out.g2[i] = c / mean;
    const double stat = std::sqrt(std::max(c, 1.0)) / mean;
    const double sys = c * out.floor_err / (mean * mean);
    out.g2_err[i] = std::hypot(stat, sys);
  }
  return out;
}

std::string histogram_csv(const CorrelationHistogram& h, const NormalizedCorrelation& g2) {
  std::string out = "bin_center_ps,counts,g2,g2_err\n";
  out.reserve(out.size() + h.bins() * 48);
  char line[128];
  const bool have_g2 = g2.g2.size() == h.bins();
  for (std::size_t i = 0; i < h.bins(); ++i) {
    if (have_g2) {
      std::snprintf(line, sizeof line, "%.1f,%llu,%.9g,%.9g\n", h.bin_center(i),
                    static_cast<unsigned long long>(h.counts[i]), g2.g2[i], g2.g2_err[i]);
    } else {
      std::snprintf(line, sizeof line, "%.1f,%llu,nan,nan\n", h.bin_center(i),
                    static_cast<unsigned long long>(h.counts[i]));
    }
    out += line;
  }
  return out;
}

CorrelationHistogram parse_histogram_csv(const std::string& text) {
  std::vector<double> centers;
  CorrelationHistogram h;
  std::istringstream in(text);
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t here = offset;
    offset += line.size() + 1;
    if (line.empty() || line[0] == '#' || line.rfind("bin_center", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double center = 0.0;
    double count = 0.0;
    if (!(fields >> center >> count) || count < 0.0 || count != std::floor(count)) {
      throw ParseError("malformed histogram row", here);
    }
    centers.push_back(center);
    h.counts.push_back(static_cast<std::uint64_t>(count));
  }
  if (centers.size() < 2) throw ConfigError("histogram needs at least 2 bins");
  const double w = centers[1] - centers[0];
  if (!(w > 0.0) || w != std::round(w)) throw ConfigError("histogram bin width must be integral");
  for (std::size_t i = 1; i < centers.size(); ++i) {
    if (std::abs(centers[i] - centers[0] - w * static_cast<double>(i)) > 1e-6) {
      throw ConfigError("histogram bins are not uniformly spaced");
    }
  }
  h.bin_width_ps = static_cast<Picoseconds>(w);
  h.window_lo_ps = static_cast<Picoseconds>(std::llround(centers[0] - 0.5 * w));
  h.window_hi_ps = h.window_lo_ps + h.bin_width_ps * static_cast<Picoseconds>(centers.size());
  for (const auto c : h.counts) h.total_pairs += c;
  return h;
}

CorrelationHistogram load_histogram_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_histogram_csv(buf.str());
}

double threshold_crossing_time(const Waveform& w, double threshold_mv, Edge edge) {
  if (w.samples_mv.size() < 2) throw ConfigError("waveform needs at least 2 samples");
  if (!(w.sample_period_ps > 0.0)) throw ConfigError("waveform sample period must be positive");
  const auto& v = w.samples_mv;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const bool crosses = edge == Edge::Rising ? (v[i] < threshold_mv && v[i + 1] >= threshold_mv)
                                              : (v[i] > threshold_mv && v[i + 1] <= threshold_mv);
    if (crosses) {
      const double frac = (threshold_mv - v[i]) / (v[i + 1] - v[i]);
      return w.t0_ps + (static_cast<double>(i) + frac) * w.sample_period_ps;
    }
  }
  throw DomainError("threshold never crossed");
}

double noise_jitter_estimate(double sigma_v_mv, double slope_mv_per_ps) {
  if (slope_mv_per_ps == 0.0 || !std::isfinite(slope_mv_per_ps)) {
    throw DomainError("timing jitter undefined for zero signal slope");
  }
  if (!(sigma_v_mv >= 0.0)) throw DomainError("voltage noise must be non-negative");
  return sigma_v_mv / std::abs(slope_mv_per_ps);
}

}  // namespace jitterkit
