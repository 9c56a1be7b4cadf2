#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace jitterkit {

using Picoseconds = std::int64_t;

/// Detection timestamps of one channel, sorted, in integer picoseconds.
struct TimeTagStream {
  int channel = 0;
  std::vector<Picoseconds> tags;
  Picoseconds duration_ps = 0;

  std::size_t size() const noexcept { return tags.size(); }
  /// Mean detection rate in counts per second.
  double rate_hz() const noexcept {
    return duration_ps > 0 ? static_cast<double>(tags.size()) * 1e12 / duration_ps : 0.0;
  }
};

/// Throws ConfigError unless tags are non-decreasing and inside [0, duration].
void validate(const TimeTagStream& stream);

enum class TimeTagFormat { Csv, Binary };

TimeTagFormat parse_timetag_format(const std::string& s);
/// Guesses from the extension (.bin/.ttg -> binary, everything else CSV).
TimeTagFormat format_from_extension(const std::filesystem::path& path);

struct LoadOptions {
  bool sort = false;  // sort unsorted input instead of rejecting it
  int channel = 0;
};

TimeTagStream load_timetags(const std::filesystem::path& path, TimeTagFormat format,
                            const LoadOptions& options = {});
void save_timetags(const TimeTagStream& stream, const std::filesystem::path& path,
                   TimeTagFormat format);

/// Text form: optional `# duration_ps=<T>` header then one tag per line.
TimeTagStream parse_timetags_csv(const std::string& text, const LoadOptions& options = {});
/// Binary form: "TTG1", u64 duration, then densely packed u64 tags (LE).
TimeTagStream parse_timetags_binary(const std::string& bytes, const LoadOptions& options = {});

struct HistogramConfig {
  Picoseconds window_lo_ps = -2000;
  Picoseconds window_hi_ps = 2000;
  Picoseconds bin_width_ps = 2;
};

/// Counts of dt = t1 - t2 in half-open bins [lo + k w, lo + (k+1) w).
struct CorrelationHistogram {
  Picoseconds bin_width_ps = 0;
  Picoseconds window_lo_ps = 0;
  Picoseconds window_hi_ps = 0;
  std::vector<std::uint64_t> counts;
  std::uint64_t total_pairs = 0;
  // acquisition metadata
  int channel_a = 0;
  int channel_b = 1;
  Picoseconds duration_ps = 0;
  double rate_a_hz = 0.0;
  double rate_b_hz = 0.0;

  std::size_t bins() const noexcept { return counts.size(); }
  double bin_center(std::size_t i) const noexcept {
    return static_cast<double>(window_lo_ps) +
           (static_cast<double>(i) + 0.5) * static_cast<double>(bin_width_ps);
  }
  double bin_lo(std::size_t i) const noexcept {
    return static_cast<double>(window_lo_ps) +
           static_cast<double>(i) * static_cast<double>(bin_width_ps);
  }
};

/// All ordered pairs (t1 in a, t2 in b) with t1 - t2 inside the window,
/// counted with a two-pointer sweep. `threads` > 1 splits `a` into chunks
/// whose partial histograms are summed; the result is identical.
CorrelationHistogram cross_correlation(const TimeTagStream& a, const TimeTagStream& b,
                                       const HistogramConfig& config, unsigned threads = 1);

/// Inclusive-exclusive dt range used to pick sideband bins.
struct TimeRange {
  double lo_ps = 0.0;
  double hi_ps = 0.0;
};

struct NormalizedCorrelation {
  std::vector<double> g2;
  std::vector<double> g2_err;
  double floor = 0.0;      // C0, counts per bin
  double floor_err = 0.0;  // standard error of C0
  std::size_t sideband_bins = 0;
  bool peak_contamination = false;
};

constexpr std::size_t kMinSidebandBins = 10;

/// Divides by the mean of the bins whose centres fall in any `sideband`
/// range. Throws ConfigError for fewer than 10 sideband bins and
/// InsufficientDataError when the sideband holds no accidentals.
NormalizedCorrelation normalize_g2(const CorrelationHistogram& h,
                                   const std::vector<TimeRange>& sideband);

/// Outer `fraction` of the window on each side.
std::vector<TimeRange> default_sidebands(const CorrelationHistogram& h, double fraction = 0.15);

/// CSV with columns bin_center_ps, counts, g2, g2_err.
std::string histogram_csv(const CorrelationHistogram& h, const NormalizedCorrelation& g2);
/// Reads the `bin_center_ps, counts, ...` layout back. Bin width is inferred
/// from the centre spacing, which must be uniform and integral.
CorrelationHistogram parse_histogram_csv(const std::string& text);
CorrelationHistogram load_histogram_csv(const std::filesystem::path& path);

/// Uniformly sampled analog trace; sample i sits at t0 + i * period.
struct Waveform {
  double sample_period_ps = 0.0;
  std::vector<double> samples_mv;
  double t0_ps = 0.0;
};

enum class Edge { Rising, Falling };

/// First threshold crossing on the requested edge, linearly interpolated.
double threshold_crossing_time(const Waveform& w, double threshold_mv, Edge edge);

/// Timing spread from amplitude noise at a threshold: sigma_V / |dV/dt|.
double noise_jitter_estimate(double sigma_v_mv, double slope_mv_per_ps);

}  // namespace jitterkit
