#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "jitterkit/correlation.hpp"
#include "jitterkit/error.hpp"
#include "oracles.hpp"

using namespace jitterkit;

namespace {

TimeTagStream stream(std::vector<Picoseconds> tags, Picoseconds duration, int channel = 0) {
  TimeTagStream s;
  s.channel = channel;
  s.tags = std::move(tags);
  s.duration_ps = duration;
  return s;
}

TimeTagStream random_stream(std::mt19937_64& rng, std::size_t n, Picoseconds span) {
  std::uniform_int_distribution<Picoseconds> u(0, span);
  std::vector<Picoseconds> t(n);
  for (auto& v : t) v = u(rng);
  std::sort(t.begin(), t.end());
  return stream(std::move(t), span);
}

TimeTagStream poisson_stream(std::mt19937_64& rng, double rate_hz, double seconds) {
  const double t_ps = seconds * 1e12;
  std::exponential_distribution<double> gap(rate_hz * 1e-12);
  std::vector<Picoseconds> t;
  for (double x = gap(rng); x < t_ps; x += gap(rng)) t.push_back(std::llround(x));
  return stream(std::move(t), static_cast<Picoseconds>(t_ps));
}

}  // namespace

TEST_CASE("single pair lands in the bin containing +100 ps") {
  const auto h = cross_correlation(stream({1000}, 2000), stream({900}, 2000), {-500, 500, 10});
  REQUIRE(h.bins() == 100);
  CHECK(h.total_pairs == 1);
  CHECK(h.counts[60] == 1);
  CHECK(h.bin_lo(60) == 100.0);
}

TEST_CASE("configuration errors") {
  const auto a = stream({1}, 10);
  CHECK_THROWS_AS(cross_correlation(a, a, {-500, 500, 0}), ConfigError);
  CHECK_THROWS_AS(cross_correlation(a, a, {-500, 505, 10}), ConfigError);
  CHECK_THROWS_AS(cross_correlation(a, a, {5, 5, 1}), ConfigError);
  CHECK_THROWS_AS(cross_correlation(stream({5, 3}, 10), a, {-5, 5, 1}), ConfigError);
}

TEST_CASE("count conservation against the brute-force pair count") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_stream(rng, 300 + 30 * trial, 200000);
    const auto b = random_stream(rng, 1000, 200000);
    const Picoseconds width = std::array<Picoseconds, 4>{1, 2, 5, 13}[trial % 4];
    const HistogramConfig cfg{-2990 - 13 * 5 * (trial % 3), 2990, width};
    if ((cfg.window_hi_ps - cfg.window_lo_ps) % cfg.bin_width_ps != 0) continue;
    const auto h = cross_correlation(a, b, cfg);
    const auto ref = oracle::brute_force_histogram(a.tags, b.tags, cfg.window_lo_ps,
                                                   cfg.window_hi_ps, cfg.bin_width_ps);
    CHECK(h.counts == ref);
    std::uint64_t sum = 0;
    for (auto c : ref) sum += c;
    CHECK(h.total_pairs == sum);
  }
  // Duplicate tags and coincident streams.
  const auto d = stream({5, 5, 5, 9, 9}, 10);
  const auto h = cross_correlation(d, d, {-4, 6, 2});
  CHECK(h.counts == oracle::brute_force_histogram(d.tags, d.tags, -4, 6, 2));
}

TEST_CASE("time-shift invariance and channel-swap antisymmetry") {
  std::mt19937_64 rng(11);
  auto a = random_stream(rng, 800, 100000);
  auto b = random_stream(rng, 800, 100000);
  const HistogramConfig cfg{-2000, 2000, 4};
  const auto h = cross_correlation(a, b, cfg);

  auto shifted_a = a;
  auto shifted_b = b;
  for (auto& t : shifted_a.tags) t += 123457;
  for (auto& t : shifted_b.tags) t += 123457;
  shifted_a.duration_ps += 123457;
  shifted_b.duration_ps += 123457;
  CHECK(cross_correlation(shifted_a, shifted_b, cfg).counts == h.counts);

  // Mirroring maps [lo, lo+w) onto (-lo-w, -lo]; with all differences odd
  // and edges even, no difference sits on an edge and the swap is bin-exact.
  for (auto& t : a.tags) t = 2 * t;
  for (auto& t : b.tags) t = 2 * t + 1;
  a.duration_ps = 2 * a.duration_ps + 1;
  b.duration_ps = 2 * b.duration_ps + 1;
  const auto ab = cross_correlation(a, b, cfg);
  const auto ba = cross_correlation(b, a, cfg);
  REQUIRE(ab.total_pairs > 0);
  for (std::size_t i = 0; i < ab.bins(); ++i) CHECK(ab.counts[i] == ba.counts[ab.bins() - 1 - i]);
}

TEST_CASE("parallel sweep is bit-identical to the sequential one") {
  std::mt19937_64 rng(3);
  const auto a = random_stream(rng, 50000, 50'000'000);
  const auto b = random_stream(rng, 50000, 50'000'000);
  const HistogramConfig cfg{-20000, 20000, 2};
  const auto seq = cross_correlation(a, b, cfg, 1);
  for (unsigned threads : {2u, 3u, 8u}) {
    CHECK(cross_correlation(a, b, cfg, threads).counts == seq.counts);
  }
}

TEST_CASE("independent Poisson streams give the analytic accidental rate") {
  // r1 = r2 = 1e5 /s over 10 s; bin 10 ps: r1 r2 T w = 1 count per bin.
  std::mt19937_64 rng(2024);
  const auto a = poisson_stream(rng, 1e5, 10.0);
  const auto b = poisson_stream(rng, 1e5, 10.0);
  const auto h = cross_correlation(a, b, {-500, 500, 10});
  REQUIRE(h.bins() == 100);
  const double expected = a.rate_hz() * b.rate_hz() * 10.0 * 10e-12;
  double mean = 0.0;
  for (auto c : h.counts) mean += static_cast<double>(c);
  mean /= 100.0;
  const double standard_error = std::sqrt(expected / 100.0);
  CHECK(std::abs(mean - expected) < 5.0 * standard_error);
  CHECK(expected == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("g2 normalization") {
  CorrelationHistogram flat;
  flat.bin_width_ps = 2;
  flat.window_lo_ps = -100;
  flat.window_hi_ps = 100;
  flat.counts.assign(100, 7);
  const auto g = normalize_g2(flat, default_sidebands(flat));
  CHECK(g.floor == 7.0);
  CHECK(g.floor_err == 0.0);
  for (double v : g.g2) CHECK(v == 1.0);
  CHECK_FALSE(g.peak_contamination);

  // Flat 100/bin plus a Gaussian peak of area 1e4.
  CorrelationHistogram peak;
  peak.bin_width_ps = 2;
  peak.window_lo_ps = -2000;
  peak.window_hi_ps = 2000;
  const double sigma = 25.0;
  for (int i = 0; i < 2000; ++i) {
    const double t = -2000 + 2 * i + 1.0;
    peak.counts.push_back(static_cast<std::uint64_t>(
        std::llround(100.0 + 1e4 * 2.0 * oracle::normal_pdf(sigma, t - 1.0))));
  }
  const auto gp = normalize_g2(peak, default_sidebands(peak));
  CHECK(gp.floor == doctest::Approx(100.0));
  const double gmax = *std::max_element(gp.g2.begin(), gp.g2.end());
  CHECK(gmax == doctest::Approx(1.0 + 1e4 * 2.0 * oracle::normal_pdf(sigma, 0.0) / 100.0)
                    .epsilon(0.01));
  CHECK_FALSE(gp.peak_contamination);

  // A sideband placed on the peak is biased and flagged.
  const auto bad = normalize_g2(peak, {{-30.0, 30.0}});
  CHECK(bad.floor > 150.0);
  CHECK(bad.peak_contamination);

  CHECK_THROWS_AS(normalize_g2(peak, {{-2000.0, -1990.0}}), ConfigError);
  CorrelationHistogram empty = flat;
  empty.counts.assign(100, 0);
  CHECK_THROWS_AS(normalize_g2(empty, default_sidebands(empty)), InsufficientDataError);
}

TEST_CASE("histogram CSV round trip") {
  std::mt19937_64 rng(5);
  const auto a = random_stream(rng, 2000, 1'000'000);
  const auto b = random_stream(rng, 2000, 1'000'000);
  const auto h = cross_correlation(a, b, {-1000, 1000, 4});
  const auto csv = histogram_csv(h, normalize_g2(h, default_sidebands(h)));
  CHECK(csv.rfind("bin_center_ps,counts,g2,g2_err\n", 0) == 0);
  const auto back = parse_histogram_csv(csv);
  CHECK(back.counts == h.counts);
  CHECK(back.bin_width_ps == 4);
  CHECK(back.window_lo_ps == -1000);
  CHECK(back.window_hi_ps == 1000);
  CHECK_THROWS_AS(parse_histogram_csv("bin_center_ps,counts\n1,2\n2,x\n"), ParseError);
}

TEST_CASE("threshold crossing by linear interpolation") {
  const Waveform ramp{100.0, {0.0, 10.0}, 0.0};
  CHECK(threshold_crossing_time(ramp, 5.0, Edge::Rising) == doctest::Approx(50.0));
  CHECK(threshold_crossing_time(ramp, 10.0, Edge::Rising) == doctest::Approx(100.0));
  CHECK_THROWS_WITH_AS(threshold_crossing_time(ramp, 20.0, Edge::Rising),
                       doctest::Contains("never crossed"), DomainError);
  CHECK_THROWS_AS(threshold_crossing_time(ramp, 5.0, Edge::Falling), DomainError);

  // SNSPD-like pulse: fast rise, slow fall; first crossing on each edge.
  const Waveform pulse{20.0, {0, 0, 50, 300, 350, 340, 250, 150, 60, 10, 0}, 1000.0};
  CHECK(threshold_crossing_time(pulse, 175.0, Edge::Rising) ==
        doctest::Approx(1000.0 + 20.0 * (2.0 + 125.0 / 250.0)));
  CHECK(threshold_crossing_time(pulse, 175.0, Edge::Falling) ==
        doctest::Approx(1000.0 + 20.0 * (6.0 + 75.0 / 100.0)));
  CHECK_THROWS_AS(threshold_crossing_time(Waveform{1.0, {1.0}, 0.0}, 0.5, Edge::Rising),
                  ConfigError);
}

TEST_CASE("noise jitter estimate") {
  CHECK(noise_jitter_estimate(0.0, 2.0) == 0.0);
  CHECK(noise_jitter_estimate(1.0, 1.0) == 1.0);
  CHECK(noise_jitter_estimate(3.0, -0.5) == 6.0);
  // 350 mV pulse rising over ~100 ps with 3 mV rms noise: about 15 ps scale.
  CHECK(noise_jitter_estimate(3.0, 0.2) == doctest::Approx(15.0));
  CHECK_THROWS_AS(noise_jitter_estimate(1.0, 0.0), DomainError);
}
