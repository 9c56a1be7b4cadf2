#include "cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <unistd.h>

#include "cli/cli.hpp"
#include "cli/manifest.hpp"
#include "cli/uncertain.hpp"
#include "jitterkit/correlation.hpp"
#include "jitterkit/error.hpp"
#include "jitterkit/fitting.hpp"
#include "jitterkit/phasematch.hpp"
#include "jitterkit/serialize.hpp"
#include "jitterkit/simulator.hpp"

namespace jitterkit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string with_error(double v, double e, int digits) {
  return fixed(v, digits) + " +/- " + fixed(e, digits);
}

/// Collects the resolved invocation while a command runs.
class Recorder {
 public:
  explicit Recorder(std::string subcommand) { m_.subcommand = std::move(subcommand); }

  void option(const std::string& flag, const std::string& value) {
    m_.options.emplace_back(flag, value);
  }
  void option(const std::string& flag, double value) { option(flag, exact(value)); }
  void option(const std::string& flag, long long value) { option(flag, std::to_string(value)); }
  void option(const std::string& flag, int value) { option(flag, std::to_string(value)); }
  void option(const std::string& flag, unsigned value) { option(flag, std::to_string(value)); }
  void option(const std::string& flag, std::uint64_t value) {
    option(flag, std::to_string(value));
  }
  void flag(const std::string& name) { m_.options.emplace_back(name, ""); }

  /// Records an input file and returns its absolute path.
  std::string input(const std::string& flag, const std::string& path) {
    const std::string abs = absolute(path);
    if (!fs::exists(abs)) throw IoError("input file does not exist: " + path);
    m_.inputs.push_back({flag, abs, sha256_file(abs)});
    option(flag, abs);
    return abs;
  }
  std::string output(const std::string& flag, const std::string& path) {
    const std::string abs = absolute(path);
    outputs_.emplace_back(flag, abs);
    option(flag, abs);
    return abs;
  }
  json& config() { return m_.config; }
  void seed(std::uint64_t s) { m_.seed = s; }

  /// Digests the outputs and writes the manifest next to the first one.
  int finish(int code) {
    if (outputs_.empty()) return code;
    for (const auto& [flag, path] : outputs_) m_.outputs.push_back({flag, path, sha256_file(path)});
    m_.version = JITTERKIT_VERSION;
    m_.timestamp = utc_timestamp();
    m_.exit_code = code;
    write_manifest(m_, manifest_path_for(outputs_.front().second));
    return code;
  }

 private:
  RunManifest m_;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

TimeTagFormat resolve_format(const std::string& name, const std::string& path) {
  return name == "auto" ? format_from_extension(path) : parse_timetag_format(name);
}

std::string format_name(TimeTagFormat f) { return f == TimeTagFormat::Csv ? "csv" : "bin"; }

json geometry_json(const SourceGeometry& g) {
  return {{"crystal", g.crystal.name},
          {"theta_cut_deg", g.theta_cut_deg},
          {"phi_cut_deg", g.phi_cut_deg},
          {"lambda_pump_nm", g.lambda_pump_nm},
          {"crystal_length_mm", g.crystal_length_mm},
          {"polarization", to_string(g.polarization)},
          {"rotation", to_string(g.rotation)}};
}

// ---------------------------------------------------------------- tuning-curve

Command tuning_curve_command(CLI::App& root) {
  struct Opts {
    double start = 12.7;
    double end = 26.7;
    int points = 15;
    std::string geometry;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("tuning-curve", "Signal/idler wavelength versus angle of incidence");
  app->add_option("--theta-start", o->start, "First external angle of incidence, deg")
      ->capture_default_str();
  app->add_option("--theta-end", o->end, "Last external angle of incidence, deg")
      ->capture_default_str();
  app->add_option("--points", o->points, "Number of angles (>= 2)")->capture_default_str();
  app->add_option("--geometry", o->geometry, "Source geometry file (key=value)");
  app->add_option("--out", o->out, "CSV output path (default: stdout)");

  return {app, [o](Io& io) {
            Recorder rec("tuning-curve");
            rec.option("--theta-start", o->start);
            rec.option("--theta-end", o->end);
            rec.option("--points", o->points);
            SourceGeometry g = default_geometry();
            if (!o->geometry.empty()) g = load_geometry(rec.input("--geometry", o->geometry));
            rec.config() = {{"theta_start_deg", o->start},
                            {"theta_end_deg", o->end},
                            {"points", o->points},
                            {"geometry", geometry_json(g)}};

            const auto rows = tuning_curve(g, o->start, o->end, o->points);
            const std::string csv = tuning_curve_csv(rows);
            std::size_t failed = 0;
            for (const auto& r : rows) failed += !r.solution;

            if (o->out.empty()) {
              io.out << csv;
            } else {
              write_text(rec.output("--out", o->out), csv);
            }
            int code = kOk;
            if (failed == rows.size()) {
              io.err << "error: no angle in the sweep has a phase-matched solution ("
                     << rows.front().error << ")\n";
              code = kSolverError;
            } else if (failed > 0) {
              io.err << "warning: " << failed << " of " << rows.size()
                     << " angles have no phase-matched solution; rows flagged no-solution\n";
            }
            return rec.finish(code);
          }};
}

// ---------------------------------------------------------------- histogram

struct StreamOpts {
  std::string format = "auto";
  bool sort = false;
  long long bin = 2;
  long long window = 2000;
  std::optional<long long> window_lo;
  std::optional<long long> window_hi;
  unsigned threads = 1;
};

void add_stream_options(CLI::App* app, StreamOpts& s) {
  app->add_option("--format", s.format, "Time-tag format: auto, csv or bin")
      ->capture_default_str();
  app->add_flag("--sort", s.sort, "Sort unsorted time tags instead of rejecting them");
  app->add_option("--bin", s.bin, "Histogram bin width, ps")->capture_default_str();
  app->add_option("--window", s.window, "Half-width of a symmetric window, ps")
      ->capture_default_str();
  app->add_option("--window-lo", s.window_lo, "Window start, ps (overrides --window)");
  app->add_option("--window-hi", s.window_hi, "Window end, ps (overrides --window)");
  app->add_option("--threads", s.threads, "Worker threads for the pair sweep")
      ->capture_default_str();
}

HistogramConfig resolve_histogram(const StreamOpts& s, Recorder& rec) {
  HistogramConfig h;
  h.bin_width_ps = s.bin;
  h.window_lo_ps = s.window_lo.value_or(-s.window);
  h.window_hi_ps = s.window_hi.value_or(s.window);
  rec.option("--bin", static_cast<long long>(h.bin_width_ps));
  rec.option("--window-lo", static_cast<long long>(h.window_lo_ps));
  rec.option("--window-hi", static_cast<long long>(h.window_hi_ps));
  rec.option("--threads", s.threads);
  if (s.sort) rec.flag("--sort");
  return h;
}

TimeTagStream load_stream(Recorder& rec, const std::string& flag, const std::string& path,
                          const StreamOpts& s, int channel, json& cfg) {
  const std::string abs = rec.input(flag, path);
  const TimeTagFormat f = resolve_format(s.format, abs);
  cfg[flag.substr(2) + "_format"] = format_name(f);
  return load_timetags(abs, f, {s.sort, channel});
}

Command histogram_command(CLI::App& root) {
  struct Opts {
    std::string a;
    std::string b;
    std::string out;
    StreamOpts s;
    double sideband_fraction = 0.15;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("histogram", "Cross-correlation histogram with g2 normalization");
  app->add_option("--a", o->a, "Time tags of channel a (dt = t_a - t_b)")->required();
  app->add_option("--b", o->b, "Time tags of channel b")->required();
  app->add_option("--out", o->out, "CSV output path (default: stdout)");
  app->add_option("--sideband-fraction", o->sideband_fraction,
                  "Outer fraction of the window on each side used as the g2 floor")
      ->capture_default_str();
  add_stream_options(app, o->s);

  return {app, [o](Io& io) {
            Recorder rec("histogram");
            rec.option("--format", o->s.format);
            json cfg;
            const auto a = load_stream(rec, "--a", o->a, o->s, 0, cfg);
            const auto b = load_stream(rec, "--b", o->b, o->s, 1, cfg);
            const HistogramConfig hc = resolve_histogram(o->s, rec);
            rec.option("--sideband-fraction", o->sideband_fraction);

            const auto h = cross_correlation(a, b, hc, o->s.threads);
            const auto g2 = normalize_g2(h, default_sidebands(h, o->sideband_fraction));
            cfg.update({{"bin_width_ps", hc.bin_width_ps},
                        {"window_ps", {hc.window_lo_ps, hc.window_hi_ps}},
                        {"sideband_fraction", o->sideband_fraction},
                        {"threads", o->s.threads},
                        {"sort", o->s.sort}});
            rec.config() = cfg;

            const std::string csv = histogram_csv(h, g2);
            if (o->out.empty()) {
              io.out << csv;
            } else {
              write_text(rec.output("--out", o->out), csv);
              io.out << "pairs in window: " << h.total_pairs << "\n"
                     << "accidental floor per bin: " << with_error(g2.floor, g2.floor_err, 3)
                     << "\n";
            }
            if (g2.peak_contamination) {
              io.err << "warning: sideband mean exceeds its median; the g2 floor may include "
                        "correlated counts\n";
            }
            return rec.finish(kOk);
          }};
}

// ---------------------------------------------------------------- fit

void print_fit(std::ostream& out, const FitResult& r) {
  out << "model: " << to_string(r.family) << (r.converged ? "" : " (NOT CONVERGED)") << "\n";
  for (const auto& p : r.parameters) {
    out << "  " << p.name << " = " << p.value << " +/- " << p.error << "\n";
  }
  out << "reduced chi2: " << fixed(r.reduced_chi2, 3) << " (dof " << r.degrees_of_freedom
      << ", " << r.iterations << " iterations)\n";
  out << "fwhm_ps: " << with_error(r.figure.fwhm, r.fwhm_err, 2)
      << (r.figure.multimodal ? " (multimodal)" : "") << "\n";
  if (r.figure.ratio_R) {
    out << "ratio_R: " << with_error(*r.figure.ratio_R, r.ratio_R_err.value_or(0.0), 3) << "\n";
  }
}

int fit_exit(const FitResult& r, Io& io) {
  if (r.converged) return kOk;
  io.err << "error: fit did not converge after " << r.iterations
         << " iterations; result written with converged=false\n";
  return kFitError;
}

Command fit_command(CLI::App& root) {
  struct Opts {
    std::string histogram;
    std::string out;
    std::string model = "gauss";
    std::string sigma_ref = "0";
    std::optional<double> fit_lo;
    std::optional<double> fit_hi;
    int max_iterations = 500;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("fit", "Fit a response model to a histogram CSV");
  app->add_option("--histogram", o->histogram, "Histogram CSV (bin_center_ps, counts, ...)")
      ->required();
  app->add_option("--model", o->model, "gauss, gauss-exp or double-gauss")->capture_default_str();
  app->add_option("--sigma-ref", o->sigma_ref, "Reference jitter sigma, ps, as value[,error]")
      ->capture_default_str();
  app->add_option("--fit-lo", o->fit_lo, "Fit range start, ps");
  app->add_option("--fit-hi", o->fit_hi, "Fit range end, ps");
  app->add_option("--max-iterations", o->max_iterations)->capture_default_str();
  app->add_option("--out", o->out, "JSON result path");

  return {app, [o](Io& io) {
            Recorder rec("fit");
            const auto h = load_histogram_csv(rec.input("--histogram", o->histogram));
            const ModelFamily family = parse_model_family(o->model);
            const Uncertain sref = parse_uncertain(o->sigma_ref, "--sigma-ref");
            rec.option("--model", to_string(family));
            rec.option("--sigma-ref", to_string(sref));
            FitOptions fo;
            fo.max_iterations = o->max_iterations;
            rec.option("--max-iterations", o->max_iterations);
            if (o->fit_lo || o->fit_hi) {
              fo.fit_range = TimeRange{o->fit_lo.value_or(-1e300), o->fit_hi.value_or(1e300)};
              if (o->fit_lo) rec.option("--fit-lo", *o->fit_lo);
              if (o->fit_hi) rec.option("--fit-hi", *o->fit_hi);
            }
            rec.config() = {{"model", to_string(family)},
                            {"sigma_ref_ps", {{"value", sref.value}, {"error", sref.error}}},
                            {"max_iterations", fo.max_iterations},
                            {"fit_range_ps", fo.fit_range ? json{fo.fit_range->lo_ps,
                                                                 fo.fit_range->hi_ps}
                                                          : json(nullptr)}};

            const auto r = fit_histogram(h, family, sref.value, std::nullopt, fo);
            print_fit(io.out, r);
            if (!o->out.empty()) {
              json j = {{"fit", to_json(r)},
                        {"reference", to_json(JitterValue{sref.value, sref.error, std::nullopt})}};
              write_text(rec.output("--out", o->out), j.dump(2) + "\n");
            }
            return rec.finish(fit_exit(r, io));
          }};
}

// ---------------------------------------------------------------- characterize

Command characterize_command(CLI::App& root) {
  struct Opts {
    std::string dut;
    std::string ref;
    std::string model = "gauss";
    std::string sigma_ref;
    std::string out;
    std::string histogram_out;
    StreamOpts s;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand(
      "characterize", "Histogram, normalize, fit and report a detector's response");
  app->add_option("--dut", o->dut, "Time tags of the detector under test")->required();
  app->add_option("--ref", o->ref, "Time tags of the reference detector")->required();
  app->add_option("--model", o->model, "gauss, gauss-exp or double-gauss")->capture_default_str();
  app->add_option("--sigma-ref", o->sigma_ref, "Reference jitter sigma, ps, as value[,error]")
      ->required();
  app->add_option("--out", o->out, "JSON report path")->required();
  app->add_option("--histogram-out", o->histogram_out,
                  "Histogram CSV path (default: <out>.histogram.csv)");
  add_stream_options(app, o->s);

  return {app, [o](Io& io) {
            Recorder rec("characterize");
            rec.option("--format", o->s.format);
            json cfg;
            const auto dut = load_stream(rec, "--dut", o->dut, o->s, 0, cfg);
            const auto ref = load_stream(rec, "--ref", o->ref, o->s, 1, cfg);
            const ModelFamily family = parse_model_family(o->model);
            const Uncertain sref = parse_uncertain(o->sigma_ref, "--sigma-ref");
            rec.option("--model", to_string(family));
            rec.option("--sigma-ref", to_string(sref));
            CharacterizeConfig cc;
            cc.histogram = resolve_histogram(o->s, rec);
            cc.threads = o->s.threads;
            const std::string report_path = rec.output("--out", o->out);
            const std::string hist_path = rec.output(
                "--histogram-out",
                o->histogram_out.empty() ? o->out + ".histogram.csv" : o->histogram_out);
            cfg.update({{"model", to_string(family)},
                        {"sigma_ref_ps", {{"value", sref.value}, {"error", sref.error}}},
                        {"bin_width_ps", cc.histogram.bin_width_ps},
                        {"window_ps", {cc.histogram.window_lo_ps, cc.histogram.window_hi_ps}},
                        {"sidebands", "outer 15% of the window on each side"},
                        {"fit_range", "whole histogram"},
                        {"threads", cc.threads},
                        {"sort", o->s.sort}});
            rec.config() = cfg;

            const auto report =
                characterize(dut, ref, {sref.value, sref.error, std::nullopt}, family, cc);
            write_text(hist_path, histogram_csv(report.histogram, report.g2));
            write_text(report_path, to_json(report).dump(2) + "\n");
            print_fit(io.out, report.fit);
            if (report.dut_sigma) {
              io.out << "dut sigma_ps: "
                     << with_error(report.dut_sigma->sigma, report.dut_sigma->sigma_err, 2)
                     << "\n";
            }
            return rec.finish(fit_exit(report.fit, io));
          }};
}

// ---------------------------------------------------------------- subtract

Command subtract_command(CLI::App& root) {
  struct Opts {
    std::string sigma12;
    std::string sigma_ref;
    std::optional<double> wavelength;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand(
      "subtract", "Remove a reference jitter in quadrature: sqrt(sigma12^2 - sigma_ref^2)");
  app->add_option("--sigma12", o->sigma12, "Combined sigma, ps, as value[,error]")->required();
  app->add_option("--sigma-ref", o->sigma_ref, "Reference sigma, ps, as value[,error]")
      ->required();
  app->add_option("--wavelength", o->wavelength, "Wavelength metadata for the result, nm");
  app->add_option("--out", o->out, "JSON result path");

  return {app, [o](Io& io) {
            Recorder rec("subtract");
            const Uncertain s12 = parse_uncertain(o->sigma12, "--sigma12");
            const Uncertain sr = parse_uncertain(o->sigma_ref, "--sigma-ref");
            rec.option("--sigma12", to_string(s12));
            rec.option("--sigma-ref", to_string(sr));
            if (o->wavelength) rec.option("--wavelength", *o->wavelength);
            rec.config() = {{"sigma12_ps", {{"value", s12.value}, {"error", s12.error}}},
                            {"sigma_ref_ps", {{"value", sr.value}, {"error", sr.error}}}};
            const auto r = subtract_reference({s12.value, s12.error, o->wavelength},
                                              {sr.value, sr.error, std::nullopt});
            io.out << "sigma_ps: " << with_error(r.sigma, r.sigma_err, 2) << "\n"
                   << "fwhm_ps: " << with_error(r.fwhm(), r.fwhm_err(), 1) << "\n";
            if (!o->out.empty()) {
              write_text(rec.output("--out", o->out), to_json(r).dump(2) + "\n");
            }
            return rec.finish(kOk);
          }};
}

// ---------------------------------------------------------------- simulate

Command simulate_command(CLI::App& root) {
  struct Opts {
    std::string config;
    std::string out_a;
    std::string out_b;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::string truth;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand("simulate", "Monte Carlo photon-pair time tags");
  app->add_option("--config", o->config, "Simulation config (JSON)")->required();
  app->add_option("--out-a", o->out_a, "Time tags of detector a")->required();
  app->add_option("--out-b", o->out_b, "Time tags of detector b")->required();
  app->add_option("--format", o->format, "csv or bin")->capture_default_str();
  app->add_option("--seed", o->seed, "Override the config's seed");
  app->add_option("--truth", o->truth, "Truth record path (default: <out-a>.truth.json)");

  return {app, [o](Io& io) {
            Recorder rec("simulate");
            const std::string cfg_path = rec.input("--config", o->config);
            std::ifstream in(cfg_path);
            SimConfig cfg;
            try {
              cfg = sim_config_from_json(json::parse(in));
            } catch (const json::parse_error& e) {
              throw ParseError(cfg_path + ": " + e.what(), e.byte);
            } catch (const json::exception& e) {
              throw ConfigError(cfg_path + ": " + e.what());
            }
            if (o->seed) cfg.seed = *o->seed;
            const TimeTagFormat fmt = parse_timetag_format(o->format);
            rec.option("--format", format_name(fmt));
            rec.option("--seed", cfg.seed);
            rec.seed(cfg.seed);
            rec.config() = to_json(cfg);

            const auto sim = simulate(cfg);
            save_timetags(sim.a, rec.output("--out-a", o->out_a), fmt);
            save_timetags(sim.b, rec.output("--out-b", o->out_b), fmt);
            const json truth = {{"truth", to_json(sim.truth)},
                                {"tags_a", sim.a.size()},
                                {"tags_b", sim.b.size()},
                                {"expected_true_coincidences", expected_true_coincidences(cfg)},
                                {"expected_accidentals_per_ps", expected_accidentals(cfg, 1.0)},
                                {"config", to_json(cfg)}};
            write_text(rec.output("--truth", o->truth.empty() ? o->out_a + ".truth.json"
                                                              : o->truth),
                       truth.dump(2) + "\n");
            io.out << "pairs emitted: " << sim.truth.pairs_emitted
                   << ", detected on both: " << sim.truth.pairs_detected_both << "\n"
                   << "tags: a " << sim.a.size() << ", b " << sim.b.size() << "\n";
            return rec.finish(kOk);
          }};
}

// ---------------------------------------------------------------- wavelength

Command wavelength_command(CLI::App& root) {
  struct Opts {
    std::string filter;
    std::string transmission;
    double calibration_uncertainty = 0.0;
    std::string out;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand(
      "wavelength", "Signal wavelength from a measured longpass-filter transmission");
  app->add_option("--filter", o->filter, "Filter calibration CSV (wavelength_nm, transmission)")
      ->required();
  app->add_option("--transmission", o->transmission, "Measured transmission as value[,error]")
      ->required();
  app->add_option("--calibration-uncertainty", o->calibration_uncertainty,
                  "Wavelength uncertainty of the calibration, nm")
      ->capture_default_str();
  app->add_option("--out", o->out, "JSON result path");

  return {app, [o](Io& io) {
            Recorder rec("wavelength");
            const auto cal = load_filter_calibration(rec.input("--filter", o->filter),
                                                     o->calibration_uncertainty);
            const Uncertain t = parse_uncertain(o->transmission, "--transmission");
            rec.option("--transmission", to_string(t));
            rec.option("--calibration-uncertainty", o->calibration_uncertainty);
            rec.config() = {{"transmission", {{"value", t.value}, {"error", t.error}}},
                            {"calibration_uncertainty_nm", o->calibration_uncertainty}};
            const auto w = wavelength_from_transmission(cal, t.value, t.error);
            io.out << "wavelength_nm: " << with_error(w.wavelength_nm, w.uncertainty_nm, 2) << "\n";
            if (!o->out.empty()) {
              const json j = {{"wavelength_nm",
                               {{"value", w.wavelength_nm}, {"error", w.uncertainty_nm}}},
                              {"filter", cal.name}};
              write_text(rec.output("--out", o->out), j.dump(2) + "\n");
            }
            return rec.finish(kOk);
          }};
}

// ---------------------------------------------------------------- replay

fs::path fresh_directory() {
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  fs::path dir = fs::temp_directory_path() /
                 ("jitterkit-replay-" + std::to_string(::getpid()) + "-" + std::to_string(stamp));
  fs::create_directories(dir);
  return dir;
}

Command replay_command(CLI::App& root) {
  struct Opts {
    std::string manifest;
    std::string into;
  };
  auto o = std::make_shared<Opts>();
  auto* app = root.add_subcommand(
      "replay", "Rerun a manifest into a scratch directory and compare output digests");
  app->add_option("manifest", o->manifest, "Manifest written next to an output")->required();
  app->add_option("--into", o->into, "Directory for the replayed outputs (default: temp)");

  return {app, [o](Io& io) {
            const RunManifest m = read_manifest(o->manifest);
            for (const auto& f : m.inputs) {
              if (!fs::exists(f.path) || sha256_file(f.path) != f.sha256) {
                io.err << "error: input " << f.path << " (" << f.option
                       << ") is missing or changed since the run\n";
                return static_cast<int>(kReplayMismatch);
              }
            }
            const fs::path dir = o->into.empty() ? fresh_directory() : fs::path(o->into);
            fs::create_directories(dir);

            RunManifest rerun = m;
            std::vector<std::string> replayed_paths;
            for (const auto& f : m.outputs) {
              const std::string target = absolute((dir / fs::path(f.path).filename()).string());
              for (auto& [flag, value] : rerun.options) {
                if (flag == f.option) value = target;
              }
              replayed_paths.push_back(target);
            }
            std::ostringstream sink_out;
            std::ostringstream sink_err;
            const int code = run(rerun.command_line(), sink_out, sink_err);
            if (code != m.exit_code) {
              io.err << "error: replay exited " << code << ", recorded " << m.exit_code << "\n"
                     << sink_err.str();
              return static_cast<int>(kReplayMismatch);
            }
            bool all = true;
            for (std::size_t i = 0; i < m.outputs.size(); ++i) {
              const bool same = fs::exists(replayed_paths[i]) &&
                                sha256_file(replayed_paths[i]) == m.outputs[i].sha256;
              io.out << (same ? "match    " : "MISMATCH ") << m.outputs[i].option << " "
                     << replayed_paths[i] << "\n";
              all = all && same;
            }
            return static_cast<int>(all ? kOk : kReplayMismatch);
          }};
}

}  // namespace

std::vector<Command> add_commands(CLI::App& root) {
  return {tuning_curve_command(root), histogram_command(root),    fit_command(root),
          characterize_command(root), subtract_command(root),     simulate_command(root),
          wavelength_command(root),   replay_command(root)};
}

}  // namespace jitterkit::cli
