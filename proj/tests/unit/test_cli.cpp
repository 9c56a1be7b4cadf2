#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/cli.hpp"
#include "jitterkit/correlation.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using jitterkit::cli::run;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Two Gaussian detectors, 1e5 pairs, no darks.
std::string sim_config(double sigma_a, double sigma_b, std::uint64_t seed) {
  json j = {{"pair_rate_hz", 1e5},
            {"duration_s", 1.0},
            {"seed", seed},
            {"detectors",
             {{"a",
               {{"response", {{"family", "gauss"}, {"mu_ps", 0.0}, {"sigma_ps", sigma_a}}},
                {"efficiency", 1.0},
                {"dark_rate_hz", 0.0},
                {"delay_ps", 0.0},
                {"dead_time_ps", 0.0}}},
              {"b",
               {{"response", {{"family", "gauss"}, {"mu_ps", 0.0}, {"sigma_ps", sigma_b}}},
                {"efficiency", 1.0},
                {"dark_rate_hz", 2e5},
                {"delay_ps", 0.0},
                {"dead_time_ps", 0.0}}}}}};
  return j.dump(2);
}

}  // namespace

TEST_CASE("help and usage") {
  CHECK(invoke({"--help"}).code == 0);
  for (const char* sub : {"tuning-curve", "histogram", "fit", "characterize", "subtract",
                          "simulate", "wavelength", "replay"}) {
    const auto r = invoke({sub, "--help"});
    CAPTURE(sub);
    CHECK(r.code == 0);
    CHECK(r.out.find("--") != std::string::npos);
  }
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"subtract", "--sigma12", "23.8,0.2"}).code == 2);
}

TEST_CASE("subtract") {
  const auto r = invoke({"subtract", "--sigma12", "23.8,0.2", "--sigma-ref", "16.7,0.1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("sigma_ps: 16.96") != std::string::npos);
  CHECK(r.out.find("fwhm_ps: 39.9") != std::string::npos);

  const auto bad = invoke({"subtract", "--sigma12", "16,0.1", "--sigma-ref", "16.7,0.1"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("unphysical") != std::string::npos);
  CHECK(invoke({"subtract", "--sigma12", "23.8;0.2", "--sigma-ref", "16.7"}).code == 2);
  CHECK(invoke({"subtract", "--sigma12", "23.8,-1", "--sigma-ref", "16.7"}).code == 2);
}

TEST_CASE("tuning-curve") {
  const auto dir = oracle::scratch_dir("cli_tuning");
  const auto one = invoke({"tuning-curve", "--points", "1"});
  CHECK(one.code == 2);
  CHECK(one.err.find("at least 2 points") != std::string::npos);

  const auto csv = dir / "curve.csv";
  const auto r = invoke({"tuning-curve", "--out", csv.string()});
  CHECK(r.code == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("theta_incidence_deg,theta_internal_deg,lambda_signal_nm,lambda_idler_nm,"
                   "residual",
                   0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 16);
  const auto manifest = json::parse(slurp(csv.string() + ".manifest.json"));
  CHECK(manifest["subcommand"] == "tuning-curve");
  CHECK(manifest["config"]["points"] == 15);
  CHECK(manifest["config"]["geometry"]["theta_cut_deg"] == 43.6);
  CHECK(manifest["outputs"][0]["sha256"].get<std::string>().size() == 64);

  const auto none = invoke({"tuning-curve", "--theta-start", "80", "--theta-end", "85"});
  CHECK(none.code == 3);
  CHECK(none.out.find("no-solution") != std::string::npos);

  const auto some = invoke({"tuning-curve", "--theta-start", "20", "--theta-end", "85"});
  CHECK(some.code == 0);
  CHECK(some.err.find("warning") != std::string::npos);
}

TEST_CASE("wavelength") {
  const auto dir = oracle::scratch_dir("cli_wavelength");
  std::string cal = "wavelength_nm,transmission\n";
  for (int i = 0; i <= 10; ++i) {
    cal += std::to_string(500 + 10 * i) + "," + std::to_string(0.1 * i) + "\n";
  }
  write(dir / "filter.csv", cal);
  const auto r = invoke({"wavelength", "--filter", (dir / "filter.csv").string(),
                         "--transmission", "0.31,0.02", "--calibration-uncertainty", "1.5"});
  CHECK(r.code == 0);
  CHECK(r.out.find("wavelength_nm: 531.00 +/- 2.50") != std::string::npos);
  const auto flat = invoke(
      {"wavelength", "--filter", (dir / "filter.csv").string(), "--transmission", "1.5"});
  CHECK(flat.code == 2);
}

TEST_CASE("histogram errors") {
  const auto dir = oracle::scratch_dir("cli_histogram");
  write(dir / "a.csv", "0\n100\n200\n");
  const auto missing = invoke({"histogram", "--a", (dir / "a.csv").string(), "--b",
                               (dir / "absent.csv").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("absent.csv") != std::string::npos);
  const auto bin0 = invoke({"histogram", "--a", (dir / "a.csv").string(), "--b",
                            (dir / "a.csv").string(), "--bin", "0"});
  CHECK(bin0.code == 2);
  CHECK(bin0.err.find("bin width") != std::string::npos);
  write(dir / "bad.csv", "0\n1x\n");
  CHECK(invoke({"histogram", "--a", (dir / "bad.csv").string(), "--b", (dir / "a.csv").string()})
            .code == 2);
}

TEST_CASE("simulate, histogram, fit and replay") {
  const auto dir = oracle::scratch_dir("cli_pipeline");
  write(dir / "sim.json", sim_config(16.7, 16.7, 9));
  const auto a = (dir / "a.bin").string();
  const auto b = (dir / "b.bin").string();
  const auto sim = invoke({"simulate", "--config", (dir / "sim.json").string(), "--out-a", a,
                           "--out-b", b, "--format", "bin"});
  REQUIRE(sim.code == 0);
  CHECK(fs::exists(a + ".truth.json"));
  CHECK(fs::exists(a + ".manifest.json"));
  const auto sim_manifest = json::parse(slurp(a + ".manifest.json"));
  CHECK(sim_manifest["seed"] == 9);

  const auto hist = (dir / "h.csv").string();
  const auto h = invoke(
      {"histogram", "--a", a, "--b", b, "--bin", "8", "--window", "1000", "--out", hist});
  REQUIRE(h.code == 0);
  // Sideband g2 averages to one.
  const auto hc = jitterkit::load_histogram_csv(hist);
  std::istringstream rows(slurp(hist));
  std::string line;
  std::getline(rows, line);
  double sum = 0.0;
  int n = 0;
  while (std::getline(rows, line)) {
    double center = 0, counts = 0, g2 = 0;
    std::sscanf(line.c_str(), "%lf,%lf,%lf", &center, &counts, &g2);
    if (center < -700.0 || center >= 700.0) {  // outer 15% of the window
      sum += g2;
      ++n;
    }
  }
  CHECK(n > 30);
  CHECK(sum / n == doctest::Approx(1.0).epsilon(1e-9));

  const auto fit_out = (dir / "fit.json").string();
  const auto f = invoke({"fit", "--histogram", hist, "--model", "gauss", "--sigma-ref", "0",
                         "--out", fit_out});
  CHECK(f.code == 0);
  const auto fj = json::parse(slurp(fit_out));
  const double sigma = fj["fit"]["parameters"]["sigma"]["value"];
  const double err = fj["fit"]["parameters"]["sigma"]["error"];
  CHECK(std::abs(sigma - std::hypot(16.7, 16.7)) < 3.0 * err);

  // Each manifest reproduces its outputs bit for bit.
  for (const auto& m : {a + ".manifest.json", hist + ".manifest.json",
                        fit_out + ".manifest.json"}) {
    const auto r = invoke({"replay", m, "--into", (dir / "replay").string()});
    CAPTURE(m);
    CAPTURE(r.err);
    CHECK(r.code == 0);
    CHECK(r.out.find("MISMATCH") == std::string::npos);
    CHECK(r.out.find("match") != std::string::npos);
  }

  // A changed input is refused.
  write(dir / "sim.json", sim_config(16.7, 16.7, 10));
  CHECK(invoke({"replay", a + ".manifest.json"}).code == 1);

  // Capped iterations: flagged result, exit 4.
  const auto capped = invoke({"fit", "--histogram", hist, "--model", "gauss-exp",
                              "--max-iterations", "1", "--out", (dir / "capped.json").string()});
  CHECK(capped.code == 4);
  CHECK(json::parse(slurp(dir / "capped.json"))["fit"]["converged"] == false);
}

TEST_CASE("fit on a flat histogram") {
  const auto dir = oracle::scratch_dir("cli_flat");
  std::string csv = "bin_center_ps,counts,g2,g2_err\n";
  for (int i = 0; i < 200; ++i) csv += std::to_string(-399 + 4 * i) + ",50,1,0.1\n";
  write(dir / "flat.csv", csv);
  const auto r = invoke({"fit", "--histogram", (dir / "flat.csv").string()});
  CHECK(r.code == 4);
  CHECK(r.err.find("acquire longer") != std::string::npos);
}

TEST_CASE("characterize end to end") {
  const auto dir = oracle::scratch_dir("cli_characterize");
  write(dir / "sim.json", sim_config(30.0, 17.0, 21));
  const auto dut = (dir / "dut.csv").string();
  const auto ref = (dir / "ref.csv").string();
  REQUIRE(invoke({"simulate", "--config", (dir / "sim.json").string(), "--out-a", dut, "--out-b",
                  ref})
              .code == 0);
  const auto out = (dir / "report.json").string();
  const auto r = invoke({"characterize", "--dut", dut, "--ref", ref, "--model", "gauss",
                         "--sigma-ref", "17,0.1", "--bin", "4", "--window", "1000", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out + ".histogram.csv"));
  const auto j = json::parse(slurp(out));
  const double sigma = j["dut_jitter"]["sigma_ps"]["value"];
  const double err = j["dut_jitter"]["sigma_ps"]["error"];
  CHECK(std::abs(sigma - 30.0) < 3.0 * err);

  const auto replay = invoke({"replay", out + ".manifest.json"});
  CHECK(replay.code == 0);

  const auto stage = invoke({"characterize", "--dut", dut, "--ref", ref, "--sigma-ref", "17",
                             "--bin", "3", "--window", "1000", "--out", out});
  CHECK(stage.code == 2);
  CHECK(stage.err.find("stage cross_correlation") != std::string::npos);
}
