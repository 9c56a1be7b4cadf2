#include "jitterkit/serialize.hpp"

#include "jitterkit/error.hpp"

namespace jitterkit {
namespace {

using nlohmann::json;

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

json measured(double value, double error) { return {{"value", value}, {"error", error}}; }

json detector_to_json(const DetectorConfig& d) {
  return {{"response", to_json(d.response)},
          {"efficiency", d.efficiency},
          {"dark_rate_hz", d.dark_rate_hz},
          {"delay_ps", d.delay_ps},
          {"dead_time_ps", d.dead_time_ps}};
}

DetectorConfig detector_from_json(const json& j) {
  DetectorConfig d;
  if (!j.contains("response")) throw ConfigError("detector needs a 'response' model");
  d.response = model_from_json(j.at("response"));
  d.efficiency = number_or(j, "efficiency", d.efficiency);
  d.dark_rate_hz = number_or(j, "dark_rate_hz", d.dark_rate_hz);
  d.delay_ps = number_or(j, "delay_ps", d.delay_ps);
  d.dead_time_ps = number_or(j, "dead_time_ps", d.dead_time_ps);
  return d;
}

}  // namespace

json to_json(const ResponseModel& m) {
  if (const auto* g = std::get_if<Gaussian>(&m)) {
    return {{"family", "gauss"}, {"mu_ps", g->mu}, {"sigma_ps", g->sigma}};
  }
  if (const auto* g = std::get_if<GaussExpTail>(&m)) {
    return {{"family", "gauss-exp"}, {"A", g->A},           {"B", g->B},
            {"mu_ps", g->mu},        {"sigma_ps", g->sigma}, {"tau_ps", g->tau}};
  }
  const auto& g = std::get<DoubleGaussian>(m);
  return {{"family", "double-gauss"}, {"A", g.A},
          {"B", g.B},                 {"mu1_ps", g.mu1},
          {"sigma1_ps", g.sigma1},    {"mu2_ps", g.mu2},
          {"sigma2_ps", g.sigma2}};
}

ResponseModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
    throw ConfigError("response model needs a string 'family' field");
  }
  ResponseModel m;
  switch (parse_model_family(j.at("family").get<std::string>())) {
    case ModelFamily::Gaussian:
      m = Gaussian{number_or(j, "mu_ps", 0.0), number(j, "sigma_ps")};
      break;
    case ModelFamily::GaussExpTail:
      m = GaussExpTail{number(j, "A"), number(j, "B"), number_or(j, "mu_ps", 0.0),
                       number(j, "sigma_ps"), number(j, "tau_ps")};
      break;
    case ModelFamily::DoubleGaussian:
      m = DoubleGaussian{number(j, "A"),         number(j, "B"),
                         number_or(j, "mu1_ps", 0.0), number(j, "sigma1_ps"),
                         number_or(j, "mu2_ps", 0.0), number(j, "sigma2_ps")};
      break;
  }
  validate(m);
  return m;
}

json to_json(const SimConfig& c) {
  return {{"pair_rate_hz", c.pair_rate_hz},
          {"duration_s", c.duration_s},
          {"seed", c.seed},
          {"detectors", {{"a", detector_to_json(c.a)}, {"b", detector_to_json(c.b)}}}};
}

SimConfig sim_config_from_json(const json& j) {
  SimConfig c;
  c.pair_rate_hz = number_or(j, "pair_rate_hz", c.pair_rate_hz);
  c.duration_s = number_or(j, "duration_s", c.duration_s);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be an unsigned integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (!j.contains("detectors") || !j.at("detectors").contains("a") ||
      !j.at("detectors").contains("b")) {
    throw ConfigError("simulation config needs detectors.a and detectors.b");
  }
  c.a = detector_from_json(j.at("detectors").at("a"));
  c.b = detector_from_json(j.at("detectors").at("b"));
  validate(c);
  return c;
}

json to_json(const SimTruth& t) {
  return {{"pairs_emitted", t.pairs_emitted},
          {"pairs_detected_both", t.pairs_detected_both},
          {"darks_a", t.darks_a},
          {"darks_b", t.darks_b},
          {"dead_time_dropped_a", t.dead_time_dropped_a},
          {"dead_time_dropped_b", t.dead_time_dropped_b},
          {"out_of_range_dropped", t.out_of_range_dropped}};
}

json to_json(const JitterValue& j) {
  json out = {{"sigma_ps", measured(j.sigma, j.sigma_err)},
              {"fwhm_ps", measured(j.fwhm(), j.fwhm_err())}};
  if (j.wavelength_nm) out["wavelength_nm"] = *j.wavelength_nm;
  return out;
}

json to_json(const FitResult& r) {
  json params = json::object();
  for (const auto& p : r.parameters) params[p.name] = measured(p.value, p.error);
  json fom = {{"fwhm_ps", measured(r.figure.fwhm, r.fwhm_err)},
              {"multimodal", r.figure.multimodal},
              {"first_component_integral", r.figure.first_component_integral},
              {"second_component_integral", r.figure.second_component_integral}};
  if (r.figure.ratio_R) fom["ratio_R"] = measured(*r.figure.ratio_R, r.ratio_R_err.value_or(0.0));
  const std::size_t n = r.parameters.size();
  json cov = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(r.covariance[i * n + j]);
    cov.push_back(std::move(row));
  }
  return {{"family", to_string(r.family)},
          {"parameters", std::move(params)},
          {"covariance", std::move(cov)},
          {"model", to_json(r.model)},
          {"sigma_ref_ps", r.sigma_ref},
          {"chi2", r.chi2},
          {"reduced_chi2", r.reduced_chi2},
          {"degrees_of_freedom", r.degrees_of_freedom},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"figure_of_merit", std::move(fom)}};
}

json to_json(const CharacterizationReport& r) {
  const auto& h = r.histogram;
  json guess = json::object();
  const auto names = parameter_names(r.guess.family);
  for (std::size_t i = 0; i < names.size() && i < r.guess.parameters.size(); ++i) {
    guess[names[i]] = r.guess.parameters[i];
  }
  json out = {
      {"histogram",
       {{"bin_width_ps", h.bin_width_ps},
        {"window_ps", {h.window_lo_ps, h.window_hi_ps}},
        {"bins", h.bins()},
        {"total_pairs", h.total_pairs},
        {"duration_ps", h.duration_ps},
        {"rate_dut_hz", h.rate_a_hz},
        {"rate_ref_hz", h.rate_b_hz}}},
      {"g2",
       {{"floor_per_bin", measured(r.g2.floor, r.g2.floor_err)},
        {"sideband_bins", r.g2.sideband_bins},
        {"peak_contamination", r.g2.peak_contamination}}},
      {"initial_guess", {{"parameters", std::move(guess)}, {"notes", r.guess.notes}}},
      {"reference", to_json(r.reference)},
      {"fit", to_json(r.fit)},
      {"dut_fwhm_ps", measured(r.dut_fwhm, r.dut_fwhm_err)},
  };
  if (r.dut_sigma) out["dut_jitter"] = to_json(*r.dut_sigma);
  return out;
}

}  // namespace jitterkit
