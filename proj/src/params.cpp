#include "cfswipt/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cfswipt {

void SystemParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("SystemParams: " + msg); };

  if (num_aps <= 0) fail("M must be positive");
  if (antennas_per_ap <= 0) fail("N must be positive");
  if (num_ius <= 0) fail("K_d must be positive");
  if (num_eus <= 0) fail("L must be positive");
  if (coherence_symbols <= 0) fail("tau_c must be positive");
  if (pilot_symbols < num_ius + num_eus) fail("tau >= K_d + L required for orthogonal pilots");
  if (pilot_symbols >= coherence_symbols) fail("tau < tau_c required");
  if (antennas_per_ap <= num_ius) fail("N > K_d required by partial zero-forcing");
  if (!(p_ap_w > 0.0)) fail("p_ap must be > 0");
  if (!(p_pilot_w > 0.0)) fail("p_pilot must be > 0");
  if (!(noise_power_w > 0.0)) fail("noise_power must be > 0");
  if (!(area_side_m > 0.0)) fail("area_side must be > 0");
  if (!(eh_steepness > 0.0)) fail("xi must be > 0");
  if (!(eh_threshold_w > 0.0)) fail("chi must be > 0");
  if (!(eh_saturation_w > 0.0)) fail("phi must be > 0");
  if (se_target < 0.0) fail("se_target must be >= 0");
  if (sca_tol <= 0.0) fail("sca_tol must be > 0");
  if (shadow_sigma_db < 0.0) fail("shadow_sigma_db must be >= 0");
  if (!(he_targets_w.empty() || he_targets_w.size() == 1 ||
        he_targets_w.size() == static_cast<size_t>(num_eus)))
    fail("he_targets must be empty, scalar, or length L");
  for (double g : he_targets_w) {
    if (g < 0.0) fail("he_targets must be >= 0");
    if (g >= eh_saturation_w) fail("he_targets must lie below the saturation phi");
  }
  if (!std::isfinite(dl_snr()) || !std::isfinite(pilot_snr()))
    fail("normalized SNRs must be finite");
}

namespace {

using nlohmann::json;

double get_num(const json& j, const char* key, double fallback, bool* seen = nullptr) {
  if (!j.contains(key)) return fallback;
  if (seen) *seen = true;
  return j.at(key).get<double>();
}

}  // namespace

SystemParams SystemParams::from_json_text(const std::string& text) {
  json j = json::parse(text);
  SystemParams p;
  p.num_aps = static_cast<int>(get_num(j, "M", p.num_aps));
  p.antennas_per_ap = static_cast<int>(get_num(j, "N", p.antennas_per_ap));
  p.num_ius = static_cast<int>(get_num(j, "K_d", p.num_ius));
  p.num_eus = static_cast<int>(get_num(j, "L", p.num_eus));
  p.coherence_symbols = static_cast<int>(get_num(j, "tau_c", p.coherence_symbols));
  // tau defaults to K_d + L when the config omits it.
  p.pilot_symbols = static_cast<int>(get_num(j, "tau", p.num_ius + p.num_eus));
  p.p_ap_w = get_num(j, "p_ap", p.p_ap_w);
  p.p_pilot_w = get_num(j, "p_pilot", p.p_pilot_w);
  p.noise_power_w = get_num(j, "noise_power", p.noise_power_w);
  p.area_side_m = get_num(j, "area_side", p.area_side_m);
  p.eh_steepness = get_num(j, "xi", p.eh_steepness);
  p.eh_threshold_w = get_num(j, "chi", p.eh_threshold_w);
  p.eh_saturation_w = get_num(j, "phi", p.eh_saturation_w);
  p.se_target = get_num(j, "se_target", p.se_target);
  p.sca_tol = get_num(j, "sca_tol", p.sca_tol);
  p.shadow_sigma_db = get_num(j, "shadow_sigma_db", p.shadow_sigma_db);
  if (j.contains("correlated_shadowing")) p.correlated_shadowing = j.at("correlated_shadowing").get<bool>();
  if (j.contains("he_targets")) {
    const auto& t = j.at("he_targets");
    p.he_targets_w.clear();
    if (t.is_number()) {
      p.he_targets_w.push_back(t.get<double>());
    } else {
      for (const auto& v : t) p.he_targets_w.push_back(v.get<double>());
    }
  }
  p.validate();
  return p;
}

SystemParams SystemParams::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string SystemParams::to_json_text() const {
  json j;
  j["M"] = num_aps;
  j["N"] = antennas_per_ap;
  j["K_d"] = num_ius;
  j["L"] = num_eus;
  j["tau_c"] = coherence_symbols;
  j["tau"] = pilot_symbols;
  j["p_ap"] = p_ap_w;
  j["p_pilot"] = p_pilot_w;
  j["noise_power"] = noise_power_w;
  j["area_side"] = area_side_m;
  j["xi"] = eh_steepness;
  j["chi"] = eh_threshold_w;
  j["phi"] = eh_saturation_w;
  j["se_target"] = se_target;
  j["he_targets"] = he_targets_w;
  j["sca_tol"] = sca_tol;
  j["shadow_sigma_db"] = shadow_sigma_db;
  j["correlated_shadowing"] = correlated_shadowing;
  return j.dump(2);
}

}  // namespace cfswipt
