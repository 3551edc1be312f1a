#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cfswipt {

/// Scalar configuration of one network instance. All powers are stored in
/// watts; normalized SNRs are derived on demand. Text configs use the short
/// key names (M, N, K_d, L, tau_c, tau, p_ap, p_pilot, noise_power,
/// area_side, xi, chi, phi, se_target, he_targets, sca_tol, shadow_sigma_db).
struct SystemParams {
  int num_aps = 20;           // M
  int antennas_per_ap = 10;   // N
  int num_ius = 3;            // K_d
  int num_eus = 5;            // L
  int coherence_symbols = 200;  // tau_c
  int pilot_symbols = 8;        // tau

  double p_ap_w = 1.0;
  double p_pilot_w = 0.2;
  double noise_power_w = 6.309573444801933e-13;  // -92 dBm
  double area_side_m = 500.0;

  double eh_steepness = 150.0;      // logistic slope, 1/W
  double eh_threshold_w = 0.014;    // logistic midpoint
  double eh_saturation_w = 0.024;   // max rectified output

  double se_target = 1.0;                 // bit/s/Hz per IU
  std::vector<double> he_targets_w;       // per-EU harvested-power floor
  double sca_tol = 1e-5;
  double shadow_sigma_db = 4.0;
  bool correlated_shadowing = false;

  // Normalized transmit SNRs.
  double dl_snr() const { return p_ap_w / noise_power_w; }
  double pilot_snr() const { return p_pilot_w / noise_power_w; }

  // Fraction of the coherence block spent on downlink payload.
  double dl_fraction() const {
    return 1.0 - static_cast<double>(pilot_symbols) / coherence_symbols;
  }
  int dl_symbols() const { return coherence_symbols - pilot_symbols; }

  double he_target(int eu) const {
    if (he_targets_w.empty()) return 0.0;
    return he_targets_w.size() == 1 ? he_targets_w[0] : he_targets_w.at(eu);
  }

  /// Throws std::invalid_argument when any structural invariant is violated
  /// (tau >= K_d + L, tau < tau_c, N > K_d, positive powers, ...).
  void validate() const;

  static SystemParams from_json_text(const std::string& text);
  static SystemParams from_json_file(const std::string& path);
  std::string to_json_text() const;
};

}  // namespace cfswipt
