#pragma once

#include <Eigen/Dense>
#include <string>

#include "cfswipt/network.hpp"
#include "cfswipt/params.hpp"

namespace cfswipt {

/// Mode vector plus normalized power-control coefficients. `a` is relaxed to
/// [0,1] during optimization and binary afterwards. Per-AP budgets:
/// sum_k eta_i(m,k) <= a(m) and sum_l eta_e(m,l) <= 1 - a(m).
struct Allocation {
  Eigen::VectorXd a;       // M
  Eigen::MatrixXd eta_i;   // M x K_d
  Eigen::MatrixXd eta_e;   // M x L

  static Allocation zeros(int m, int k, int l);
  // Largest violation of the per-AP power couplings (<= tol means valid).
  double power_violation() const;
};

/// Rectifier model: logistic transfer with saturation phi, midpoint chi,
/// slope xi; omega is the zero-input offset 1/(1+exp(xi*chi)).
struct EhModel {
  double xi = 150.0;
  double chi = 0.014;
  double phi = 0.024;
  double omega = 0.0;

  static EhModel from_params(const SystemParams& p);
};

// Logistic transfer psi(q) = phi / (1 + exp(-xi (q - chi))).
double logistic_psi(double q, const EhModel& m);
// Harvested power: (psi(q) - phi*omega) / (1 - omega), clipped at 0 so that
// rounding noise below the zero-input floor cannot produce negative output.
double harvested_energy_phi(double q, const EhModel& m);
// Inverse of logistic_psi; valid for psi in (0, phi), throws otherwise.
double inverse_logistic_f(double psi, const EhModel& m);

/// Per-IU effective SINR under partial zero-forcing at I-APs and protected
/// MRT at E-APs. Throws std::domain_error if any a*eta product is negative
/// beyond tolerance.
Eigen::VectorXd sinr_closed_form(const Allocation& alloc, const NetworkRealization& net,
                                 const SystemParams& params);

// SE_k = (1 - tau/tau_c) log2(1 + SINR_k).
Eigen::VectorXd se_per_iu(const Eigen::VectorXd& sinr, const SystemParams& params);

/// Average received energy per EU over one downlink phase, in watt-symbols:
/// (tau_c - tau) sigma_n^2 (rho(N-K_d+1) sum (1-a) eta_e gamma
///   + rho sum_{l' != l} (1-a) eta_e beta + rho sum_k a eta_i beta + 1).
Eigen::VectorXd q_closed_form(const Allocation& alloc, const NetworkRealization& net,
                              const SystemParams& params);

// Orthogonal-transmission baseline: all APs transmit, halved payload time.
Eigen::VectorXd benchmark3_se(const Eigen::MatrixXd& eta_i, const NetworkRealization& net,
                              const SystemParams& params);
Eigen::VectorXd benchmark3_q(const Eigen::MatrixXd& eta_e, const NetworkRealization& net,
                             const SystemParams& params);

/// Everything a results row needs for one evaluated allocation.
struct MetricsReport {
  Eigen::VectorXd se_per_iu;    // bit/s/Hz
  Eigen::VectorXd q_per_eu;     // watt-symbols
  Eigen::VectorXd phi_per_eu;   // harvested watts
  std::vector<bool> feasible_se;
  std::vector<bool> feasible_he;

  double sum_phi_w() const { return phi_per_eu.sum(); }
  bool all_feasible() const;
  std::string csv_row() const;
};

MetricsReport evaluate_allocation(const Allocation& alloc, const NetworkRealization& net,
                                  const SystemParams& params);

}  // namespace cfswipt
