#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "cfswipt/metrics.hpp"
#include "cfswipt/network.hpp"

namespace cfswipt {

/// One small-scale fading realization: per-AP MMSE channel estimates and the
/// associated estimation errors (true channel = estimate + error). Estimates
/// and errors are drawn directly from their marginal distributions, which is
/// distributionally identical to simulating the pilot phase under orthogonal
/// pilots.
struct ChannelDraw {
  std::vector<Eigen::MatrixXcd> g_hat_iu;  // per AP, N x K_d
  std::vector<Eigen::MatrixXcd> g_err_iu;
  std::vector<Eigen::MatrixXcd> g_hat_eu;  // per AP, N x L
  std::vector<Eigen::MatrixXcd> g_err_eu;
  std::uint64_t trial_seed = 0;
};

ChannelDraw draw_channels(const NetworkRealization& net, const SystemParams& params,
                          std::uint64_t trial_seed);

/// Local precoders of one AP. Column k of w_i is the zero-forcing beam for
/// IU k; column l of w_e the protected-MRT beam for EU l.
struct ApPrecoders {
  Eigen::MatrixXcd w_i;  // N x K_d
  Eigen::MatrixXcd w_e;  // N x L
  bool ok = true;        // false when the estimate matrix was rank deficient
};

// Projection onto the orthogonal complement of the IU estimate space.
Eigen::MatrixXcd pzf_projection(const Eigen::MatrixXcd& g_hat_iu_m);

// w_k = sqrt((N-K_d) gamma_k) * G (G^H G)^{-1} e_k. Rank-deficient systems
// get a diagonal jitter of 1e-12 trace/K_d; failure beyond that flags ok=false.
Eigen::MatrixXcd build_pzf(const Eigen::MatrixXcd& g_hat_iu_m,
                           const Eigen::VectorXd& gamma_iu_row, bool* ok = nullptr);

// w_l = B g_hat_l / sqrt((N-K_d) gamma_l).
Eigen::MatrixXcd build_pmrt(const Eigen::MatrixXcd& g_hat_eu_m, const Eigen::MatrixXcd& b_proj,
                            const Eigen::VectorXd& gamma_eu_row, int num_ius);

std::vector<ApPrecoders> build_precoders(const ChannelDraw& draw, const NetworkRealization& net,
                                         const SystemParams& params);

/// Hardening-bound SE estimated from channel trials, with batch-means
/// standard errors and the individual interference components.
struct EmpiricalSe {
  Eigen::VectorXd se;          // bit/s/Hz per IU
  Eigen::VectorXd std_error;   // per IU
  Eigen::VectorXd ds_power;    // |E{DS}|^2
  Eigen::VectorXd bu_var;      // beamforming-gain uncertainty
  Eigen::VectorXd iui_power;   // sum over interfering IUs
  Eigen::VectorXd eui_power;   // sum over EU beams
  int n_trials = 0;
};

EmpiricalSe empirical_se(const Allocation& alloc, const NetworkRealization& net,
                         const SystemParams& params, int n_trials);

struct EmpiricalEnergy {
  Eigen::VectorXd q;          // watt-symbols per EU
  Eigen::VectorXd std_error;  // per EU
  int n_trials = 0;
};

EmpiricalEnergy empirical_energy(const Allocation& alloc, const NetworkRealization& net,
                                 const SystemParams& params, int n_trials);

/// Copy of `net` with estimation variances forced to the channel variances
/// (zero estimation error); used by the protection checks.
NetworkRealization with_perfect_csi(const NetworkRealization& net);

}  // namespace cfswipt
