#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cfswipt/params.hpp"

namespace cfswipt {

using Vec2 = std::array<double, 2>;

/// One random network drop: device positions plus every large-scale quantity
/// downstream formulas need. Immutable once built; safe to share across
/// threads.
struct NetworkRealization {
  std::vector<Vec2> ap_positions;
  std::vector<Vec2> iu_positions;
  std::vector<Vec2> eu_positions;

  Eigen::MatrixXd beta_iu;   // M x K_d, linear scale
  Eigen::MatrixXd beta_eu;   // M x L
  Eigen::MatrixXd gamma_iu;  // M x K_d, MMSE estimate variances
  Eigen::MatrixXd gamma_eu;  // M x L

  std::uint64_t seed = 0;
};

// Wrap-around (torus) metric on the simulation square.
double torus_distance(const Vec2& a, const Vec2& b, double side);

// -30.5 - 36.7 log10(d / 1 m); distances below the 1 m reference are clamped.
double path_loss_db(double distance_m);
inline constexpr double kMinDistanceM = 1.0;

/// Positions only; beta/gamma left empty.
NetworkRealization generate_topology(const SystemParams& params, std::uint64_t seed);

/// Shadow fading in dB, one row per AP, columns ordered [IUs | EUs].
/// Independent N(0, sigma^2) entries by default; the correlated mode uses the
/// two-component construction F_mk = sqrt(d)*a_m + sqrt(1-d)*b_k with d = 1/2
/// and exponential covariance 2^(-dist / 9 m) within the AP and UE components.
Eigen::MatrixXd draw_shadowing(const NetworkRealization& topology,
                               const SystemParams& params, std::uint64_t seed);

/// Fills beta from path loss and shadowing (linear scale).
void compute_large_scale(NetworkRealization& net, const Eigen::MatrixXd& shadowing_db,
                         const SystemParams& params);

/// Fills gamma elementwise: g = tau*rho_t*b^2 / (tau*rho_t*b + 1).
void estimation_variances(NetworkRealization& net, const SystemParams& params);

/// Convenience: topology + shadowing + beta + gamma in one call.
NetworkRealization make_realization(const SystemParams& params, std::uint64_t seed);

// Deterministic text serialization for replay.
void write_realization(std::ostream& os, const NetworkRealization& net);
NetworkRealization read_realization(std::istream& is);

}  // namespace cfswipt
