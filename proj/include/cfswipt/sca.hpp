#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfswipt/conic.hpp"
#include "cfswipt/metrics.hpp"
#include "cfswipt/network.hpp"

namespace cfswipt::sca {

/// Current linearization point of the successive convex approximation:
/// the allocation, the auxiliary logistic-domain targets omega, and the
/// derived expression-holder values (recomputed from the iterate, never
/// copied from solver internals).
struct ScaState {
  Allocation alloc;
  Eigen::VectorXd omega;  // L, interior of (0, phi)
  Eigen::MatrixXd u;      // M x L expression holders
  Eigen::VectorXd q;      // K_d coherent-amplitude sums
  Eigen::VectorXd z;      // M power-balance terms a + eta_i_sum - eta_e_sum
  double objective = 0.0;
  int iteration = 0;
};

/// Recomputes u, q, z and the objective from alloc/omega.
void refresh_state(ScaState& state, const NetworkRealization& net, const SystemParams& params);

enum class Status { Converged, MaxIter, Infeasible, Numerical };
const char* to_string(Status s);

struct SolveOutcome {
  Allocation allocation;           // result (binary modes after rounding)
  Allocation relaxed_allocation;   // pre-rounding iterate where applicable
  Eigen::VectorXd omega;
  double objective_sum_he_w = 0.0;  // sum of harvested power at `allocation`
  std::vector<double> history;      // per-iteration sum omega
  Status status = Status::Infeasible;
  double wall_time_s = 0.0;
  int repair_flips = 0;
  // Residual feasibility-phase slack by constraint class; nonzero only for
  // infeasible outcomes, drives the rounding repair heuristic.
  double phase1_he_slack = 0.0;
  double phase1_se_slack = 0.0;
  MetricsReport metrics;
};

struct SubproblemOptions {
  bool fix_modes = false;         // benchmark-2 shape: modes constant, budgets <= 1
  Eigen::VectorXd fixed_a;        // binary, used when fix_modes
  bool phase1_slacks = false;     // feasibility slacks on the SE/HE rows
  // Accumulated tangent abscissas for the outer linearization of the scalar
  // term v >= -log(phi - omega); the builder always seeds a tangent at the
  // expansion point, so the surrogate stays tight there. Cuts are pure
  // supporting hyperplanes of a fixed convex function and can be reused
  // across iterations.
  std::vector<std::vector<double>> log_tangents;  // per EU, may be empty
};

/// Index bookkeeping for extracting solutions from the canonical program.
struct SubproblemLayout {
  int n_vars = 0;
  std::vector<int> a;         // M (or empty when modes fixed)
  std::vector<int> eta_i;     // M*K_d, -1 where the variable is absent
  std::vector<int> eta_e;     // M*L, -1 where absent
  std::vector<int> omega;     // L
  std::vector<int> v_log;     // L, epigraph of -log(phi - omega)
  std::vector<int> slack_he;  // L (phase 1 only)
  std::vector<int> slack_se;  // K_d (phase 1 only)
  int core_vars = 0;          // M(K_d+L+1)+L for the relaxed problem
};

/// Convex inner approximation around `state`; total construction, never fails.
conic::ConicProgram build_subproblem(const ScaState& state, const NetworkRealization& net,
                                     const SystemParams& params, const SubproblemOptions& opts,
                                     SubproblemLayout* layout = nullptr);

/// Geometry-driven heuristic start; runs a slack-minimizing phase when the
/// first subproblem is infeasible. status receives Converged on success,
/// Infeasible when the phase-1 optimum keeps positive slack.
ScaState initialize(const NetworkRealization& net, const SystemParams& params,
                    std::uint64_t seed, Status* status);

/// Relaxed joint mode-selection and power-control solve.
SolveOutcome sca_solve(const NetworkRealization& net, const SystemParams& params,
                       std::uint64_t seed);

/// Threshold rounding plus greedy repair flips, powers re-optimized with the
/// modes fixed.
SolveOutcome round_modes(const SolveOutcome& relaxed, const NetworkRealization& net,
                         const SystemParams& params);

/// Random modes, full power, no optimization.
SolveOutcome benchmark1(const NetworkRealization& net, const SystemParams& params,
                        std::uint64_t seed);

/// Power control with the given fixed binary modes.
SolveOutcome benchmark2_solve(const NetworkRealization& net, const SystemParams& params,
                              const Eigen::VectorXd& a_fixed);

/// Orthogonal time-division baseline: an energy power-control problem and an
/// SE feasibility problem, decoupled.
SolveOutcome benchmark3_solve(const NetworkRealization& net, const SystemParams& params);

/// Exhaustive search over binary modes (>= 1 AP per role) with benchmark-2
/// power control per candidate; refuses M > 12.
SolveOutcome brute_force_oracle(const NetworkRealization& net, const SystemParams& params);

// Mapped per-EU target in the logistic domain: Gamma (1 - omega0) + phi
// omega0, so that meeting it guarantees harvested power >= Gamma.
double psi_domain_target(double gamma_w, const EhModel& eh);

}  // namespace cfswipt::sca
