#pragma once

#include "cfswipt/sca.hpp"

namespace cfswipt::sca::detail {

// The SCA outer loop needs ~1e-6 subproblem accuracy; a near-optimal
// diagnostic exit from the interior-point solver is still a usable iterate.
inline bool usable_solution(const conic::ConicSolution& s) {
  if (s.status == conic::SolveStatus::Optimal) return true;
  if (s.status == conic::SolveStatus::MaxIter || s.status == conic::SolveStatus::Numerical)
    return std::max({s.primal_residual, s.dual_residual, s.duality_gap}) <= 1e-6;
  return false;
}

void apply_solution(ScaState& state, const conic::ConicSolution& sol,
                    const SubproblemLayout& lay, const SubproblemOptions& opts,
                    const NetworkRealization& net, const SystemParams& params);

// Build + solve with verification cuts on the outer-linearized log epigraph;
// new tangents accumulate into opts.log_tangents for reuse.
conic::ConicSolution solve_subproblem_cuts(const ScaState& state, const NetworkRealization& net,
                                           const SystemParams& params, SubproblemOptions& opts,
                                           SubproblemLayout* lay_out);

ScaState make_initial_state(const NetworkRealization& net, const SystemParams& params,
                            const SubproblemOptions& opts);

struct Phase1Result {
  Status status = Status::Infeasible;
  double he_slack = 0.0;
  double se_slack = 0.0;
};
Phase1Result run_phase1(ScaState& state, const NetworkRealization& net,
                        const SystemParams& params, const SubproblemOptions& base_opts);

struct ScaRun {
  ScaState state;
  std::vector<double> history;
  Status status = Status::Infeasible;
};
ScaRun run_sca_loop(ScaState state, const NetworkRealization& net, const SystemParams& params,
                    const SubproblemOptions& opts, int max_iterations);

SolveOutcome make_outcome(const ScaState& state, std::vector<double> history, Status status,
                          const NetworkRealization& net, const SystemParams& params,
                          double wall_s);

}  // namespace cfswipt::sca::detail
