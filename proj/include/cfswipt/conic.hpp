#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace cfswipt::conic {

enum class ConeKind { NonNeg, Soc, Rsoc, Exp };

// NonNeg: dim >= 1. Soc: dim >= 2, (t, x) with ||x|| <= t.
// Rsoc: dim >= 3, (u, v, x) with 2uv >= ||x||^2, u,v >= 0.
// Exp: dim == 3, (x, y, z) with y exp(x/y) <= z, y > 0 (closure).
struct ConeSpec {
  ConeKind kind = ConeKind::NonNeg;
  int dim = 1;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Triplet> entries;

  void add(int r, int c, double v) {
    if (v != 0.0) entries.push_back({r, c, v});
  }
};

// Box bound on one variable; use +-infinity for absent sides.
struct VarBound {
  int var = 0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Canonical cone program:
///   minimize    c'x
///   subject to  eq_A x = eq_b
///               s = cone_h - cone_G x,  s in K (cone_list, in row order)
///               lower <= x_j <= upper   (var_bounds)
struct ConicProgram {
  int n_vars = 0;
  std::vector<double> objective;  // c, length n_vars

  SparseMatrix eq_A;
  std::vector<double> eq_b;

  SparseMatrix cone_G;
  std::vector<double> cone_h;
  std::vector<ConeSpec> cone_list;

  std::vector<VarBound> var_bounds;

  int cone_dim() const;
  /// Throws std::invalid_argument on malformed input (index ranges, cone
  /// dimension rules, mismatched vector lengths).
  void check_well_formed() const;
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIter, Numerical };
const char* to_string(SolveStatus s);

struct ConicSolution {
  SolveStatus status = SolveStatus::Numerical;
  Eigen::VectorXd x;
  double objective_value = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;  // relative complementarity gap
  int iterations = 0;

  // Dual multipliers, for independent KKT verification. z_cone follows the
  // declared cone_list rows; z_bounds holds one pair (lower, upper) per
  // var_bound entry, zero where the side is infinite.
  Eigen::VectorXd y_eq;
  Eigen::VectorXd z_cone;
  Eigen::VectorXd z_bounds;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;
};

/// Homogeneous self-dual interior-point solve. Returns Optimal with residuals
/// below tol, a certified infeasibility status, or a diagnostic status.
ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts = {});
ConicSolution solve(const ConicProgram& prog, double tol, int max_iter);

struct KktResiduals {
  double primal = 0.0;          // equality + cone membership violation, scaled
  double dual = 0.0;            // stationarity + dual cone violation, scaled
  double complementarity = 0.0; // relative duality gap
  double max() const;
};

/// Recomputes all optimality residuals from the program data and the returned
/// primal/dual vectors; shares no state with the solver.
KktResiduals check_kkt(const ConicProgram& prog, const ConicSolution& sol);

/// Plain-text dump: header, then objective / eq_b / cone_h vectors, then the
/// matrices as sorted "row col value" triplets, then cones and bounds. Stable
/// across runs; intended for offline debugging and cross-checking.
void dump_program(const ConicProgram& prog, std::ostream& os);
std::string dump_program(const ConicProgram& prog);

}  // namespace cfswipt::conic
