#pragma once

#include <Eigen/Sparse>

#include "conic/cones.hpp"

namespace cfswipt::conic::detail {

// Quasidefinite KKT system
//   [ reg I    A'        ] [dx]   [r1]
//   [ A       -(H+reg I) ] [dz] = [r2]
// factored by sparse LDL' without pivoting. Static regularization keeps the
// factorization well defined; iterative refinement with extended-precision
// residual accumulation against the unregularized operator restores the
// accuracy lost to the (very) ill-conditioned endgame iterations.
class KktSolver {
 public:
  KktSolver(int n_vars, Eigen::SparseMatrix<double> a, const ConeSystem* cones);

  // Rebuilds numeric values using the cone system's current scaling.
  bool factorize(double static_reg);

  // Returns false on non-finite results; *rel_residual (optional) receives
  // the achieved infinity-norm residual relative to the right-hand side.
  bool solve(const VectorXd& r1, const VectorXd& r2, VectorXd& dx, VectorXd& dz,
             double* rel_residual = nullptr) const;

 private:
  void assemble(double reg);
  // rhs - K0 * sol with long-double accumulation (K0 = K without the static
  // regularization shifts).
  VectorXd residual(const VectorXd& sol, const VectorXd& rhs) const;

  int n_ = 0;
  int m_ = 0;
  Eigen::SparseMatrix<double> a_;  // m x n
  const ConeSystem* cones_;
  Eigen::SparseMatrix<double> kkt_;  // lower triangle, regularized
  double reg_ = 0.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt_;
  bool analyzed_ = false;
};

}  // namespace cfswipt::conic::detail
