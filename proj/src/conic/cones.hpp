#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "cfswipt/conic.hpp"

namespace cfswipt::conic::detail {

using Eigen::VectorXd;

// Internal block kinds. Zero encodes equality rows (s = 0, z free). Rsoc has
// been rotated into Soc before reaching this layer.
enum class BlockKind { Zero, NonNeg, Soc, Exp };

struct Block {
  BlockKind kind;
  int offset;  // first row of the block in the stacked cone system
  int dim;
};

// Scaling state for one interior-point iteration: for every block a positive
// definite matrix H with the property that the linearized complementarity
// step takes the uniform shape  ds + H dz = rhs.
class ConeSystem {
 public:
  ConeSystem() = default;
  explicit ConeSystem(std::vector<Block> blocks);

  int total_dim() const { return total_dim_; }
  double degree() const { return degree_; }  // sum of barrier parameters
  const std::vector<Block>& blocks() const { return blocks_; }

  void unit_init(VectorXd& s, VectorXd& z) const;

  bool inside_primal(const VectorXd& s) const;
  bool inside_dual(const VectorXd& z) const;

  // False when the iterate is numerically outside the cone interior.
  bool update_scaling(const VectorXd& s, const VectorXd& z, double mu);

  // Appends the (lower-triangular) entries of -(H + reg I) shifted by
  // (row0, row0); Zero blocks contribute only -reg on the diagonal.
  void append_neg_H(std::vector<Eigen::Triplet<double>>& out, int row0, double reg) const;

  // y = H v (no regularization), for iterative refinement.
  VectorXd mult_H(const VectorXd& v) const;

  // Largest step alpha <= cap with s + alpha ds (resp. z + alpha dz) inside.
  double max_step_primal(const VectorXd& s, const VectorXd& ds, double cap) const;
  double max_step_dual(const VectorXd& z, const VectorXd& dz, double cap) const;

  // Right-hand side of the predictor equation ds + H dz = r: -s for blocks
  // under Nesterov-Todd or dual scaling, -Hz for exp blocks running in
  // primal-barrier mode.
  VectorXd affine_rhs(const VectorXd& s, const VectorXd& z) const;

  // Right-hand side of  ds + H dz = r  for the Mehrotra combined step;
  // ds_aff/dz_aff are the affine direction, sigma_mu the centering target.
  // corr_weight in [0,1] damps the second-order correction (it is scaled by
  // the square of the affine step so a failed prediction cannot poison the
  // corrector).
  VectorXd combined_rhs(const VectorXd& s, const VectorXd& z, double sigma, double mu,
                        const VectorXd& ds_aff, const VectorXd& dz_aff,
                        double corr_weight) const;

  // Worst membership violation of v against the (closed) cone product,
  // scaled per block by 1 + |block|_inf. Zero blocks measure |v|.
  double membership_violation(const VectorXd& v, bool dual) const;

  // Centrality proxy for the nonsymmetric blocks: the largest, over exp
  // blocks, of ||z_b + mu grad f(s_b)|| measured in the inverse local-Hessian
  // norm and divided by mu. Zero when the system has no exp blocks. Points on
  // the central path give 0; the value grows as a block drifts toward its
  // boundary faster than mu shrinks.
  double exp_centrality(const VectorXd& s, const VectorXd& z, double mu) const;

  // Diagnostic line: per-block local complementarity and boundary margins.
  std::string debug_margins(const VectorXd& s, const VectorXd& z) const;

 private:
  struct SocScaling {
    VectorXd w;        // Nesterov-Todd point
    VectorXd w_half;   // w^(1/2) in the Jordan algebra
    VectorXd w_mhalf;  // w^(-1/2)
    VectorXd lambda;   // scaled point W z = W^{-1} s
    double det_w = 0.0;
  };
  struct ExpScaling {
    Eigen::Matrix3d h;       // scaling matrix for ds + H dz = r
    Eigen::Vector3d sbar;    // -grad f*(z)
    Eigen::Vector3d hz;      // H z, cached for the primal-mode rhs
    bool primal_mode = false;  // true when the block is far off the path
  };

  std::vector<Block> blocks_;
  int total_dim_ = 0;
  double degree_ = 0.0;
  std::vector<VectorXd> nn_h_;          // per NonNeg block: diag s/z
  std::vector<SocScaling> soc_;
  std::vector<ExpScaling> exp_;
  std::vector<int> scale_index_;        // block -> index into kind-specific store
};

// --- exponential-cone primitives (exposed for tests) ---

// Interior membership of (x, y, z): y > 0, z > 0, y log(z/y) - x > 0.
bool exp_primal_interior(const Eigen::Vector3d& s);
// Interior of the dual cone: u < 0, w > 0, log(-u) + v/u < 1 + log w.
bool exp_dual_interior(const Eigen::Vector3d& z);

Eigen::Vector3d exp_barrier_grad(const Eigen::Vector3d& s);
Eigen::Matrix3d exp_barrier_hess(const Eigen::Vector3d& s);
// Hessian from precomputed barrier internals u = y log(z/y) - x and
// r = log(z/y); avoids the cancellation of recomputing u at points whose
// components dwarf u.
Eigen::Matrix3d exp_barrier_hess_ur(double y, double w, double u, double r);

struct ExpConjugate {
  Eigen::Vector3d sbar;  // -grad f*(z)
  double u = 0.0;        // barrier argument at sbar, equals -1/z1 exactly
  double r = 0.0;        // log(w/y) at sbar
};
// Solves -grad f(s) = z for s (the conjugate-gradient map); z must be
// interior to the dual cone.
ExpConjugate exp_conjugate(const Eigen::Vector3d& z);
Eigen::Vector3d exp_grad_conjugate_point(const Eigen::Vector3d& z);

}  // namespace cfswipt::conic::detail
