#include "conic/kkt.hpp"

#include <cmath>
#include <vector>

namespace cfswipt::conic::detail {

KktSolver::KktSolver(int n_vars, Eigen::SparseMatrix<double> a, const ConeSystem* cones)
    : n_(n_vars), m_(static_cast<int>(a.rows())), a_(std::move(a)), cones_(cones) {
  a_.makeCompressed();
}

void KktSolver::assemble(double reg) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(a_.nonZeros()) + n_ + 4 * m_);
  for (int j = 0; j < n_; ++j) trips.emplace_back(j, j, reg);
  // A block lives at rows n..n+m-1, lower triangle only.
  for (int k = 0; k < a_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, k); it; ++it)
      trips.emplace_back(n_ + static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  cones_->append_neg_H(trips, n_, reg);
  kkt_.resize(n_ + m_, n_ + m_);
  kkt_.setFromTriplets(trips.begin(), trips.end());
  kkt_.makeCompressed();
  reg_ = reg;
}

bool KktSolver::factorize(double static_reg) {
  assemble(static_reg);
  if (!analyzed_) {
    ldlt_.analyzePattern(kkt_);
    analyzed_ = true;
  }
  ldlt_.factorize(kkt_);
  if (ldlt_.info() != Eigen::Success) return false;
  const auto& d = ldlt_.vectorD();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (!std::isfinite(d(i)) || d(i) == 0.0) return false;
  return true;
}

VectorXd KktSolver::residual(const VectorXd& sol, const VectorXd& rhs) const {
  const int total = n_ + m_;
  std::vector<long double> acc(total);
  for (int i = 0; i < total; ++i) acc[i] = static_cast<long double>(rhs(i));
  // Symmetric product from the stored lower triangle.
  for (int k = 0; k < kkt_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(kkt_, k); it; ++it) {
      const int i = static_cast<int>(it.row());
      const int j = static_cast<int>(it.col());
      const long double v = static_cast<long double>(it.value());
      acc[i] -= v * static_cast<long double>(sol(j));
      if (i != j) acc[j] -= v * static_cast<long double>(sol(i));
    }
  // Remove the static shifts: K0 = K - diag(reg I_n, -reg I_m).
  const long double reg = static_cast<long double>(reg_);
  for (int i = 0; i < n_; ++i) acc[i] += reg * static_cast<long double>(sol(i));
  for (int i = n_; i < total; ++i) acc[i] -= reg * static_cast<long double>(sol(i));
  VectorXd out(total);
  for (int i = 0; i < total; ++i) out(i) = static_cast<double>(acc[i]);
  return out;
}

bool KktSolver::solve(const VectorXd& r1, const VectorXd& r2, VectorXd& dx, VectorXd& dz,
                      double* rel_residual) const {
  const int total = n_ + m_;
  VectorXd rhs(total);
  rhs.head(n_) = r1;
  rhs.tail(m_) = r2;
  const double rhs_norm = rhs.lpNorm<Eigen::Infinity>() + 1e-300;

  VectorXd sol = ldlt_.solve(rhs);
  VectorXd best = sol;
  double best_res = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 40; ++round) {
    if (!sol.allFinite()) break;
    VectorXd e = residual(sol, rhs);
    const double res = e.lpNorm<Eigen::Infinity>() / rhs_norm;
    if (res < best_res) {
      best_res = res;
      best = sol;
    }
    if (res <= 1e-14) break;
    if (res > 10.0 * best_res) break;  // refinement is diverging
    sol += ldlt_.solve(e);
  }
  if (rel_residual) *rel_residual = best_res;
  if (!best.allFinite()) return false;
  dx = best.head(n_);
  dz = best.tail(m_);
  return true;
}

}  // namespace cfswipt::conic::detail
