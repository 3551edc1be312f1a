#include <cmath>
#include <limits>

#include "conic/canonical.hpp"
#include "conic/kkt.hpp"

namespace cfswipt::conic {

namespace detail {
namespace {

struct Scaling {
  VectorXd d_row;  // m
  VectorXd d_col;  // n
  double c_scale = 1.0;
};

// Ruiz-style equilibration with one scalar per cone block so that cone
// membership is preserved. The problem data spans many orders of magnitude
// (large-scale fading products), which makes this step essential.
Scaling equilibrate(Eigen::SparseMatrix<double>& a, VectorXd& b, VectorXd& c,
                    const std::vector<Block>& blocks) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  Scaling sc;
  sc.d_row = VectorXd::Ones(m);
  sc.d_col = VectorXd::Ones(n);

  std::vector<int> block_of(m, -1);
  for (size_t bi = 0; bi < blocks.size(); ++bi)
    for (int r = 0; r < blocks[bi].dim; ++r) block_of[blocks[bi].offset + r] = static_cast<int>(bi);

  for (int pass = 0; pass < 6; ++pass) {
    VectorXd row_max = VectorXd::Zero(m);
    VectorXd col_max = VectorXd::Zero(n);
    for (int k = 0; k < a.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) {
        const double v = std::abs(it.value());
        row_max(it.row()) = std::max(row_max(it.row()), v);
        col_max(it.col()) = std::max(col_max(it.col()), v);
      }
    // Uniform factor inside multi-row cone blocks (keeps the cone invariant).
    VectorXd block_max = VectorXd::Zero(blocks.size());
    for (int r = 0; r < m; ++r)
      if (block_of[r] >= 0 && blocks[block_of[r]].kind != BlockKind::NonNeg &&
          blocks[block_of[r]].kind != BlockKind::Zero)
        block_max(block_of[r]) = std::max(block_max(block_of[r]), row_max(r));
    VectorXd fr(m), fc(n);
    for (int r = 0; r < m; ++r) {
      double v = row_max(r);
      if (block_of[r] >= 0) {
        const Block& blk = blocks[block_of[r]];
        if (blk.kind != BlockKind::NonNeg && blk.kind != BlockKind::Zero) v = block_max(block_of[r]);
      }
      fr(r) = v > 0.0 ? 1.0 / std::sqrt(v) : 1.0;
    }
    for (int j = 0; j < n; ++j) fc(j) = col_max(j) > 0.0 ? 1.0 / std::sqrt(col_max(j)) : 1.0;
    for (int k = 0; k < a.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
        it.valueRef() *= fr(it.row()) * fc(it.col());
    sc.d_row.array() *= fr.array();
    sc.d_col.array() *= fc.array();
  }
  b.array() *= sc.d_row.array();
  c.array() *= sc.d_col.array();
  sc.c_scale = 1.0 / std::max(1.0, c.lpNorm<Eigen::Infinity>());
  c *= sc.c_scale;
  return sc;
}

struct Residuals {
  double p_res = 0.0, d_res = 0.0, rel_gap = 0.0, abs_gap = 0.0;
  double pcost = 0.0, dcost = 0.0;
};

}  // namespace
}  // namespace detail

ConicSolution solve(const ConicProgram& prog, double tol, int max_iter) {
  SolverOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  return solve(prog, o);
}

ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts) {
  using namespace detail;
  Canonical cn = canonicalize(prog);
  const int n = cn.n;
  const int m = static_cast<int>(cn.a.rows());

  ConicSolution sol;
  sol.x = Eigen::VectorXd::Zero(n);
  sol.y_eq = Eigen::VectorXd::Zero(cn.eq_rows);
  sol.z_cone = Eigen::VectorXd::Zero(cn.user_cone_rows);
  sol.z_bounds = Eigen::VectorXd::Zero(2 * prog.var_bounds.size());

  Eigen::Map<const VectorXd> c_orig(prog.objective.data(), n);

  // Presolve scans: inconsistent empty equality rows, unconstrained costed
  // columns.
  {
    VectorXd row_cnt = VectorXd::Zero(m);
    VectorXd col_cnt = VectorXd::Zero(n);
    for (int k = 0; k < cn.a.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(cn.a, k); it; ++it) {
        row_cnt(it.row()) += 1.0;
        col_cnt(it.col()) += 1.0;
      }
    for (int r = 0; r < cn.eq_rows; ++r)
      if (row_cnt(r) == 0.0 && std::abs(cn.b(r)) > 1e-13 * (1.0 + cn.b.lpNorm<Eigen::Infinity>())) {
        sol.status = SolveStatus::PrimalInfeasible;
        sol.y_eq(r) = cn.b(r) > 0 ? -1.0 : 1.0;
        return sol;
      }
    for (int j = 0; j < n; ++j)
      if (col_cnt(j) == 0.0 && prog.objective[j] != 0.0) {
        sol.status = SolveStatus::DualInfeasible;
        sol.x(j) = prog.objective[j] > 0 ? -1.0 : 1.0;
        return sol;
      }
  }

  if (m == 0) {
    // No constraints at all: x = 0 is optimal iff c = 0.
    sol.status = (c_orig.lpNorm<Eigen::Infinity>() == 0.0) ? SolveStatus::Optimal
                                                           : SolveStatus::DualInfeasible;
    return sol;
  }

  // Scaled copies.
  Eigen::SparseMatrix<double> a = cn.a;
  VectorXd b = cn.b;
  VectorXd c = c_orig;
  Scaling scale = equilibrate(a, b, c, cn.blocks);

  ConeSystem cones(cn.blocks);
  const double nu = cones.degree();

  KktSolver kkt(n, a, &cones);

  VectorXd x = VectorXd::Zero(n), s, z;
  cones.unit_init(s, z);
  double tau = 1.0, kappa = 1.0;

  const double b_norm_orig = 1.0 + cn.b.lpNorm<Eigen::Infinity>();
  const double c_norm_orig = 1.0 + c_orig.lpNorm<Eigen::Infinity>();
  double a_max = 0.0;
  for (int k = 0; k < cn.a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(cn.a, k); it; ++it)
      a_max = std::max(a_max, std::abs(it.value()));
  a_max = std::max(a_max, 1.0);

  auto finish_point = [&](SolveStatus st, int iters, const Residuals& res) {
    sol.status = st;
    sol.iterations = iters;
    const double t = std::max(tau, 1e-300);
    VectorXd x_u = scale.d_col.asDiagonal() * x / t;
    VectorXd z_u = scale.d_row.asDiagonal() * z / (scale.c_scale * t);
    sol.x = x_u;
    sol.objective_value = c_orig.dot(x_u);
    sol.primal_residual = res.p_res;
    sol.dual_residual = res.d_res;
    sol.duality_gap = res.rel_gap;
    sol.y_eq = z_u.head(cn.eq_rows);
    if (cn.user_cone_rows > 0) {
      VectorXd zc = z_u.segment(cn.eq_rows, cn.user_cone_rows);
      for (int off : cn.rotated_offsets) {
        const int local = off - cn.eq_rows;
        rotate_pair(zc(local), zc(local + 1));
      }
      sol.z_cone = zc;
    }
    for (size_t i = 0; i < cn.bound_rows_of.size(); ++i) {
      const auto [lo, up] = cn.bound_rows_of[i];
      if (lo >= 0) sol.z_bounds(2 * i) = z_u(lo);
      if (up >= 0) sol.z_bounds(2 * i + 1) = z_u(up);
    }
  };

  Residuals res;
  int slow_progress = 0;
  double mu_prev = std::numeric_limits<double>::infinity();
  double best_metric = std::numeric_limits<double>::infinity();
  int stalled = 0;

  for (int iter = 0; iter <= opts.max_iter; ++iter) {
    // Termination metrics are measured on the reconstructed (unscaled)
    // solution candidate, i.e. exactly what an independent KKT check of the
    // returned point would see.
    const double t = std::max(tau, 1e-300);
    VectorXd r_x = a.transpose() * z + c * tau;
    VectorXd r_z = a * x + s - b * tau;
    const double r_tau = kappa + c.dot(x) + b.dot(z);
    {
      const VectorXd x_u = scale.d_col.asDiagonal() * x / t;
      const VectorXd z_u = scale.d_row.asDiagonal() * z / (scale.c_scale * t);
      const VectorXd s_rec = cn.b - cn.a * x_u;
      res.p_res = cones.membership_violation(s_rec, false);
      // Equality rows measure |A x - b| directly.
      if (cn.eq_rows > 0)
        res.p_res = std::max(res.p_res,
                             s_rec.head(cn.eq_rows).lpNorm<Eigen::Infinity>() / b_norm_orig);
      VectorXd dres_vec = cn.a.transpose() * z_u;
      for (int j = 0; j < n; ++j) dres_vec(j) += c_orig(j);
      res.d_res = std::max(dres_vec.lpNorm<Eigen::Infinity>() / c_norm_orig,
                           cones.membership_violation(z_u, true));
      res.pcost = c_orig.dot(x_u);
      res.dcost = -cn.b.dot(z_u);
      res.abs_gap = std::abs(s_rec.tail(s_rec.size() - cn.eq_rows)
                                 .dot(z_u.tail(z_u.size() - cn.eq_rows)));
      res.rel_gap = res.abs_gap /
                    std::max(1.0, 0.5 * (std::abs(res.pcost) + std::abs(res.dcost)));
    }

    if (opts.verbose) {
      std::printf("it %3d  pres %9.2e dres %9.2e gap %9.2e tau %8.2e kappa %8.2e\n", iter,
                  res.p_res, res.d_res, res.rel_gap, tau, kappa);
    }

    if (res.p_res <= opts.tol && res.d_res <= opts.tol && res.rel_gap <= opts.tol) {
      finish_point(SolveStatus::Optimal, iter, res);
      return sol;
    }

    // Infeasibility certificates (unscaled rays).
    {
      VectorXd z_ray = scale.d_row.asDiagonal() * z / scale.c_scale;
      const double bz = cn.b.dot(z_ray);
      if (bz < 0.0) {
        VectorXd atz = cn.a.transpose() * (z_ray / (-bz));
        const double q = atz.lpNorm<Eigen::Infinity>() /
                         (a_max * std::max(1.0, (z_ray / (-bz)).lpNorm<Eigen::Infinity>()));
        if (q <= opts.tol * 10.0 && kappa > tau) {
          finish_point(SolveStatus::PrimalInfeasible, iter, res);
          sol.y_eq = z_ray.head(cn.eq_rows) / (-bz);
          if (cn.user_cone_rows > 0) {
            VectorXd zc = z_ray.segment(cn.eq_rows, cn.user_cone_rows) / (-bz);
            for (int off : cn.rotated_offsets) {
              const int local = off - cn.eq_rows;
              rotate_pair(zc(local), zc(local + 1));
            }
            sol.z_cone = zc;
          }
          return sol;
        }
      }
      VectorXd x_ray = scale.d_col.asDiagonal() * x;
      const double cx = c_orig.dot(x_ray);
      if (cx < 0.0) {
        VectorXd s_ray = scale.d_row.cwiseInverse().asDiagonal() * s;
        VectorXd pr = (cn.a * x_ray + s_ray) / (-cx);
        const double q = pr.lpNorm<Eigen::Infinity>() /
                         (a_max * std::max(1.0, (x_ray / (-cx)).lpNorm<Eigen::Infinity>()));
        if (q <= opts.tol * 10.0 && kappa > tau) {
          finish_point(SolveStatus::DualInfeasible, iter, res);
          sol.x = x_ray / (-cx);
          return sol;
        }
      }
    }

    if (iter == opts.max_iter) break;

    // Stop grinding once neither the residual metric nor mu makes progress.
    const double metric = std::max({res.p_res, res.d_res, res.rel_gap});
    if (metric < 0.99 * best_metric) {
      best_metric = metric;
      stalled = 0;
    } else if (++stalled > 15) {
      break;
    }
    const double mu = (s.dot(z) + tau * kappa) / (nu + 1.0);
    if (mu > 0.95 * mu_prev) {
      if (++slow_progress > 50) break;
    } else {
      slow_progress = 0;
    }
    mu_prev = std::min(mu_prev, mu);

    if (!cones.update_scaling(s, z, mu)) {
      finish_point(SolveStatus::Numerical, iter, res);
      return sol;
    }

    auto max_alpha = [&](const VectorXd& ds, const VectorXd& dz, double dtau, double dkappa) {
      double alpha = 1.0;
      alpha = cones.max_step_primal(s, ds, alpha);
      alpha = cones.max_step_dual(z, dz, alpha);
      if (dtau < 0.0) alpha = std::min(alpha, -tau / dtau);
      if (dkappa < 0.0) alpha = std::min(alpha, -kappa / dkappa);
      return alpha;
    };

    // Compute predictor + corrector under one factorization; escalate the
    // static regularization if the refined solves lose too much accuracy.
    VectorXd dx, dz, ds;
    double dtau = 0.0, dkappa = 0.0, alpha = 0.0, sigma = 0.0, alpha_aff = 0.0;
    bool have_step = false;
    double reg = 1e-9;
    for (int attempt = 0; attempt < 4 && !have_step; ++attempt, reg *= 1e3) {
      if (!kkt.factorize(reg)) continue;
      double worst_res = 0.0;
      VectorXd vx, vz;
      double q = 0.0;
      if (!kkt.solve(-c, b, vx, vz, &q)) continue;
      worst_res = std::max(worst_res, q);
      const double denom_base = c.dot(vx) + b.dot(vz) - kappa / tau;
      if (denom_base == 0.0) continue;

      auto direction = [&](double sig, const VectorXd& rhs_b, double dkappa_rhs, VectorXd& odx,
                           VectorXd& odz, VectorXd& ods, double& odtau, double& odkappa) -> bool {
        VectorXd ux, uz;
        const double f = 1.0 - sig;
        double qq = 0.0;
        if (!kkt.solve(-f * r_x, -f * r_z - rhs_b, ux, uz, &qq)) return false;
        worst_res = std::max(worst_res, qq);
        odtau = (-f * r_tau - dkappa_rhs - c.dot(ux) - b.dot(uz)) / denom_base;
        odx = ux + odtau * vx;
        odz = uz + odtau * vz;
        ods = rhs_b - cones.mult_H(odz);
        odkappa = dkappa_rhs - (kappa / tau) * odtau;
        return odx.allFinite() && odz.allFinite() && ods.allFinite() && std::isfinite(odtau);
      };

      VectorXd dxa, dza, dsa;
      double dtaua, dkappaa;
      if (!direction(0.0, cones.affine_rhs(s, z), -kappa, dxa, dza, dsa, dtaua, dkappaa)) continue;
      alpha_aff = max_alpha(dsa, dza, dtaua, dkappaa);
      const double mu_aff = ((s + alpha_aff * dsa).dot(z + alpha_aff * dza) +
                             (tau + alpha_aff * dtaua) * (kappa + alpha_aff * dkappaa)) /
                            (nu + 1.0);
      sigma = std::pow(std::max(0.0, std::min(1.0, mu_aff / mu)), 3.0);

      // Bias toward centering while any nonsymmetric block is badly centered.
      const double psi_now = cones.exp_centrality(s, z, mu);
      if (psi_now > 0.6) sigma = std::max(sigma, std::min(1.0, psi_now * psi_now));

      const VectorXd rhs_b = cones.combined_rhs(s, z, sigma, mu, dsa, dza, 1.0);
      const double dkappa_rhs = (sigma * mu - tau * kappa - dtaua * dkappaa) / tau;
      if (!direction(sigma, rhs_b, dkappa_rhs, dx, dz, ds, dtau, dkappa)) continue;
      // Accept a best-effort direction at the final regularization level.
      if (worst_res > (attempt + 1 < 4 ? 1e-8 : 1e-6)) continue;

      alpha = std::min(0.99 * max_alpha(ds, dz, dtau, dkappa), 1.0);
      // Backtrack until strictly inside every cone, inside a centrality
      // neighborhood for the nonsymmetric blocks (no worse than the current
      // point, so the loop cannot dead-lock), and with complementarity not
      // racing ahead of the still-unsolved linear residuals: letting mu
      // collapse first deflates the homogeneous iterate onto a useless ray.
      const double psi_cap = std::max(2.0, 1.01 * psi_now);
      int shrink = 0;
      while (shrink < 25) {
        const VectorXd s_try = s + alpha * ds;
        const VectorXd z_try = z + alpha * dz;
        const double tau_try = tau + alpha * dtau;
        const double kappa_try = kappa + alpha * dkappa;
        if (tau_try > 0.0 && kappa_try > 0.0 && cones.inside_primal(s_try) &&
            cones.inside_dual(z_try)) {
          const double mu_try = (s_try.dot(z_try) + tau_try * kappa_try) / (nu + 1.0);
          if (mu_try > 0.0 && cones.exp_centrality(s_try, z_try, mu_try) <= psi_cap) break;
        }
        alpha *= 0.7;
        ++shrink;
      }
      if (shrink == 25 || alpha < 1e-13) {
        if (opts.verbose) {
          const VectorXd s_try = s + alpha * ds;
          const VectorXd z_try = z + alpha * dz;
          std::printf(
              "      attempt %d failed: shrink=%d alpha=%.2e inP=%d inD=%d tau=%d kap=%d "
              "worst_res=%.1e\n",
              attempt, shrink, alpha, cones.inside_primal(s_try) ? 1 : 0,
              cones.inside_dual(z_try) ? 1 : 0, tau + alpha * dtau > 0, kappa + alpha * dkappa > 0,
              worst_res);
        }
        continue;
      }
      have_step = true;
    }
    if (!have_step) {
      // Last resort: a pure centering step (no residual reduction) can free a
      // jammed iterate; only one knob left before giving up.
      if (kkt.factorize(1e-9)) {
        VectorXd vx2, vz2;
        if (kkt.solve(-c, b, vx2, vz2)) {
          const double denom = c.dot(vx2) + b.dot(vz2) - kappa / tau;
          VectorXd ux, uz;
          const VectorXd rhs_b = cones.combined_rhs(s, z, 1.0, mu, s * 0.0, z * 0.0, 0.0);
          if (denom != 0.0 && kkt.solve(0.0 * r_x, -rhs_b, ux, uz)) {
            dtau = (-(mu - tau * kappa) / tau - c.dot(ux) - b.dot(uz)) / denom;
            dx = ux + dtau * vx2;
            dz = uz + dtau * vz2;
            ds = rhs_b - cones.mult_H(dz);
            dkappa = (mu - tau * kappa) / tau - (kappa / tau) * dtau;
            alpha = 0.9 * max_alpha(ds, dz, dtau, dkappa);
            int shr = 0;
            while (shr < 20 && alpha > 1e-9 &&
                   !(cones.inside_primal(s + alpha * ds) && cones.inside_dual(z + alpha * dz) &&
                     tau + alpha * dtau > 0 && kappa + alpha * dkappa > 0)) {
              alpha *= 0.7;
              ++shr;
            }
            if (alpha > 1e-9 && shr < 20 && dx.allFinite() && dz.allFinite() && ds.allFinite())
              have_step = true;
          }
        }
      }
      if (!have_step) {
        finish_point(SolveStatus::Numerical, iter, res);
        return sol;
      }
    }
    if (opts.verbose)
      std::printf("      sigma %8.2e a_aff %8.2e a %8.2e mu %9.3e tk=%.2e%s\n", sigma, alpha_aff,
                  alpha, mu, tau * kappa, cones.debug_margins(s, z).c_str());

    x += alpha * dx;
    z += alpha * dz;
    s += alpha * ds;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
  }

  finish_point(SolveStatus::MaxIter, opts.max_iter, res);
  return sol;
}

}  // namespace cfswipt::conic
