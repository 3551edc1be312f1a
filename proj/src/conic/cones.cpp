#include "conic/cones.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfswipt::conic::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Jordan-algebra helpers for the second-order cone.
double soc_det(const VectorXd& x) { return x(0) * x(0) - x.tail(x.size() - 1).squaredNorm(); }

// Quadratic representation product: Q_x v = 2 x (x'v) - det(x) J v.
VectorXd soc_quad_rep(const VectorXd& x, double det_x, const VectorXd& v) {
  VectorXd out = 2.0 * x.dot(v) * x;
  out(0) -= det_x * v(0);
  out.tail(out.size() - 1) += det_x * v.tail(v.size() - 1);
  return out;
}

// Jordan square root via the eigenvalues x0 +- ||x1||.
VectorXd soc_sqrt(const VectorXd& x) {
  const double nrm = x.tail(x.size() - 1).norm();
  const double e1 = x(0) + nrm;
  const double e2 = x(0) - nrm;
  const double s1 = std::sqrt(std::max(e1, 0.0));
  const double s2 = std::sqrt(std::max(e2, 0.0));
  VectorXd out(x.size());
  out(0) = 0.5 * (s1 + s2);
  if (nrm > 0.0)
    out.tail(x.size() - 1) = (0.5 * (s1 - s2) / nrm) * x.tail(x.size() - 1);
  else
    out.tail(x.size() - 1).setZero();
  return out;
}

VectorXd soc_inv(const VectorXd& x) {
  const double d = soc_det(x);
  VectorXd out(x.size());
  out(0) = x(0) / d;
  out.tail(x.size() - 1) = -x.tail(x.size() - 1) / d;
  return out;
}

// Solve L_lambda u = rhs where L_lambda is the arrow matrix of lambda.
VectorXd soc_arrow_solve(const VectorXd& lam, const VectorXd& rhs) {
  const auto lam1 = lam.tail(lam.size() - 1);
  const auto r1 = rhs.tail(rhs.size() - 1);
  const double det = lam(0) * lam(0) - lam1.squaredNorm();
  VectorXd out(lam.size());
  out(0) = (lam(0) * rhs(0) - lam1.dot(r1)) / det;
  out.tail(out.size() - 1) = (r1 - out(0) * lam1) / lam(0);
  return out;
}

VectorXd soc_jordan_prod(const VectorXd& x, const VectorXd& y) {
  VectorXd out(x.size());
  out(0) = x.dot(y);
  out.tail(out.size() - 1) = x(0) * y.tail(y.size() - 1) + y(0) * x.tail(x.size() - 1);
  return out;
}

// Largest step keeping x + alpha d in the second-order cone.
double soc_max_step(const VectorXd& x, const VectorXd& d, double cap) {
  const auto x1 = x.tail(x.size() - 1);
  const auto d1 = d.tail(d.size() - 1);
  const double a = d(0) * d(0) - d1.squaredNorm();
  const double b = 2.0 * (x(0) * d(0) - x1.dot(d1));
  const double c = x(0) * x(0) - x1.squaredNorm();
  double alpha = cap;
  const double disc = b * b - 4.0 * a * c;
  if (std::abs(a) < 1e-300) {
    if (b < 0.0) alpha = std::min(alpha, -c / b);
  } else if (a > 0.0) {
    if (disc >= 0.0) {
      const double r1 = (-b - std::sqrt(disc)) / (2.0 * a);
      if (r1 > 0.0) alpha = std::min(alpha, r1);
    }
  } else {
    // Opens downward: exactly one positive root.
    const double r = (-b - std::sqrt(std::max(disc, 0.0))) / (2.0 * a);
    if (r > 0.0) alpha = std::min(alpha, r);
  }
  // The trace must stay positive as well.
  if (d(0) < 0.0) alpha = std::min(alpha, -x(0) / d(0));
  return std::max(alpha, 0.0);
}

double nn_max_step(const VectorXd& x, const VectorXd& d, double cap) {
  double alpha = cap;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (d(i) < 0.0) alpha = std::min(alpha, -x(i) / d(i));
  return std::max(alpha, 0.0);
}

// Generic bisection fallback for nonsymmetric cones.
template <typename Member>
double bisect_max_step(const Eigen::Vector3d& x, const Eigen::Vector3d& d, double cap,
                       Member inside) {
  if (inside(Eigen::Vector3d(x + cap * d))) return cap;
  double lo = 0.0, hi = cap;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (inside(Eigen::Vector3d(x + mid * d)))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

// Well-centered interior point of the exponential cone pair; used to
// initialize both s and z.
const Eigen::Vector3d kExpInit(-1.051383945322714, 0.556409619469370, 1.258967884768947);

}  // namespace

// Interior tests and iterate-side barrier values are evaluated in long
// double: near convergence the barrier argument y log(z/y) - x is the tiny
// difference of O(1) terms, and double precision runs out three digits
// before the solver tolerance does.
bool exp_primal_interior(const Eigen::Vector3d& s) {
  if (!(s(1) > 0.0) || !(s(2) > 0.0)) return false;
  const long double y = s(1), w = s(2);
  return y * std::log(w / y) - static_cast<long double>(s(0)) > 0.0L;
}

bool exp_dual_interior(const Eigen::Vector3d& z) {
  if (!(z(0) < 0.0) || !(z(2) > 0.0)) return false;
  const long double u = z(0), v = z(1), w = z(2);
  return std::log(-u) + v / u < 1.0L + std::log(w);
}

Eigen::Vector3d exp_barrier_grad(const Eigen::Vector3d& s) {
  const long double x = s(0), y = s(1), w = s(2);
  const long double r = std::log(w / y);
  const long double u = y * r - x;
  Eigen::Vector3d g;
  g(0) = static_cast<double>(1.0L / u);
  g(1) = static_cast<double>(-(r - 1.0L) / u - 1.0L / y);
  g(2) = static_cast<double>(-y / (u * w) - 1.0L / w);
  return g;
}

Eigen::Matrix3d exp_barrier_hess_ur(double y, double w, double u, double r) {
  Eigen::Vector3d du(-1.0, r - 1.0, y / w);
  Eigen::Matrix3d d2u = Eigen::Matrix3d::Zero();
  d2u(1, 1) = -1.0 / y;
  d2u(1, 2) = d2u(2, 1) = 1.0 / w;
  d2u(2, 2) = -y / (w * w);
  Eigen::Matrix3d h = (du * du.transpose()) / (u * u) - d2u / u;
  h(1, 1) += 1.0 / (y * y);
  h(2, 2) += 1.0 / (w * w);
  return h;
}

Eigen::Matrix3d exp_barrier_hess(const Eigen::Vector3d& s) {
  const long double x = s(0), y = s(1), w = s(2);
  const long double r = std::log(w / y);
  return exp_barrier_hess_ur(s(1), s(2), static_cast<double>(y * r - x), static_cast<double>(r));
}

ExpConjugate exp_conjugate(const Eigen::Vector3d& z) {
  if (!exp_dual_interior(z)) throw std::domain_error("exp conjugate point: z not interior");
  const double z1 = z(0), z2 = z(1), z3 = z(2);
  // Root of g(ln y) = ln(1 - z1 y) - ln z3 - ln y - 1 + (z2 - 1/y)/z1 over
  // y > 0; g -> +inf as y -> 0+ and tends to a negative limit as y -> inf.
  auto g = [&](double ln_y) {
    const double y = std::exp(ln_y);
    return std::log1p(-z1 * y) - std::log(z3) - ln_y - 1.0 + (z2 - 1.0 / y) / z1;
  };
  double lo = 0.0, hi = 0.0;
  while (g(lo) <= 0.0 && lo > -700.0) lo -= 1.0;
  while (g(hi) > 0.0 && hi < 700.0) hi += 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16 * std::max(1.0, std::abs(lo))) break;
  }
  ExpConjugate out;
  const double y = std::exp(0.5 * (lo + hi));
  const double w = (1.0 - z1 * y) / z3;
  out.u = -1.0 / z1;  // exact: z1 = -1/u by construction
  out.r = 1.0 - (z2 - 1.0 / y) / z1;
  out.sbar = {y * out.r + 1.0 / z1, y, w};
  return out;
}

Eigen::Vector3d exp_grad_conjugate_point(const Eigen::Vector3d& z) {
  return exp_conjugate(z).sbar;
}

ConeSystem::ConeSystem(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  scale_index_.resize(blocks_.size(), -1);
  int n_nn = 0, n_soc = 0, n_exp = 0;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    total_dim_ += b.dim;
    switch (b.kind) {
      case BlockKind::Zero:
        break;
      case BlockKind::NonNeg:
        degree_ += b.dim;
        scale_index_[i] = n_nn++;
        break;
      case BlockKind::Soc:
        degree_ += 2.0;
        scale_index_[i] = n_soc++;
        break;
      case BlockKind::Exp:
        degree_ += 3.0;
        scale_index_[i] = n_exp++;
        break;
    }
  }
  nn_h_.resize(n_nn);
  soc_.resize(n_soc);
  exp_.resize(n_exp);
}

void ConeSystem::unit_init(VectorXd& s, VectorXd& z) const {
  s.setZero(total_dim_);
  z.setZero(total_dim_);
  for (const Block& b : blocks_) {
    switch (b.kind) {
      case BlockKind::Zero:
        break;
      case BlockKind::NonNeg:
        s.segment(b.offset, b.dim).setOnes();
        z.segment(b.offset, b.dim).setOnes();
        break;
      case BlockKind::Soc:
        s(b.offset) = 1.0;
        z(b.offset) = 1.0;
        break;
      case BlockKind::Exp:
        s.segment<3>(b.offset) = kExpInit;
        z.segment<3>(b.offset) = kExpInit;
        break;
    }
  }
}

bool ConeSystem::inside_primal(const VectorXd& s) const {
  for (const Block& b : blocks_) {
    switch (b.kind) {
      case BlockKind::Zero:
        break;
      case BlockKind::NonNeg:
        if ((s.segment(b.offset, b.dim).array() <= 0.0).any()) return false;
        break;
      case BlockKind::Soc:
        if (s(b.offset) <= 0.0 || soc_det(s.segment(b.offset, b.dim)) <= 0.0) return false;
        break;
      case BlockKind::Exp:
        if (!exp_primal_interior(s.segment<3>(b.offset))) return false;
        break;
    }
  }
  return true;
}

bool ConeSystem::inside_dual(const VectorXd& z) const {
  for (const Block& b : blocks_) {
    switch (b.kind) {
      case BlockKind::Zero:
        break;  // dual of {0} is everything
      case BlockKind::NonNeg:
        if ((z.segment(b.offset, b.dim).array() <= 0.0).any()) return false;
        break;
      case BlockKind::Soc:
        if (z(b.offset) <= 0.0 || soc_det(z.segment(b.offset, b.dim)) <= 0.0) return false;
        break;
      case BlockKind::Exp:
        if (!exp_dual_interior(z.segment<3>(b.offset))) return false;
        break;
    }
  }
  return true;
}

bool ConeSystem::update_scaling(const VectorXd& s, const VectorXd& z, double mu) {
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    switch (b.kind) {
      case BlockKind::Zero:
        break;
      case BlockKind::NonNeg: {
        const auto sb = s.segment(b.offset, b.dim);
        const auto zb = z.segment(b.offset, b.dim);
        if ((sb.array() <= 0.0).any() || (zb.array() <= 0.0).any()) return false;
        nn_h_[scale_index_[i]] = sb.cwiseQuotient(zb);
        break;
      }
      case BlockKind::Soc: {
        const VectorXd sb = s.segment(b.offset, b.dim);
        const VectorXd zb = z.segment(b.offset, b.dim);
        const double det_s = soc_det(sb);
        const double det_z = soc_det(zb);
        if (sb(0) <= 0.0 || zb(0) <= 0.0 || det_s <= 0.0 || det_z <= 0.0) return false;
        // Nesterov-Todd point: w = c (s + t J z), t = sqrt(det s / det z),
        // normalized so that Q_w z = s.
        const double t = std::sqrt(det_s / det_z);
        VectorXd jz(zb.size());
        jz(0) = zb(0);
        jz.tail(zb.size() - 1) = -zb.tail(zb.size() - 1);
        const double denom = sb.dot(zb) + t * det_z;
        if (denom <= 0.0) return false;
        SocScaling sc;
        sc.w = (sb + t * jz) / std::sqrt(2.0 * denom);
        sc.det_w = t;
        sc.w_half = soc_sqrt(sc.w);
        VectorXd w_inv = soc_inv(sc.w);
        sc.w_mhalf = soc_sqrt(w_inv);
        sc.lambda = soc_quad_rep(sc.w_half, std::sqrt(t), zb);
        soc_[scale_index_[i]] = std::move(sc);
        break;
      }
      case BlockKind::Exp: {
        const Eigen::Vector3d sb = s.segment<3>(b.offset);
        const Eigen::Vector3d zb = z.segment<3>(b.offset);
        if (!exp_primal_interior(sb) || !exp_dual_interior(zb)) return false;
        const ExpConjugate conj = exp_conjugate(zb);
        ExpScaling sc;
        sc.sbar = conj.sbar;
        // Dual scaling mu_b * hess f*(z) with a BFGS rank-2 correction
        // enforcing the secant H z = s, so the predictor treats
        // complementarity like the symmetric-cone case. The Hessian uses the
        // analytic barrier internals of the conjugate point (recomputing them
        // there cancels catastrophically near the boundary) and the
        // block-local complementarity, so the correction never bridges
        // cross-block imbalance.
        const double mu_local = sb.dot(zb) / 3.0;
        const Eigen::Matrix3d hbar =
            exp_barrier_hess_ur(conj.sbar(1), conj.sbar(2), conj.u, conj.r);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(hbar);
        const Eigen::Matrix3d h0 = mu_local * eig.eigenvectors() *
                                   eig.eigenvalues().cwiseMax(1e-300).cwiseInverse().asDiagonal() *
                                   eig.eigenvectors().transpose();
        const Eigen::Vector3d h0z = h0 * zb;
        const double zh0z = zb.dot(h0z);
        const double zs = zb.dot(sb);
        if (zh0z > 0.0 && zs > 0.0)
          sc.h = h0 - (h0z * h0z.transpose()) / zh0z + (sb * sb.transpose()) / zs;
        else
          sc.h = h0;
        sc.hz = sc.h * zb;
        exp_[scale_index_[i]] = std::move(sc);
        break;
      }
    }
  }
  return true;
}

void ConeSystem::append_neg_H(std::vector<Eigen::Triplet<double>>& out, int row0,
                              double reg) const {
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    const int base = row0 + b.offset;
    switch (b.kind) {
      case BlockKind::Zero:
        for (int r = 0; r < b.dim; ++r) out.emplace_back(base + r, base + r, -reg);
        break;
      case BlockKind::NonNeg: {
        const VectorXd& h = nn_h_[scale_index_[i]];
        for (int r = 0; r < b.dim; ++r) out.emplace_back(base + r, base + r, -(h(r) + reg));
        break;
      }
      case BlockKind::Soc: {
        const SocScaling& sc = soc_[scale_index_[i]];
        // H = Q_w = 2 w w' - det(w) J. Entries are emitted unconditionally so
        // the KKT pattern stays identical across iterations.
        for (int r = 0; r < b.dim; ++r) {
          for (int c = 0; c <= r; ++c) {
            double v = 2.0 * sc.w(r) * sc.w(c);
            if (r == c) v += (r == 0 ? -sc.det_w : sc.det_w);
            if (r == c) v += reg;
            out.emplace_back(base + r, base + c, -v);
          }
        }
        break;
      }
      case BlockKind::Exp: {
        const Eigen::Matrix3d& h = exp_[scale_index_[i]].h;
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c <= r; ++c) {
            double v = h(r, c) + (r == c ? reg : 0.0);
            out.emplace_back(base + r, base + c, -v);
          }
        break;
      }
    }
  }
}

VectorXd ConeSystem::mult_H(const VectorXd& v) const {
  VectorXd out = VectorXd::Zero(total_dim_);
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    switch (b.kind) {
      case BlockKind::Zero:
        break;
      case BlockKind::NonNeg:
        out.segment(b.offset, b.dim) =
            nn_h_[scale_index_[i]].cwiseProduct(v.segment(b.offset, b.dim));
        break;
      case BlockKind::Soc: {
        const SocScaling& sc = soc_[scale_index_[i]];
        out.segment(b.offset, b.dim) =
            soc_quad_rep(sc.w, sc.det_w, v.segment(b.offset, b.dim));
        break;
      }
      case BlockKind::Exp:
        out.segment<3>(b.offset) = exp_[scale_index_[i]].h * v.segment<3>(b.offset);
        break;
    }
  }
  return out;
}

double ConeSystem::max_step_primal(const VectorXd& s, const VectorXd& ds, double cap) const {
  double alpha = cap;
  for (const Block& b : blocks_) {
    switch (b.kind) {
      case BlockKind::Zero:
        break;
      case BlockKind::NonNeg:
        alpha = std::min(alpha, nn_max_step(s.segment(b.offset, b.dim),
                                            ds.segment(b.offset, b.dim), cap));
        break;
      case BlockKind::Soc:
        alpha = std::min(alpha, soc_max_step(s.segment(b.offset, b.dim),
                                             ds.segment(b.offset, b.dim), cap));
        break;
      case BlockKind::Exp:
        alpha = std::min(alpha, bisect_max_step(s.segment<3>(b.offset), ds.segment<3>(b.offset),
                                                cap, exp_primal_interior));
        break;
    }
  }
  return alpha;
}

double ConeSystem::max_step_dual(const VectorXd& z, const VectorXd& dz, double cap) const {
  double alpha = cap;
  for (const Block& b : blocks_) {
    switch (b.kind) {
      case BlockKind::Zero:
        break;  // z free
      case BlockKind::NonNeg:
        alpha = std::min(alpha, nn_max_step(z.segment(b.offset, b.dim),
                                            dz.segment(b.offset, b.dim), cap));
        break;
      case BlockKind::Soc:
        alpha = std::min(alpha, soc_max_step(z.segment(b.offset, b.dim),
                                             dz.segment(b.offset, b.dim), cap));
        break;
      case BlockKind::Exp:
        alpha = std::min(alpha, bisect_max_step(z.segment<3>(b.offset), dz.segment<3>(b.offset),
                                                cap, exp_dual_interior));
        break;
    }
  }
  return alpha;
}

VectorXd ConeSystem::affine_rhs(const VectorXd& s, const VectorXd& z) const {
  VectorXd r = -s;
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    if (b.kind == BlockKind::Zero) {
      r.segment(b.offset, b.dim).setZero();
    } else if (b.kind == BlockKind::Exp) {
      const ExpScaling& sc = exp_[scale_index_[i]];
      if (sc.primal_mode) r.segment<3>(b.offset) = -sc.hz;
    }
  }
  (void)z;
  return r;
}

VectorXd ConeSystem::combined_rhs(const VectorXd& s, const VectorXd& z, double sigma, double mu,
                                  const VectorXd& ds_aff, const VectorXd& dz_aff,
                                  double corr_weight) const {
  const double sigma_mu = sigma * mu;
  VectorXd r = VectorXd::Zero(total_dim_);
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const Block& b = blocks_[i];
    switch (b.kind) {
      case BlockKind::Zero:
        break;
      case BlockKind::NonNeg: {
        const auto sb = s.segment(b.offset, b.dim).array();
        const auto zb = z.segment(b.offset, b.dim).array();
        const auto dsa = ds_aff.segment(b.offset, b.dim).array();
        const auto dza = dz_aff.segment(b.offset, b.dim).array();
        r.segment(b.offset, b.dim) =
            (-sb + (sigma_mu - corr_weight * dsa * dza) / zb).matrix();
        break;
      }
      case BlockKind::Soc: {
        const SocScaling& sc = soc_[scale_index_[i]];
        const double sqrt_det = std::sqrt(sc.det_w);
        // Scaled affine products u = W^{-1} ds, v = W dz.
        const VectorXd u =
            soc_quad_rep(sc.w_mhalf, 1.0 / sqrt_det, ds_aff.segment(b.offset, b.dim));
        const VectorXd v = soc_quad_rep(sc.w_half, sqrt_det, dz_aff.segment(b.offset, b.dim));
        const VectorXd corr = soc_arrow_solve(sc.lambda, soc_jordan_prod(u, v));
        const VectorXd lam_inv = soc_inv(sc.lambda);
        const VectorXd inner = sigma_mu * lam_inv - corr_weight * corr;
        r.segment(b.offset, b.dim) =
            -s.segment(b.offset, b.dim) + soc_quad_rep(sc.w_half, sqrt_det, inner);
        break;
      }
      case BlockKind::Exp: {
        const ExpScaling& sc = exp_[scale_index_[i]];
        if (sc.primal_mode)
          r.segment<3>(b.offset) = -sc.hz + sigma * s.segment<3>(b.offset);
        else
          r.segment<3>(b.offset) = -s.segment<3>(b.offset) + sigma_mu * sc.sbar;
        break;
      }
    }
  }
  return r;
}

double ConeSystem::membership_violation(const VectorXd& v, bool dual) const {
  double worst = 0.0;
  for (const Block& b : blocks_) {
    const auto vb = v.segment(b.offset, b.dim);
    const double scale = 1.0 + vb.lpNorm<Eigen::Infinity>();
    double viol = 0.0;
    switch (b.kind) {
      case BlockKind::Zero:
        viol = dual ? 0.0 : vb.lpNorm<Eigen::Infinity>();
        break;
      case BlockKind::NonNeg:
        viol = std::max(0.0, -vb.minCoeff()) / scale;
        break;
      case BlockKind::Soc:
        viol = std::max(0.0, vb.tail(b.dim - 1).norm() - vb(0)) / scale;
        break;
      case BlockKind::Exp: {
        const double x = vb(0), y = vb(1), w = vb(2);
        if (!dual) {
          if (y <= 0.0)
            viol = std::max({-y, x, -w, 0.0}) / scale;
          else if (w <= 0.0)
            viol = -w / scale;
          else
            viol = std::max(0.0, y * std::log(y / w) + x) / scale;
        } else {
          if (x >= 0.0)
            viol = std::max({x, -y, -w, 0.0}) / scale;
          else if (w <= 0.0)
            viol = -w / scale;
          else
            viol = std::max(0.0, std::log(-x) + y / x - 1.0 - std::log(w)) / scale;
        }
        break;
      }
    }
    worst = std::max(worst, viol);
  }
  return worst;
}

double ConeSystem::exp_centrality(const VectorXd& s, const VectorXd& z, double mu) const {
  double worst = 0.0;
  for (const Block& b : blocks_) {
    if (b.kind != BlockKind::Exp) continue;
    const Eigen::Vector3d sb = s.segment<3>(b.offset);
    const Eigen::Vector3d zb = z.segment<3>(b.offset);
    if (!exp_primal_interior(sb)) return std::numeric_limits<double>::infinity();
    const Eigen::Vector3d r = zb + mu * exp_barrier_grad(sb);
    const Eigen::Matrix3d h = exp_barrier_hess(sb);
    const double psi2 = r.dot(h.ldlt().solve(r));
    worst = std::max(worst, std::sqrt(std::max(0.0, psi2)) / mu);
  }
  return worst;
}

std::string ConeSystem::debug_margins(const VectorXd& s, const VectorXd& z) const {
  char buf[160];
  std::string out;
  for (const Block& b : blocks_) {
    if (b.kind == BlockKind::Zero) continue;
    const auto sb = s.segment(b.offset, b.dim);
    const auto zb = z.segment(b.offset, b.dim);
    double pm = 0.0, dm = 0.0;
    const char* k = "?";
    switch (b.kind) {
      case BlockKind::NonNeg:
        k = "nn";
        pm = sb.minCoeff();
        dm = zb.minCoeff();
        break;
      case BlockKind::Soc:
        k = "soc";
        pm = soc_det(sb);
        dm = soc_det(zb);
        break;
      case BlockKind::Exp: {
        k = "exp";
        pm = sb(1) * std::log(sb(2) / sb(1)) - sb(0);
        dm = 1.0 + std::log(zb(2)) - std::log(-zb(0)) - zb(1) / zb(0);
        break;
      }
      default:
        break;
    }
    std::snprintf(buf, sizeof(buf), " [%s mu=%.2e pm=%.2e dm=%.2e |s|=%.1e |z|=%.1e]", k,
                  sb.dot(zb) / std::max(1, b.dim <= 3 ? 3 : b.dim), pm, dm, sb.norm(), zb.norm());
    out += buf;
  }
  return out;
}

}  // namespace cfswipt::conic::detail
