#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "conic/canonical.hpp"

namespace cfswipt::conic {

namespace detail {

void rotate_pair(double& u, double& v) {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  const double a = inv_sqrt2 * (u + v);
  const double b = inv_sqrt2 * (u - v);
  u = a;
  v = b;
}

Canonical canonicalize(const ConicProgram& prog) {
  prog.check_well_formed();
  Canonical cn;
  cn.n = prog.n_vars;
  cn.eq_rows = static_cast<int>(prog.eq_b.size());
  cn.user_cone_rows = prog.cone_dim();

  int n_bound_rows = 0;
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (const auto& vb : prog.var_bounds) {
    if (vb.lower > -inf) ++n_bound_rows;
    if (vb.upper < inf) ++n_bound_rows;
  }
  cn.bound_rows = n_bound_rows;

  const int m_total = cn.eq_rows + cn.user_cone_rows + cn.bound_rows;
  cn.b = VectorXd::Zero(m_total);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(prog.eq_A.entries.size() + prog.cone_G.entries.size() + n_bound_rows);

  // Equalities: A x + s = b with s fixed to zero.
  for (const auto& t : prog.eq_A.entries) trips.emplace_back(t.row, t.col, t.value);
  for (int i = 0; i < cn.eq_rows; ++i) cn.b(i) = prog.eq_b[i];
  cn.blocks.push_back({BlockKind::Zero, 0, cn.eq_rows});

  // User cones: G x + s = h.
  for (const auto& t : prog.cone_G.entries)
    trips.emplace_back(cn.eq_rows + t.row, t.col, t.value);
  for (int i = 0; i < cn.user_cone_rows; ++i) cn.b(cn.eq_rows + i) = prog.cone_h[i];
  int off = cn.eq_rows;
  for (const auto& cone : prog.cone_list) {
    switch (cone.kind) {
      case ConeKind::NonNeg:
        cn.blocks.push_back({BlockKind::NonNeg, off, cone.dim});
        break;
      case ConeKind::Soc:
        cn.blocks.push_back({BlockKind::Soc, off, cone.dim});
        break;
      case ConeKind::Rsoc:
        cn.blocks.push_back({BlockKind::Soc, off, cone.dim});
        cn.rotated_offsets.push_back(off);
        break;
      case ConeKind::Exp:
        cn.blocks.push_back({BlockKind::Exp, off, 3});
        break;
    }
    off += cone.dim;
  }

  // Bound rows: lower -> s = x_j - lo >= 0; upper -> s = up - x_j >= 0.
  int brow = cn.eq_rows + cn.user_cone_rows;
  const int bound_block_start = brow;
  for (const auto& vb : prog.var_bounds) {
    int lo_row = -1, up_row = -1;
    if (vb.lower > -inf) {
      trips.emplace_back(brow, vb.var, -1.0);
      cn.b(brow) = -vb.lower;
      lo_row = brow++;
    }
    if (vb.upper < inf) {
      trips.emplace_back(brow, vb.var, 1.0);
      cn.b(brow) = vb.upper;
      up_row = brow++;
    }
    cn.bound_rows_of.emplace_back(lo_row, up_row);
  }
  if (cn.bound_rows > 0)
    cn.blocks.push_back({BlockKind::NonNeg, bound_block_start, cn.bound_rows});

  cn.a.resize(m_total, cn.n);
  cn.a.setFromTriplets(trips.begin(), trips.end());
  cn.a.makeCompressed();

  // Rotate every Rsoc (u, v) row pair. Row storage is compressed row-major
  // only after transpose; operate on a row-major copy for the affected rows.
  if (!cn.rotated_offsets.empty()) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> ar(cn.a);
    for (int o : cn.rotated_offsets) {
      const Eigen::SparseVector<double> ru = ar.row(o);
      const Eigen::SparseVector<double> rv = ar.row(o + 1);
      constexpr double inv_sqrt2 = 0.70710678118654752440;
      Eigen::SparseVector<double> new_u = inv_sqrt2 * (ru + rv);
      Eigen::SparseVector<double> new_v = inv_sqrt2 * (ru - rv);
      ar.row(o) = new_u;
      ar.row(o + 1) = new_v;
      rotate_pair(cn.b(o), cn.b(o + 1));
    }
    ar.prune(0.0);
    cn.a = ar;
    cn.a.makeCompressed();
  }
  return cn;
}

}  // namespace detail

int ConicProgram::cone_dim() const {
  int d = 0;
  for (const auto& c : cone_list) d += c.dim;
  return d;
}

void ConicProgram::check_well_formed() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("ConicProgram: " + m); };
  if (n_vars <= 0) fail("n_vars must be positive");
  if (static_cast<int>(objective.size()) != n_vars) fail("objective length != n_vars");
  if (eq_A.rows != static_cast<int>(eq_b.size())) fail("eq_A rows != eq_b length");
  if (eq_A.cols != n_vars && eq_A.rows > 0) fail("eq_A cols != n_vars");
  if (cone_G.rows != static_cast<int>(cone_h.size())) fail("cone_G rows != cone_h length");
  if (cone_G.cols != n_vars && cone_G.rows > 0) fail("cone_G cols != n_vars");
  if (cone_dim() != cone_G.rows) fail("cone dims do not cover cone_G rows");
  for (const auto& t : eq_A.entries)
    if (t.row < 0 || t.row >= eq_A.rows || t.col < 0 || t.col >= n_vars)
      fail("eq_A entry out of range");
  for (const auto& t : cone_G.entries)
    if (t.row < 0 || t.row >= cone_G.rows || t.col < 0 || t.col >= n_vars)
      fail("cone_G entry out of range");
  for (const auto& c : cone_list) {
    switch (c.kind) {
      case ConeKind::NonNeg:
        if (c.dim < 1) fail("nonneg cone dim must be >= 1");
        break;
      case ConeKind::Soc:
        if (c.dim < 2) fail("soc dim must be >= 2");
        break;
      case ConeKind::Rsoc:
        if (c.dim < 3) fail("rsoc dim must be >= 3");
        break;
      case ConeKind::Exp:
        if (c.dim != 3) fail("exp cone dim must be 3");
        break;
    }
  }
  for (const auto& vb : var_bounds) {
    if (vb.var < 0 || vb.var >= n_vars) fail("bound variable index out of range");
    if (vb.lower > vb.upper) fail("bound lower > upper");
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::Numerical: return "numerical";
  }
  return "unknown";
}

double KktResiduals::max() const { return std::max(primal, std::max(dual, complementarity)); }

namespace {

double cone_violation(const ConeSpec& cone, const Eigen::VectorXd& v) {
  const double scale = 1.0 + v.lpNorm<Eigen::Infinity>();
  switch (cone.kind) {
    case ConeKind::NonNeg:
      return std::max(0.0, -v.minCoeff()) / scale;
    case ConeKind::Soc:
      return std::max(0.0, v.tail(v.size() - 1).norm() - v(0)) / scale;
    case ConeKind::Rsoc: {
      double viol = std::max(0.0, -v(0));
      viol = std::max(viol, -v(1));
      viol = std::max(viol, v.tail(v.size() - 2).squaredNorm() - 2.0 * v(0) * v(1));
      return std::max(0.0, viol) / (scale * scale);
    }
    case ConeKind::Exp: {
      // closure{y e^(x/y) <= z, y > 0}; y = 0 requires x <= 0, z >= 0.
      const double x = v(0), y = v(1), z = v(2);
      if (y <= 0.0) {
        double viol = std::max(0.0, -y);
        viol = std::max(viol, std::max(0.0, x));
        viol = std::max(viol, std::max(0.0, -z));
        return viol / scale;
      }
      if (z <= 0.0) return std::max(0.0, -z + std::max(0.0, x)) / scale;
      return std::max(0.0, y * std::log(y / z) + x) / scale;  // y ln(y/z) + x <= 0
    }
  }
  return 0.0;
}

double dual_cone_violation(const ConeSpec& cone, const Eigen::VectorXd& v) {
  switch (cone.kind) {
    case ConeKind::NonNeg:
    case ConeKind::Soc:
    case ConeKind::Rsoc:
      return cone_violation(cone, v);  // self-dual
    case ConeKind::Exp: {
      // dual cone closure{(u,v,w): u < 0, -u e^(v/u) <= e w}.
      const double scale = 1.0 + v.lpNorm<Eigen::Infinity>();
      const double u = v(0), vv = v(1), w = v(2);
      if (u >= 0.0) {
        double viol = std::max(0.0, u);
        viol = std::max(viol, std::max(0.0, -vv));
        viol = std::max(viol, std::max(0.0, -w));
        return viol / scale;
      }
      if (w <= 0.0) return std::max(0.0, -w) / scale + ((-u) > 0 ? 0.0 : 0.0);
      // log form: log(-u) + v/u <= 1 + log(w)
      return std::max(0.0, std::log(-u) + vv / u - 1.0 - std::log(w)) / scale;
    }
  }
  return 0.0;
}

}  // namespace

KktResiduals check_kkt(const ConicProgram& prog, const ConicSolution& sol) {
  prog.check_well_formed();
  const int n = prog.n_vars;
  const Eigen::VectorXd& x = sol.x;
  if (x.size() != n) throw std::invalid_argument("check_kkt: solution x has wrong size");

  Eigen::Map<const Eigen::VectorXd> c(prog.objective.data(), n);
  KktResiduals res;

  // Primal: equality residual, cone memberships, bound violations.
  double prim = 0.0;
  if (!prog.eq_b.empty()) {
    Eigen::VectorXd r = -Eigen::Map<const Eigen::VectorXd>(prog.eq_b.data(), prog.eq_b.size());
    for (const auto& t : prog.eq_A.entries) r(t.row) += t.value * x(t.col);
    double bn = 1.0 + Eigen::Map<const Eigen::VectorXd>(prog.eq_b.data(), prog.eq_b.size())
                          .lpNorm<Eigen::Infinity>();
    prim = r.lpNorm<Eigen::Infinity>() / bn;
  }
  Eigen::VectorXd s;
  if (prog.cone_dim() > 0) {
    s = Eigen::Map<const Eigen::VectorXd>(prog.cone_h.data(), prog.cone_h.size());
    for (const auto& t : prog.cone_G.entries) s(t.row) -= t.value * x(t.col);
    int off = 0;
    for (const auto& cone : prog.cone_list) {
      prim = std::max(prim, cone_violation(cone, s.segment(off, cone.dim)));
      off += cone.dim;
    }
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (const auto& vb : prog.var_bounds) {
    const double sc = 1.0 + std::abs(x(vb.var));
    if (vb.lower > -inf) prim = std::max(prim, (vb.lower - x(vb.var)) / sc);
    if (vb.upper < inf) prim = std::max(prim, (x(vb.var) - vb.upper) / sc);
  }
  res.primal = prim;

  // Dual: stationarity c + A'y + G'z (+ bound multipliers) = 0, z in K*.
  Eigen::VectorXd grad = c;
  if (sol.y_eq.size() == static_cast<Eigen::Index>(prog.eq_b.size()))
    for (const auto& t : prog.eq_A.entries) grad(t.col) += t.value * sol.y_eq(t.row);
  if (sol.z_cone.size() == static_cast<Eigen::Index>(prog.cone_h.size()))
    for (const auto& t : prog.cone_G.entries) grad(t.col) += t.value * sol.z_cone(t.row);
  double dual_viol = 0.0;
  if (sol.z_bounds.size() == static_cast<Eigen::Index>(2 * prog.var_bounds.size())) {
    for (size_t i = 0; i < prog.var_bounds.size(); ++i) {
      const auto& vb = prog.var_bounds[i];
      const double zl = sol.z_bounds(2 * i);
      const double zu = sol.z_bounds(2 * i + 1);
      grad(vb.var) += -zl + zu;  // rows were -x_j and +x_j
      dual_viol = std::max(dual_viol, std::max(-zl, -zu));
    }
  }
  double dn = 1.0 + c.lpNorm<Eigen::Infinity>();
  double dual = grad.lpNorm<Eigen::Infinity>() / dn;
  if (sol.z_cone.size() == static_cast<Eigen::Index>(prog.cone_h.size())) {
    int off = 0;
    for (const auto& cone : prog.cone_list) {
      dual = std::max(dual, dual_cone_violation(cone, sol.z_cone.segment(off, cone.dim)));
      off += cone.dim;
    }
  }
  res.dual = std::max(dual, dual_viol);

  // Complementarity: s'z across cones and bounds, relative to the objective.
  double gap = 0.0;
  if (s.size() > 0 && sol.z_cone.size() == s.size()) gap += s.dot(sol.z_cone);
  if (sol.z_bounds.size() == static_cast<Eigen::Index>(2 * prog.var_bounds.size())) {
    for (size_t i = 0; i < prog.var_bounds.size(); ++i) {
      const auto& vb = prog.var_bounds[i];
      if (vb.lower > -inf) gap += (x(vb.var) - vb.lower) * sol.z_bounds(2 * i);
      if (vb.upper < inf) gap += (vb.upper - x(vb.var)) * sol.z_bounds(2 * i + 1);
    }
  }
  const double obj = c.dot(x);
  res.complementarity = std::abs(gap) / std::max(1.0, std::abs(obj));
  return res;
}

void dump_program(const ConicProgram& prog, std::ostream& os) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  os << "cfswipt-conic v1\n";
  os << "vars " << prog.n_vars << "\n";
  os << "objective";
  for (double v : prog.objective) os << ' ' << num(v);
  os << "\n";
  auto dump_mat = [&](const char* name, const SparseMatrix& m, const std::vector<double>& rhs) {
    os << name << ' ' << m.rows << ' ' << m.cols << ' ' << m.entries.size() << "\n";
    auto sorted = m.entries;
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (const auto& t : sorted) os << t.row << ' ' << t.col << ' ' << num(t.value) << "\n";
    os << "rhs";
    for (double v : rhs) os << ' ' << num(v);
    os << "\n";
  };
  dump_mat("eq", prog.eq_A, prog.eq_b);
  dump_mat("cone", prog.cone_G, prog.cone_h);
  os << "cones " << prog.cone_list.size() << "\n";
  for (const auto& c : prog.cone_list) {
    const char* k = c.kind == ConeKind::NonNeg ? "nonneg"
                    : c.kind == ConeKind::Soc  ? "soc"
                    : c.kind == ConeKind::Rsoc ? "rsoc"
                                               : "exp";
    os << k << ' ' << c.dim << "\n";
  }
  os << "bounds " << prog.var_bounds.size() << "\n";
  for (const auto& vb : prog.var_bounds)
    os << vb.var << ' ' << num(vb.lower) << ' ' << num(vb.upper) << "\n";
}

std::string dump_program(const ConicProgram& prog) {
  std::ostringstream os;
  dump_program(prog, os);
  return os.str();
}

}  // namespace cfswipt::conic
