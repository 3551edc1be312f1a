#pragma once

// A library of small cone programs with analytically known optima: LP
// vertices, second-order-cone norms, rotated-cone hypographs, and
// exponential-cone boundaries. Shared by the unit tests and the acceptance
// suite.

#include <cmath>
#include <string>
#include <vector>

#include "cfswipt/conic.hpp"

namespace cfswipt::testing {

struct LinExpr {
  double c0 = 0.0;
  std::vector<std::pair<int, double>> terms;
  LinExpr() = default;
  LinExpr(double constant, std::vector<std::pair<int, double>> t)
      : c0(constant), terms(std::move(t)) {}
};

class ProgBuilder {
 public:
  explicit ProgBuilder(int n) {
    p_.n_vars = n;
    p_.objective.assign(n, 0.0);
    p_.eq_A.cols = n;
    p_.cone_G.cols = n;
  }

  void obj(int j, double v) { p_.objective[j] = v; }

  // expr == 0
  void eq(const LinExpr& e) {
    const int r = p_.eq_A.rows++;
    p_.eq_b.push_back(-e.c0);
    for (auto [j, v] : e.terms) p_.eq_A.add(r, j, v);
  }

  // Slack rows s_i = rows[i] constrained to the cone (s = h - Gx).
  void cone(conic::ConeKind kind, const std::vector<LinExpr>& rows) {
    p_.cone_list.push_back({kind, static_cast<int>(rows.size())});
    for (const auto& e : rows) {
      const int r = p_.cone_G.rows++;
      p_.cone_h.push_back(e.c0);
      for (auto [j, v] : e.terms) p_.cone_G.add(r, j, -v);
    }
  }

  void ge0(const LinExpr& e) { cone(conic::ConeKind::NonNeg, {e}); }

  void bound(int j, double lo, double hi) { p_.var_bounds.push_back({j, lo, hi}); }

  conic::ConicProgram take() { return std::move(p_); }

 private:
  conic::ConicProgram p_;
};

struct KnownProgram {
  std::string name;
  conic::ConicProgram prog;
  double optimal_objective;
};

inline std::vector<KnownProgram> known_program_suite() {
  std::vector<KnownProgram> out;
  const double e = std::exp(1.0);

  {  // 1: one-variable LP vertex
    ProgBuilder b(1);
    b.obj(0, 1.0);
    b.ge0({-1.0, {{0, 1.0}}});  // x - 1 >= 0
    out.push_back({"lp_single", b.take(), 1.0});
  }
  {  // 2: separable LP
    ProgBuilder b(2);
    b.obj(0, 1.0);
    b.obj(1, 1.0);
    b.ge0({-1.0, {{0, 1.0}}});
    b.ge0({-2.0, {{1, 1.0}}});
    out.push_back({"lp_separable", b.take(), 3.0});
  }
  {  // 3: simplex vertex
    ProgBuilder b(2);
    b.obj(0, -1.0);
    b.obj(1, -1.0);
    b.ge0({1.0, {{0, -1.0}, {1, -1.0}}});  // 1 - x - y >= 0
    b.ge0({0.0, {{0, 1.0}}});
    b.ge0({0.0, {{1, 1.0}}});
    out.push_back({"lp_simplex", b.take(), -1.0});
  }
  {  // 4: objective pinned by an equality
    ProgBuilder b(2);
    b.obj(0, 1.0);
    b.obj(1, -1.0);
    b.eq({-1.0, {{0, 1.0}, {1, -1.0}}});  // x - y = 1
    b.ge0({0.0, {{0, 1.0}}});
    b.ge0({0.0, {{1, 1.0}}});
    out.push_back({"lp_eq_pinned", b.take(), 1.0});
  }
  {  // 5: two active constraints
    ProgBuilder b(2);
    b.obj(0, 2.0);
    b.obj(1, 3.0);
    b.ge0({-2.0, {{0, 1.0}, {1, 1.0}}});   // x + y >= 2
    b.ge0({1.0, {{0, -1.0}, {1, 1.0}}});   // 1 - x + y >= 0
    b.ge0({0.0, {{0, 1.0}}});
    b.ge0({0.0, {{1, 1.0}}});
    out.push_back({"lp_vertex_15_05", b.take(), 4.5});
  }
  {  // 6: pure box bound
    ProgBuilder b(1);
    b.obj(0, -1.0);
    b.bound(0, -3.0, 5.0);
    out.push_back({"lp_box", b.take(), -5.0});
  }
  {  // 7: equality + nonnegativity vertex
    ProgBuilder b(2);
    b.obj(0, 1.0);
    b.obj(1, 1.0);
    b.eq({-2.0, {{0, 1.0}, {1, 2.0}}});  // x + 2y = 2
    b.ge0({0.0, {{0, 1.0}}});
    b.ge0({0.0, {{1, 1.0}}});
    out.push_back({"lp_eq_vertex", b.take(), 1.0});
  }
  {  // 8: Euclidean norm
    ProgBuilder b(1);
    b.obj(0, 1.0);
    b.cone(conic::ConeKind::Soc, {{0.0, {{0, 1.0}}}, {3.0, {}}, {4.0, {}}});
    out.push_back({"soc_norm_34", b.take(), 5.0});
  }
  {  // 9: norm with equality-pinned coordinates
    ProgBuilder b(3);
    b.obj(0, 1.0);
    b.eq({-3.0, {{1, 1.0}}});
    b.eq({4.0, {{2, 1.0}}});
    b.cone(conic::ConeKind::Soc,
           {{0.0, {{0, 1.0}}}, {0.0, {{1, 1.0}}}, {0.0, {{2, 1.0}}}});
    out.push_back({"soc_norm_eq", b.take(), 5.0});
  }
  {  // 10: box projection distance to (2,2) from [0,1]^2 = sqrt 2
    ProgBuilder b(3);  // t, x1, x2
    b.obj(0, 1.0);
    b.bound(1, 0.0, 1.0);
    b.bound(2, 0.0, 1.0);
    b.cone(conic::ConeKind::Soc,
           {{0.0, {{0, 1.0}}}, {-2.0, {{1, 1.0}}}, {-2.0, {{2, 1.0}}}});
    out.push_back({"soc_projection", b.take(), std::sqrt(2.0)});
  }
  {  // 11: rotated-cone hypograph, t <= sqrt(2*2*8)
    ProgBuilder b(1);
    b.obj(0, -1.0);
    b.cone(conic::ConeKind::Rsoc, {{2.0, {}}, {8.0, {}}, {0.0, {{0, 1.0}}}});
    out.push_back({"rsoc_hypograph", b.take(), -std::sqrt(32.0)});
  }
  {  // 12: quadratic epigraph u >= x^2 with x = 3
    ProgBuilder b(2);  // u, x
    b.obj(0, 1.0);
    b.eq({-3.0, {{1, 1.0}}});
    b.cone(conic::ConeKind::Rsoc, {{0.0, {{0, 1.0}}}, {0.5, {}}, {0.0, {{1, 1.0}}}});
    out.push_back({"rsoc_square", b.take(), 9.0});
  }
  {  // 13: min norm on the line x + y = 2
    ProgBuilder b(3);  // t, x, y
    b.obj(0, 1.0);
    b.eq({-2.0, {{1, 1.0}, {2, 1.0}}});
    b.cone(conic::ConeKind::Soc,
           {{0.0, {{0, 1.0}}}, {0.0, {{1, 1.0}}}, {0.0, {{2, 1.0}}}});
    out.push_back({"soc_line_distance", b.take(), std::sqrt(2.0)});
  }
  {  // 14: exponential boundary e^1 <= z
    ProgBuilder b(1);
    b.obj(0, 1.0);
    b.cone(conic::ConeKind::Exp, {{1.0, {}}, {1.0, {}}, {0.0, {{0, 1.0}}}});
    out.push_back({"exp_e", b.take(), e});
  }
  {  // 15: e^2 via an equality-pinned argument
    ProgBuilder b(2);  // z, x
    b.obj(0, 1.0);
    b.eq({-2.0, {{1, 1.0}}});
    b.cone(conic::ConeKind::Exp, {{0.0, {{1, 1.0}}}, {1.0, {}}, {0.0, {{0, 1.0}}}});
    out.push_back({"exp_e2", b.take(), e * e});
  }
  {  // 16: logarithm hypograph, max x with e^x <= 5
    ProgBuilder b(1);
    b.obj(0, -1.0);
    b.cone(conic::ConeKind::Exp, {{0.0, {{0, 1.0}}}, {1.0, {}}, {5.0, {}}});
    out.push_back({"exp_log5", b.take(), -std::log(5.0)});
  }
  {  // 17: unit boundary, max x with e^x <= e
    ProgBuilder b(1);
    b.obj(0, -1.0);
    b.cone(conic::ConeKind::Exp, {{0.0, {{0, 1.0}}}, {1.0, {}}, {e, {}}});
    out.push_back({"exp_unit", b.take(), -1.0});
  }
  {  // 18: perspective scaling, z >= 2 e^(1/2)
    ProgBuilder b(1);
    b.obj(0, 1.0);
    b.cone(conic::ConeKind::Exp, {{1.0, {}}, {2.0, {}}, {0.0, {{0, 1.0}}}});
    out.push_back({"exp_perspective", b.take(), 2.0 * std::exp(0.5)});
  }
  {  // 19: exp + lp mix
    ProgBuilder b(2);  // z, w
    b.obj(0, 1.0);
    b.obj(1, 1.0);
    b.cone(conic::ConeKind::Exp, {{1.0, {}}, {1.0, {}}, {0.0, {{0, 1.0}}}});
    b.ge0({-1.0, {{1, 1.0}}});
    out.push_back({"exp_lp_mix", b.take(), e + 1.0});
  }
  {  // 20: soc + exp mix
    ProgBuilder b(2);  // t, z
    b.obj(0, 1.0);
    b.obj(1, 1.0);
    b.cone(conic::ConeKind::Soc, {{0.0, {{0, 1.0}}}, {3.0, {}}, {4.0, {}}});
    b.cone(conic::ConeKind::Exp, {{1.0, {}}, {1.0, {}}, {0.0, {{1, 1.0}}}});
    out.push_back({"soc_exp_mix", b.take(), 5.0 + e});
  }
  {  // 21: redundant constraint
    ProgBuilder b(1);
    b.obj(0, 1.0);
    b.ge0({5.0, {{0, 1.0}}});   // x >= -5
    b.ge0({-2.0, {{0, 1.0}}});  // x >= 2
    out.push_back({"lp_redundant", b.take(), 2.0});
  }
  {  // 22: badly scaled data (exercises equilibration)
    ProgBuilder b(1);
    b.obj(0, 1e6);
    b.ge0({-1e-6, {{0, 1.0}}});
    out.push_back({"lp_scaled", b.take(), 1.0});
  }
  {  // 23: entropy-style sum with two exp cones: min z1 + z2, e^1<=z1, e^-1<=z2
    ProgBuilder b(2);
    b.obj(0, 1.0);
    b.obj(1, 1.0);
    b.cone(conic::ConeKind::Exp, {{1.0, {}}, {1.0, {}}, {0.0, {{0, 1.0}}}});
    b.cone(conic::ConeKind::Exp, {{-1.0, {}}, {1.0, {}}, {0.0, {{1, 1.0}}}});
    out.push_back({"exp_pair", b.take(), e + 1.0 / e});
  }
  {  // 24: weighted geometric-mean flavor via rsoc chain: max t, t^2 <= 2*x*y,
     //    x <= 2, y <= 4.5  =>  t = sqrt(18) at the corner
    ProgBuilder b(3);  // t, x, y
    b.obj(0, -1.0);
    b.bound(1, 0.0, 2.0);
    b.bound(2, 0.0, 4.5);
    b.cone(conic::ConeKind::Rsoc,
           {{0.0, {{1, 1.0}}}, {0.0, {{2, 1.0}}}, {0.0, {{0, 1.0}}}});
    out.push_back({"rsoc_corner", b.take(), -std::sqrt(18.0)});
  }
  return out;
}

}  // namespace cfswipt::testing
