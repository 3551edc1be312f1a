#include <cmath>

#include "cfswipt/conic.hpp"
#include "cfswipt/rng.hpp"
#include "conic/cones.hpp"
#include "doctest.h"
#include "known_programs.hpp"

using namespace cfswipt;
using namespace cfswipt::conic;
using cfswipt::testing::KnownProgram;
using cfswipt::testing::LinExpr;
using cfswipt::testing::ProgBuilder;

TEST_CASE("exponential barrier derivatives match finite differences") {
  Rng rng(1);
  for (int it = 0; it < 50; ++it) {
    Eigen::Vector3d s;
    // Random interior point: pick y, ratio z/y, then x below y*log(z/y).
    s(1) = std::exp(rng.uniform(-2, 2));
    s(2) = s(1) * std::exp(rng.uniform(-1.5, 1.5));
    const double margin = rng.uniform(0.1, 3.0);
    s(0) = s(1) * std::log(s(2) / s(1)) - margin;
    REQUIRE(detail::exp_primal_interior(s));

    const Eigen::Vector3d g = detail::exp_barrier_grad(s);
    const Eigen::Matrix3d h = detail::exp_barrier_hess(s);
    const double eps = 1e-6;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d sp = s, sm = s;
      sp(i) += eps;
      sm(i) -= eps;
      // f = -log(y log(z/y) - x) - log y - log z
      auto f = [](const Eigen::Vector3d& v) {
        return -std::log(v(1) * std::log(v(2) / v(1)) - v(0)) - std::log(v(1)) -
               std::log(v(2));
      };
      CHECK(g(i) == doctest::Approx((f(sp) - f(sm)) / (2 * eps)).epsilon(2e-4));
      const Eigen::Vector3d gp = detail::exp_barrier_grad(sp);
      const Eigen::Vector3d gm = detail::exp_barrier_grad(sm);
      for (int j = 0; j < 3; ++j)
        CHECK(h(i, j) == doctest::Approx((gp(j) - gm(j)) / (2 * eps)).epsilon(2e-4));
    }
    // Logarithmic homogeneity: H s = -g, s'g = -3.
    CHECK((h * s + g).norm() == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(s.dot(g) == doctest::Approx(-3.0).epsilon(1e-9));
  }
}

TEST_CASE("exponential conjugate-point map inverts the gradient") {
  Rng rng(2);
  for (int it = 0; it < 60; ++it) {
    Eigen::Vector3d s;
    s(1) = std::exp(rng.uniform(-3, 3));
    s(2) = s(1) * std::exp(rng.uniform(-2, 2));
    s(0) = s(1) * std::log(s(2) / s(1)) - rng.uniform(0.05, 5.0);
    const Eigen::Vector3d z = -detail::exp_barrier_grad(s);
    REQUIRE(detail::exp_dual_interior(z));
    const Eigen::Vector3d s_back = detail::exp_grad_conjugate_point(z);
    CHECK((s_back - s).norm() / s.norm() == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("known optimum suite solves to tolerance with independent KKT check") {
  for (const KnownProgram& kp : cfswipt::testing::known_program_suite()) {
    CAPTURE(kp.name);
    ConicSolution sol = solve(kp.prog, 1e-8, 200);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value ==
          doctest::Approx(kp.optimal_objective).epsilon(1e-6).scale(1.0));
    KktResiduals r = check_kkt(kp.prog, sol);
    CHECK(r.max() <= 1e-6);
    CHECK(std::max({sol.primal_residual, sol.dual_residual, sol.duality_gap}) <= 1e-8);
  }
}

TEST_CASE("infeasibility certificates") {
  SUBCASE("conflicting inequalities") {
    ProgBuilder b(1);
    b.obj(0, 1.0);
    b.ge0({-1.0, {{0, 1.0}}});   // x >= 1
    b.ge0({0.0, {{0, -1.0}}});   // -x >= 0
    ConicSolution sol = solve(b.take(), 1e-8, 200);
    CHECK(sol.status == SolveStatus::PrimalInfeasible);
  }
  SUBCASE("conflicting equalities") {
    ProgBuilder b(1);
    b.obj(0, 1.0);
    b.eq({-1.0, {{0, 1.0}}});
    b.eq({-2.0, {{0, 1.0}}});
    ConicSolution sol = solve(b.take(), 1e-8, 200);
    CHECK(sol.status == SolveStatus::PrimalInfeasible);
  }
  SUBCASE("unbounded objective") {
    ProgBuilder b(1);
    b.obj(0, -1.0);
    b.ge0({0.0, {{0, 1.0}}});
    ConicSolution sol = solve(b.take(), 1e-8, 200);
    CHECK(sol.status == SolveStatus::DualInfeasible);
  }
  SUBCASE("soc infeasibility") {
    // ||x|| <= t with t <= -1.
    ProgBuilder b(2);  // t, x
    b.obj(0, 1.0);
    b.cone(ConeKind::Soc, {{0.0, {{0, 1.0}}}, {0.0, {{1, 1.0}}}});
    b.ge0({-1.0, {{0, -1.0}}});  // -t - 1 >= 0
    ConicSolution sol = solve(b.take(), 1e-8, 200);
    CHECK(sol.status == SolveStatus::PrimalInfeasible);
  }
}

TEST_CASE("random LPs against a vertex-enumeration oracle") {
  Rng rng(77);
  for (int inst = 0; inst < 6; ++inst) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 4);  // 2..5
    const int m = 2 * n;
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd bvec(m), c(n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1, 1);
    for (int i = 0; i < m; ++i) bvec(i) = rng.uniform(0.5, 2.0);  // 0 strictly feasible
    for (int j = 0; j < n; ++j) c(j) = rng.uniform(-1, 1);
    const double box = 10.0;

    // Stack box rows so every vertex is finite.
    Eigen::MatrixXd a_full(m + 2 * n, n);
    Eigen::VectorXd b_full(m + 2 * n);
    a_full.topRows(m) = a;
    b_full.head(m) = bvec;
    for (int j = 0; j < n; ++j) {
      a_full.row(m + 2 * j).setZero();
      a_full(m + 2 * j, j) = 1.0;
      b_full(m + 2 * j) = box;
      a_full.row(m + 2 * j + 1).setZero();
      a_full(m + 2 * j + 1, j) = -1.0;
      b_full(m + 2 * j + 1) = box;
    }

    // Oracle: enumerate all n-subsets of rows, solve, keep feasible vertices.
    double best = std::numeric_limits<double>::infinity();
    const int rows = m + 2 * n;
    std::vector<int> idx(n);
    std::function<void(int, int)> rec = [&](int start, int depth) {
      if (depth == n) {
        Eigen::MatrixXd asub(n, n);
        Eigen::VectorXd bsub(n);
        for (int i = 0; i < n; ++i) {
          asub.row(i) = a_full.row(idx[i]);
          bsub(i) = b_full(idx[i]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(asub);
        if (!lu.isInvertible()) return;
        Eigen::VectorXd x = lu.solve(bsub);
        if (((a_full * x - b_full).array() <= 1e-9).all())
          best = std::min(best, c.dot(x));
        return;
      }
      for (int i = start; i < rows; ++i) {
        idx[depth] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
    REQUIRE(std::isfinite(best));

    ProgBuilder pb(n);
    for (int j = 0; j < n; ++j) pb.obj(j, c(j));
    for (int i = 0; i < m + 2 * n; ++i) {
      LinExpr row;
      row.c0 = b_full(i);
      for (int j = 0; j < n; ++j)
        if (a_full(i, j) != 0.0) row.terms.push_back({j, -a_full(i, j)});
      pb.ge0(row);  // b - a'x >= 0
    }
    ConicSolution sol = solve(pb.take(), 1e-9, 200);
    CAPTURE(inst);
    CHECK(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective_value == doctest::Approx(best).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("determinism and objective-scaling invariance") {
  auto suite = cfswipt::testing::known_program_suite();
  const ConicProgram& prog = suite[19].prog;  // soc + exp mix
  ConicSolution s1 = solve(prog, 1e-9, 200);
  ConicSolution s2 = solve(prog, 1e-9, 200);
  REQUIRE(s1.status == SolveStatus::Optimal);
  CHECK(s1.x == s2.x);  // bitwise identical iterate sequence
  CHECK(s1.iterations == s2.iterations);

  ConicProgram scaled = prog;
  for (double& v : scaled.objective) v *= 7.5;
  ConicSolution s3 = solve(scaled, 1e-9, 200);
  REQUIRE(s3.status == SolveStatus::Optimal);
  CHECK((s1.x - s3.x).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("kkt negative control") {
  auto suite = cfswipt::testing::known_program_suite();
  ConicSolution sol = solve(suite[0].prog, 1e-8, 200);
  REQUIRE(sol.status == SolveStatus::Optimal);
  ConicSolution tampered = sol;
  tampered.x(0) += 1e-2;
  KktResiduals r = check_kkt(suite[0].prog, tampered);
  CHECK(r.max() > 1e-6);
}

TEST_CASE("weak duality at the returned solution") {
  for (const KnownProgram& kp : cfswipt::testing::known_program_suite()) {
    ConicSolution sol = solve(kp.prog, 1e-8, 200);
    REQUIRE(sol.status == SolveStatus::Optimal);
    // Dual objective: -(b'y + h'z + bound terms); reconstruct the gap from
    // returned multipliers and require it to be nonnegative up to tolerance.
    double dual_obj = 0.0;
    for (size_t i = 0; i < kp.prog.eq_b.size(); ++i) dual_obj -= kp.prog.eq_b[i] * sol.y_eq(i);
    for (size_t i = 0; i < kp.prog.cone_h.size(); ++i) dual_obj -= kp.prog.cone_h[i] * sol.z_cone(i);
    for (size_t i = 0; i < kp.prog.var_bounds.size(); ++i) {
      const auto& vb = kp.prog.var_bounds[i];
      if (vb.lower > -std::numeric_limits<double>::infinity())
        dual_obj += vb.lower * sol.z_bounds(2 * i);
      if (vb.upper < std::numeric_limits<double>::infinity())
        dual_obj -= vb.upper * sol.z_bounds(2 * i + 1);
    }
    CHECK(sol.objective_value >= dual_obj - 1e-6 * std::max(1.0, std::abs(dual_obj)));
  }
}

TEST_CASE("program dump is stable and complete") {
  auto suite = cfswipt::testing::known_program_suite();
  const std::string d1 = dump_program(suite[10].prog);
  const std::string d2 = dump_program(suite[10].prog);
  CHECK(d1 == d2);
  CHECK(d1.find("cfswipt-conic v1") == 0);
  CHECK(d1.find("rsoc") != std::string::npos);
}

TEST_CASE("malformed programs are rejected") {
  ProgBuilder b(2);
  b.obj(0, 1.0);
  ConicProgram p = b.take();
  p.cone_list.push_back({ConeKind::Exp, 4});  // exp must be 3-dimensional
  CHECK_THROWS_AS(p.check_well_formed(), std::invalid_argument);
  ConicProgram q;
  q.n_vars = 0;
  CHECK_THROWS_AS(q.check_well_formed(), std::invalid_argument);
}
