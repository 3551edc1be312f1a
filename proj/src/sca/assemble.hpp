#pragma once

#include <utility>
#include <vector>

#include "cfswipt/conic.hpp"

namespace cfswipt::sca::detail {

// One affine expression c0 + sum coef*x used as a cone-row of the canonical
// program (s = expression, s in K).
struct LinRow {
  double c0 = 0.0;
  std::vector<std::pair<int, double>> terms;
  LinRow() = default;
  LinRow(double constant, std::vector<std::pair<int, double>> t)
      : c0(constant), terms(std::move(t)) {}
  void add(int var, double coef) {
    if (var >= 0 && coef != 0.0) terms.emplace_back(var, coef);
  }
  double max_abs() const {
    double m = std::abs(c0);
    for (const auto& [v, c] : terms) m = std::max(m, std::abs(c));
    return m;
  }
  // Rescales the row to unit magnitude so solver feasibility tolerances are
  // relative to the constraint's own scale.
  void normalize() {
    const double s = max_abs();
    if (s <= 0.0 || s == 1.0) return;
    c0 /= s;
    for (auto& [v, c] : terms) c /= s;
  }
};

class Assembler {
 public:
  explicit Assembler(int n_vars) {
    p_.n_vars = n_vars;
    p_.objective.assign(n_vars, 0.0);
    p_.eq_A.cols = n_vars;
    p_.cone_G.cols = n_vars;
  }

  void objective(int var, double coef) { p_.objective.at(var) = coef; }

  void ge0(LinRow r) { nonneg_.push_back(std::move(r)); }

  void cone(conic::ConeKind kind, std::vector<LinRow> rows) {
    cones_.emplace_back(kind, std::move(rows));
  }

  conic::ConicProgram finalize() {
    auto emit = [this](const LinRow& r) {
      const int row = p_.cone_G.rows++;
      p_.cone_h.push_back(r.c0);
      for (const auto& [v, c] : r.terms) p_.cone_G.add(row, v, -c);
    };
    if (!nonneg_.empty()) {
      p_.cone_list.push_back({conic::ConeKind::NonNeg, static_cast<int>(nonneg_.size())});
      for (const auto& r : nonneg_) emit(r);
    }
    for (const auto& [kind, rows] : cones_) {
      p_.cone_list.push_back({kind, static_cast<int>(rows.size())});
      for (const auto& r : rows) emit(r);
    }
    return std::move(p_);
  }

 private:
  conic::ConicProgram p_;
  std::vector<LinRow> nonneg_;
  std::vector<std::pair<conic::ConeKind, std::vector<LinRow>>> cones_;
};

}  // namespace cfswipt::sca::detail
