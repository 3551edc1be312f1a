#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "cfswipt/conic.hpp"
#include "conic/cones.hpp"

namespace cfswipt::conic::detail {

// Stacked internal form: A x + s = b with s in (Zero^eq x user cones x bound
// rows). Rotated cones replace Rsoc in place; finite variable bounds append
// NonNeg rows at the tail.
struct Canonical {
  int n = 0;
  Eigen::SparseMatrix<double> a;
  VectorXd b;
  std::vector<Block> blocks;

  int eq_rows = 0;
  int user_cone_rows = 0;
  int bound_rows = 0;

  // Stacked row of each finite bound side; -1 when infinite.
  std::vector<std::pair<int, int>> bound_rows_of;
  // Stacked offsets (u-row) of each Rsoc cone that was rotated into Soc.
  std::vector<int> rotated_offsets;
};

Canonical canonicalize(const ConicProgram& prog);

// In-place rotation between (u, v) and ((u+v)/sqrt2, (u-v)/sqrt2); the map is
// involutive and orthogonal, so it also converts duals back.
void rotate_pair(double& u, double& v);

}  // namespace cfswipt::conic::detail
