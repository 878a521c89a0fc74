#pragma once

#include <Eigen/Dense>

namespace pushsim {

/// Linear complementarity problem: find z >= 0 with w = M z + q >= 0 and
/// z^T w = 0.
struct LcpProblem {
  Eigen::MatrixXd M;
  Eigen::VectorXd q;
};

struct LcpSolution {
  bool feasible = false;   // false on secondary-ray termination
  Eigen::VectorXd z;
  Eigen::VectorXd w;
  int pivots = 0;
};

/// Lemke's complementary pivoting with a unit covering vector and
/// lexicographic tie-breaking.  Ray termination returns feasible = false;
/// exceeding the pivot cap (500 * dim) throws CycleDetected.
LcpSolution lemke_solve(const LcpProblem& problem);

}  // namespace pushsim
