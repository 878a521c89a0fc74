#include "pushsim/lemke.hpp"

#include <cmath>

#include "pushsim/errors.hpp"

namespace pushsim {

namespace {

// Lexicographic compare of rows (rhs | B^-1) / pivot entry.
bool lex_less(const Eigen::MatrixXd& t, int n, int ra, int rb, double pa, double pb) {
  const double va = t(ra, 2 * n + 1) / pa;
  const double vb = t(rb, 2 * n + 1) / pb;
  if (std::fabs(va - vb) > 1e-12 * (1.0 + std::fabs(va) + std::fabs(vb))) return va < vb;
  for (int c = 0; c < n; ++c) {
    const double ba = t(ra, c) / pa;
    const double bb = t(rb, c) / pb;
    if (std::fabs(ba - bb) > 1e-12 * (1.0 + std::fabs(ba) + std::fabs(bb))) return ba < bb;
  }
  return false;
}

}  // namespace

LcpSolution lemke_solve(const LcpProblem& problem) {
  const int n = static_cast<int>(problem.q.size());
  LcpSolution sol;
  sol.z = Eigen::VectorXd::Zero(n);
  sol.w = problem.q;
  if (n == 0 || problem.q.minCoeff() >= 0.0) {
    sol.feasible = true;
    return sol;
  }

  // Columns: [w_0..w_{n-1} | z_0..z_{n-1} | z0 | rhs] for the system
  // I w - M z - 1 z0 = q.  Variable ids: w_i = i, z_i = n + i, z0 = 2n.
  Eigen::MatrixXd t(n, 2 * n + 2);
  t.leftCols(n) = Eigen::MatrixXd::Identity(n, n);
  t.middleCols(n, n) = -problem.M;
  t.col(2 * n) = -Eigen::VectorXd::Ones(n);
  t.col(2 * n + 1) = problem.q;

  std::vector<int> basis(n);
  for (int i = 0; i < n; ++i) basis[i] = i;

  auto pivot = [&](int row, int col) {
    t.row(row) /= t(row, col);
    for (int r = 0; r < n; ++r) {
      if (r == row) continue;
      const double f = t(r, col);
      if (f != 0.0) t.row(r) -= f * t.row(row);
    }
  };

  // Initial pivot: z0 enters, the most negative (lexicographically smallest)
  // basic row leaves.
  int row = 0;
  for (int r = 1; r < n; ++r)
    if (lex_less(t, n, r, row, 1.0, 1.0)) row = r;
  int leaving = basis[row];
  pivot(row, 2 * n);
  basis[row] = 2 * n;

  const int cap = 500 * n;
  for (sol.pivots = 1; sol.pivots <= cap; ++sol.pivots) {
    // Entering variable: complement of the one that just left.
    const int entering = leaving < n ? leaving + n : leaving - n;
    const auto col = t.col(entering);

    const double eps = 1e-11 * std::max(1.0, col.cwiseAbs().maxCoeff());
    row = -1;
    for (int r = 0; r < n; ++r) {
      if (col(r) <= eps) continue;
      if (row < 0 || lex_less(t, n, r, row, col(r), col(row))) row = r;
    }
    if (row < 0) {
      // Secondary ray: no complementary solution along this path.
      sol.feasible = false;
      return sol;
    }

    leaving = basis[row];
    pivot(row, entering);
    basis[row] = entering;

    if (leaving == 2 * n) {
      sol.feasible = true;
      // The tableau values carry accumulated pivot roundoff; re-solve the
      // final complementary basis from the original data and pin the
      // complementary w entries to exact zero.
      std::vector<int> zb;
      for (int r = 0; r < n; ++r)
        if (basis[r] >= n && basis[r] < 2 * n) zb.push_back(basis[r] - n);
      const int k = static_cast<int>(zb.size());
      bool polished = false;
      if (k > 0) {
        Eigen::MatrixXd sub(k, k);
        Eigen::VectorXd rhs(k);
        for (int a = 0; a < k; ++a) {
          rhs[a] = -problem.q[zb[a]];
          for (int b = 0; b < k; ++b) sub(a, b) = problem.M(zb[a], zb[b]);
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (lu.isInvertible()) {
          const Eigen::VectorXd zs = lu.solve(rhs);
          if (zs.minCoeff() >= -1e-9 * (1.0 + zs.cwiseAbs().maxCoeff())) {
            for (int a = 0; a < k; ++a) sol.z[zb[a]] = std::max(zs[a], 0.0);
            sol.w = problem.M * sol.z + problem.q;
            for (int a = 0; a < k; ++a) sol.w[zb[a]] = 0.0;
            polished = true;
          }
        }
      }
      if (!polished) {
        for (int r = 0; r < n; ++r)
          if (basis[r] >= n && basis[r] < 2 * n) sol.z[basis[r] - n] = t(r, 2 * n + 1);
        sol.w = problem.M * sol.z + problem.q;
      }
      return sol;
    }
  }
  throw CycleDetected("lemke pivot cap exceeded");
}

}  // namespace pushsim
