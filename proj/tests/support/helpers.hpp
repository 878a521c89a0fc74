#pragma once

// Shared randomized-test utilities: seeded draws of well-conditioned inputs,
// finite-difference derivative oracles, and a complementary-basis LCP
// enumeration oracle for cross-checking the pivoting solver.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "pushsim/limit_surface.hpp"
#include "pushsim/quartic_gram.hpp"

namespace testutil {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline Vector3d random_unit3(std::mt19937_64& g) {
  std::normal_distribution<double> n;
  Vector3d v;
  do {
    v = Vector3d(n(g), n(g), n(g));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline Vector2d random_unit2(std::mt19937_64& g) {
  const double phi = uniform(g, -M_PI, M_PI);
  return {std::cos(phi), std::sin(phi)};
}

/// Symmetric PD 3x3 with eigenvalues log-uniform in [1/sqrt(cond), sqrt(cond)].
inline Matrix3d random_pd3(std::mt19937_64& g, double cond = 100.0) {
  std::normal_distribution<double> n;
  Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = n(g);
  const Matrix3d q = Eigen::HouseholderQR<Matrix3d>(m).householderQ();
  const double half = 0.5 * std::log(cond);
  Vector3d ev;
  for (int i = 0; i < 3; ++i) ev[i] = std::exp(uniform(g, -half, half));
  return q * ev.asDiagonal() * q.transpose();
}

inline pushsim::Matrix9d random_psd9(std::mt19937_64& g) {
  std::normal_distribution<double> n;
  pushsim::Matrix9d m;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) m(i, j) = n(g);
  return m * m.transpose() / 9.0;
}

/// Random integrable PSD Gram matrix: a raw PSD draw is symmetrized onto the
/// consistent subspace, then ridged with the sphere certificate to restore
/// positive semidefiniteness lost in the projection.
inline pushsim::Matrix9d random_sos_gram(std::mt19937_64& g) {
  const pushsim::Matrix9d w = random_psd9(g);
  const pushsim::Matrix9d s = pushsim::symmetrize_gram(w);
  const double beta = (s - w).norm() / 8.0 * (1.0 + 1e-9) + 1e-12;
  return s + beta * pushsim::sphere_gram();
}

/// Central-difference gradient of a scalar field at F.
inline Vector3d fd_gradient(const std::function<double(const Vector3d&)>& f,
                            const Vector3d& F, double h) {
  Vector3d g;
  for (int i = 0; i < 3; ++i) {
    Vector3d e = Vector3d::Zero();
    e[i] = h;
    g[i] = (f(F + e) - f(F - e)) / (2.0 * h);
  }
  return g;
}

/// Central-difference Jacobian of a vector field at F (columns = directions).
inline Matrix3d fd_jacobian(const std::function<Vector3d(const Vector3d&)>& f,
                            const Vector3d& F, double h) {
  Matrix3d j;
  for (int i = 0; i < 3; ++i) {
    Vector3d e = Vector3d::Zero();
    e[i] = h;
    j.col(i) = (f(F + e) - f(F - e)) / (2.0 * h);
  }
  return j;
}

/// One complementary solution found by exhaustive basis enumeration.
struct EnumSolution {
  VectorXd z;
  VectorXd w;
  std::uint32_t basis = 0;  // bit i set when z_i is basic (w_i pinned to 0)
};

/// Solves the LCP by trying all 2^n complementary index sets: for each set S,
/// z_S solves M_SS z_S = -q_S with z elsewhere zero; keeps every candidate
/// with z >= -tol and w = Mz + q >= -tol.  Ground truth for n <= ~14.
inline std::vector<EnumSolution> lcp_enumerate(const MatrixXd& M, const VectorXd& q,
                                               double tol = 1e-9) {
  const int n = static_cast<int>(q.size());
  std::vector<EnumSolution> found;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (s & (1u << i)) idx.push_back(i);
    const int k = static_cast<int>(idx.size());
    VectorXd z = VectorXd::Zero(n);
    if (k > 0) {
      MatrixXd sub(k, k);
      VectorXd rhs(k);
      for (int r = 0; r < k; ++r) {
        rhs[r] = -q[idx[r]];
        for (int c = 0; c < k; ++c) sub(r, c) = M(idx[r], idx[c]);
      }
      Eigen::FullPivLU<MatrixXd> lu(sub);
      if (!lu.isInvertible()) continue;
      const VectorXd zs = lu.solve(rhs);
      if ((sub * zs - rhs).lpNorm<Eigen::Infinity>() > tol * (1.0 + rhs.norm()))
        continue;
      for (int r = 0; r < k; ++r) z[idx[r]] = zs[r];
    }
    const VectorXd w = M * z + q;
    if (z.minCoeff() < -tol || w.minCoeff() < -tol) continue;
    found.push_back({z, w, s});
  }
  return found;
}

inline double angle_between(const Vector3d& a, const Vector3d& b) {
  const double c = a.normalized().dot(b.normalized());
  return std::acos(std::min(1.0, std::max(-1.0, c)));
}

}  // namespace testutil
