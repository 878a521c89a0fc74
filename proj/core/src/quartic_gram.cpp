#include "pushsim/quartic_gram.hpp"

#include <array>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "pushsim/errors.hpp"

namespace pushsim {

namespace {

// y index (3*j + a) <-> (z index j, wrench index a), both 0-based.
inline int zi(int y) { return y / 3; }
inline int fi(int y) { return y % 3; }

int monomial_index(int e0, int e1, int e2) {
  static const auto table = [] {
    std::array<int, 25> t{};
    t.fill(-1);
    const auto& mons = quartic_monomials();
    for (int m = 0; m < 15; ++m) t[mons[m].i1 * 5 + mons[m].i2] = m;
    return t;
  }();
  (void)e2;
  return table[e0 * 5 + e1];
}

inline int exponent_index(int a, int b, int c, int d) {
  int e[3] = {0, 0, 0};
  ++e[a]; ++e[b]; ++e[c]; ++e[d];
  return monomial_index(e[0], e[1], e[2]);
}

double factorial_product(int a, int b, int c, int d) {
  static const double fact[5] = {1, 1, 2, 6, 24};
  int e[3] = {0, 0, 0};
  ++e[a]; ++e[b]; ++e[c]; ++e[d];
  return fact[e[0]] * fact[e[1]] * fact[e[2]];
}

}  // namespace

const std::vector<GramConstraint>& gram_constraints() {
  static const std::vector<GramConstraint> constraints = [] {
    std::vector<GramConstraint> out;
    for (int j = 0; j < 3; ++j)
      for (int k = j; k < 3; ++k)
        for (int a = 0; a < 3; ++a)
          for (int b = a; b < 3; ++b) {
            GramConstraint gc;
            gc.C = Matrix9d::Zero();
            gc.b = QuarticCoeffs::Zero();
            // LHS: every ordered Gram entry whose z/wrench index multisets
            // match the monomial z_j z_k F_a F_b.
            for (int y1 = 0; y1 < 9; ++y1)
              for (int y2 = 0; y2 < 9; ++y2) {
                const int zj = std::min(zi(y1), zi(y2)), zk = std::max(zi(y1), zi(y2));
                const int fa = std::min(fi(y1), fi(y2)), fb = std::max(fi(y1), fi(y2));
                if (zj == j && zk == k && fa == a && fb == b) gc.C(y1, y2) += 1.0;
              }
            // RHS: the same monomial's coefficient in z^T H''(F) z, which is
            // mult * d4H/dFj dFk dFa dFb / 2.
            const double mult = (j == k ? 1.0 : 2.0) * (a == b ? 1.0 : 2.0);
            gc.b[exponent_index(j, k, a, b)] += mult * 0.5 * factorial_product(j, k, a, b);
            out.push_back(gc);
          }
    return out;
  }();
  return constraints;
}

QuarticCoeffs coeffs_of_gram(const Matrix9d& Q) {
  // F^T H''(F) F = 12 H by the Euler identities, and substituting z = F in
  // y = z (x) F gives y_i -> F_{zi} F_{fi}; reading off monomials of
  // y(F,F)^T Q y(F,F) / 12 recovers a exactly on consistent Grams.
  QuarticCoeffs a = QuarticCoeffs::Zero();
  for (int y1 = 0; y1 < 9; ++y1)
    for (int y2 = 0; y2 < 9; ++y2)
      a[exponent_index(zi(y1), fi(y1), zi(y2), fi(y2))] += Q(y1, y2) / 12.0;
  return a;
}

Matrix9d canonical_gram(const QuarticCoeffs& a) {
  Matrix9d q = Matrix9d::Zero();
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int al = 0; al < 3; ++al)
        for (int be = 0; be < 3; ++be) {
          const int m = exponent_index(j, k, al, be);
          q(3 * j + al, 3 * k + be) = 0.5 * a[m] * factorial_product(j, k, al, be);
        }
  return q;
}

Matrix9d symmetrize_gram(const Matrix9d& Q) {
  // Average the coefficient 4-tensor G[j,k,a,b] = Q[(j,a),(k,b)] over all 24
  // slot permutations.
  static const std::array<std::array<int, 4>, 24> perms = [] {
    std::array<std::array<int, 4>, 24> p{};
    int idx = 0;
    std::array<int, 4> v = {0, 1, 2, 3};
    // Heap-free enumeration: all permutations of 4 indices.
    for (int i0 = 0; i0 < 4; ++i0)
      for (int i1 = 0; i1 < 4; ++i1)
        for (int i2 = 0; i2 < 4; ++i2)
          for (int i3 = 0; i3 < 4; ++i3) {
            if (i0 == i1 || i0 == i2 || i0 == i3 || i1 == i2 || i1 == i3 || i2 == i3)
              continue;
            p[idx++] = {v[i0], v[i1], v[i2], v[i3]};
          }
    return p;
  }();

  double g[3][3][3][3];
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) g[j][k][a][b] = Q(3 * j + a, 3 * k + b);

  Matrix9d out = Matrix9d::Zero();
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int idx[4] = {j, k, a, b};
          double s = 0.0;
          for (const auto& p : perms)
            s += g[idx[p[0]]][idx[p[1]]][idx[p[2]]][idx[p[3]]];
          out(3 * j + a, 3 * k + b) = s / 24.0;
        }
  return out;
}

double gram_consistency_residual(const QuarticCoeffs& a, const Matrix9d& Q) {
  double worst = 0.0;
  for (const auto& gc : gram_constraints()) {
    const double lhs = gc.C.cwiseProduct(Q).sum();
    const double rhs = gc.b.dot(a);
    worst = std::max(worst, std::fabs(lhs - rhs));
  }
  return worst;
}

QuarticLS quartic_from_gram(const Matrix9d& Q, const Normalization& norm) {
  const Matrix9d qs = 0.5 * (Q + Q.transpose());
  const double scale = std::max(1.0, qs.norm());
  if ((Q - Q.transpose()).norm() > 1e-9 * scale)
    throw NotPsd("Gram matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix9d> es(qs);
  if (es.eigenvalues().minCoeff() < -1e-9 * scale)
    throw NotPsd("Gram matrix is not positive semidefinite");

  QuarticLS out;
  out.a = coeffs_of_gram(qs);
  out.norm = norm;
  if (gram_consistency_residual(out.a, qs) <= 1e-9 * scale) {
    out.Q = qs;
    return out;
  }
  // Inconsistent input: certify the mapped coefficients instead.  The full
  // symmetrization has the same z = F restriction, hence the same a.
  const Matrix9d proj = symmetrize_gram(qs);
  Eigen::SelfAdjointEigenSolver<Matrix9d> esp(proj);
  if (esp.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, proj.norm()))
    throw NotPsd("Gram matrix maps to a quartic with no PSD certificate");
  out.Q = proj;
  return out;
}

QuarticLS lift_quadratic(const QuadraticLS& q) {
  // H = (F^T A F)^2 has z^T H'' z = 8 (z^T A F)^2 + 4 (z^T A z)(F^T A F).
  const Matrix3d& a = q.A;
  Matrix9d gram = Matrix9d::Zero();
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      for (int al = 0; al < 3; ++al)
        for (int be = 0; be < 3; ++be)
          gram(3 * j + al, 3 * k + be) = 8.0 * a(j, al) * a(k, be) + 4.0 * a(j, k) * a(al, be);

  QuarticLS out;
  // Canonical representative: for PD A the fully symmetric Gram stays PSD
  // (its symmetric-subspace form is 8 tr(AY)^2-type terms), and samplers
  // centered on it see no spurious asymmetry.
  out.Q = symmetrize_gram(gram);
  out.norm = q.norm;
  out.a = coeffs_of_gram(gram);
  return out;
}

const Matrix9d& sphere_gram() {
  static const Matrix9d q = [] {
    QuadraticLS unit;
    unit.A = Matrix3d::Identity();
    return canonical_gram(lift_quadratic(unit).a);
  }();
  return q;
}

}  // namespace pushsim
