#pragma once

#include <vector>

#include "pushsim/limit_surface.hpp"

namespace pushsim {

/// One linear identity Tr(C Q) = b^T a tying a Gram matrix to quartic
/// coefficients.  There is one constraint per monomial z_j z_k F_a F_b
/// (j <= k, a <= b) of the expansion z^T H''(F) z = y^T Q y, K = 36 total.
struct GramConstraint {
  Matrix9d C;
  QuarticCoeffs b;
};

/// The constraint system, generated once by expanding both sides over the
/// monomial basis in (F, z).
const std::vector<GramConstraint>& gram_constraints();

/// Maps a Gram matrix to quartic coefficients through the double Euler
/// identity F^T H''(F) F = 12 H(F): substituting z = F in y^T Q y and
/// reading off monomial coefficients.  Exact when Q satisfies the
/// constraint system; otherwise the unique coefficients matching the
/// z = F restriction.
QuarticCoeffs coeffs_of_gram(const Matrix9d& Q);

/// The fully symmetric Gram representative of a quartic: entries are the
/// scaled fourth partials of H, Q[(j,a),(k,b)] = d4 H / dFj dFk dFa dFb / 2.
Matrix9d canonical_gram(const QuarticCoeffs& a);

/// Projects the coefficient 4-tensor of Q onto full index symmetry; the
/// result always satisfies the constraint system against coeffs_of_gram of
/// itself, and vanishes on the antisymmetric subspace of y.
Matrix9d symmetrize_gram(const Matrix9d& Q);

/// max_k |Tr(C_k Q) - b_k^T a| over the constraint system.
double gram_consistency_residual(const QuarticCoeffs& a, const Matrix9d& Q);

/// Builds a quartic from a PSD Gram matrix.  The stored Gram is the
/// canonical representative of the mapped coefficients, so (a, Q) always
/// satisfy the constraint system jointly.  Throws NotPsd.
QuarticLS quartic_from_gram(const Matrix9d& Q, const Normalization& norm = {});

/// Lifts a quadratic to the quartic H = (F^T A F)^2 with the explicit Gram
/// certificate 8 vec(A) vec(A)^T + 4 A (x) A.
QuarticLS lift_quadratic(const QuadraticLS& q);

/// Gram certificate of (F^T F)^2; strictly positive on the symmetric
/// subspace of y, used as the convexity floor when repairing sampled Grams.
const Matrix9d& sphere_gram();

}  // namespace pushsim
