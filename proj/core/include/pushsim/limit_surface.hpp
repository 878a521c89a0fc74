#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pushsim/se2.hpp"

namespace pushsim {

using Matrix9d = Eigen::Matrix<double, 9, 9>;
using QuarticCoeffs = Eigen::Matrix<double, 15, 1>;

/// Wrench scale used to nondimensionalize (fx, fy, tau): forces divide by
/// f_max, torque by tau_max = rho * f_max.  Twists map the other way,
/// (vx, vy, omega) -> (vx, vy, rho * omega), so power pairings are preserved.
struct Normalization {
  double f_max = 1.0;
  double tau_max = 1.0;

  double rho() const { return tau_max / f_max; }
};

/// H(F) = F^T A F with A symmetric positive definite.
struct QuadraticLS {
  Matrix3d A = Matrix3d::Identity();
  Normalization norm;
};

/// Degree-4 exponents (i1, i2, i3) of Fx^i1 Fy^i2 tau^i3, i1+i2+i3 = 4.
struct QuarticMonomial {
  int i1, i2, i3;
};

/// The 15 quartic monomials, ordered lexicographically by (i1, i2) ascending.
const std::array<QuarticMonomial, 15>& quartic_monomials();

/// H(F) = sum_m a_m Fx^i1 Fy^i2 tau^i3 with a PSD Gram certificate Q of the
/// Hessian form: z^T H''(F) z = y^T Q y for y = z (x) F.
struct QuarticLS {
  QuarticCoeffs a = QuarticCoeffs::Zero();
  Matrix9d Q = Matrix9d::Zero();
  Normalization norm;
};

class LimitSurface {
 public:
  LimitSurface() : model_(QuadraticLS{}) {}
  LimitSurface(QuadraticLS q) : model_(std::move(q)) {}
  LimitSurface(QuarticLS q) : model_(std::move(q)) {}

  int degree() const { return std::holds_alternative<QuadraticLS>(model_) ? 2 : 4; }
  const QuadraticLS& quadratic() const { return std::get<QuadraticLS>(model_); }
  const QuarticLS& quartic() const { return std::get<QuarticLS>(model_); }
  const Normalization& normalization() const;

 private:
  std::variant<QuadraticLS, QuarticLS> model_;
};

double ls_eval(const LimitSurface& ls, const Vector3d& F);
Vector3d ls_gradient(const LimitSurface& ls, const Vector3d& F);
Matrix3d ls_hessian(const LimitSurface& ls, const Vector3d& F);

double quartic_eval(const QuarticCoeffs& a, const Vector3d& F);
Vector3d quartic_gradient(const QuarticCoeffs& a, const Vector3d& F);
Matrix3d quartic_hessian(const QuarticCoeffs& a, const Vector3d& F);

/// Rescales F onto the unit level set H = 1 (exact by homogeneity).
Vector3d project_to_unit_level(const LimitSurface& ls, const Vector3d& F);

/// Unit twist direction of the normal at F: grad H(F) / |grad H(F)|, in
/// normalized twist coordinates (vx, vy, rho*omega).  Throws ZeroWrench.
Vector3d twist_of_wrench(const LimitSurface& ls, const Vector3d& F);

/// Inverse normal map: the wrench on H = 1 whose gradient direction matches
/// the given twist direction.  Analytic for degree 2; Gauss-Newton on the
/// unit sphere for degree 4.  Throws ZeroTwist / NoConvergence.
Vector3d wrench_of_twist(const LimitSurface& ls, const Vector3d& V);

/// One wrench-twist sample in normalized coordinates.
struct WrenchTwistPair {
  Vector3d F;
  Vector3d V;
};

/// Least-squares fit of a symmetric PD A to twist directions: initialises
/// from the linearised cross-product system grad H(F) x V = 0, refines with
/// damped Gauss-Newton on the normalized-direction residual, then scales A
/// so the mean of F^T A F over the data is 1.  Throws DegenerateData.
QuadraticLS fit_quadratic(const std::vector<WrenchTwistPair>& pairs,
                          const Normalization& norm = {});

/// JSON round-trip of a limit surface ({degree, A or a(+monomials),
/// normalization}).  Throws IoError on malformed input; loading verifies
/// convexity (PD A, or PSD reconstructed Gram).
void save_limit_surface(const LimitSurface& ls, const std::string& path);
LimitSurface load_limit_surface(const std::string& path);
LimitSurface limit_surface_from_json_text(const std::string& text);
std::string limit_surface_to_json_text(const LimitSurface& ls);

}  // namespace pushsim
