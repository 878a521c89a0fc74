#include "pushsim/single_contact.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "pushsim/errors.hpp"

namespace pushsim {

namespace {

constexpr double kVelEps = 1e-12;

struct NormalizedContact {
  Eigen::Matrix<double, 2, 3> J;  // jacobian at p / rho
  Vector3d t;                     // wrench-space null direction of J
  double rho;
};

NormalizedContact normalize_contact(const LimitSurface& ls, const ContactPoint& c) {
  NormalizedContact nc;
  nc.rho = ls.normalization().rho();
  const Vector2d ph = c.p / nc.rho;
  nc.J = contact_jacobian(ph);
  nc.t = Vector3d(-ph.y(), ph.x(), -1.0);
  return nc;
}

Twist to_physical(const Vector3d& vhat, double rho) {
  return {vhat[0], vhat[1], vhat[2] / rho};
}

/// One sticking step at linearization A: rows of D are the two contact
/// velocity constraints and the torque-consistency row (A^-1 t)^T, so
/// V = D^-1 [v_p; 0] and F = A^-1 V.
Vector3d sticking_twist(const Matrix3d& a, const NormalizedContact& nc,
                        const Vector2d& v_p) {
  Matrix3d d;
  d.topRows<2>() = nc.J;
  d.row(2) = a.ldlt().solve(nc.t).transpose();
  if (!d.allFinite()) throw SingularD("sticking system is singular");
  Eigen::PartialPivLU<Matrix3d> lu(d);
  const double det = lu.determinant();
  if (std::fabs(det) < 1e-14 * std::max(1.0, d.norm()))
    throw SingularD("sticking system is singular");
  return lu.solve(Vector3d(v_p.x(), v_p.y(), 0.0));
}

SingleContactOutcome solve_sticking_quadratic(const LimitSurface& ls,
                                              const ContactPoint& c,
                                              const NormalizedContact& nc) {
  const Matrix3d& a = ls.quadratic().A;
  const Vector3d vhat = sticking_twist(a, nc, c.v_p);
  SingleContactOutcome out;
  out.mode = ContactMode::Sticking;
  out.V = to_physical(vhat, nc.rho);
  out.F = project_to_unit_level(ls, a.ldlt().solve(vhat));
  return out;
}

SingleContactOutcome solve_sticking_quartic(const LimitSurface& ls,
                                            const ContactPoint& c,
                                            const NormalizedContact& nc) {
  const QuarticCoeffs& qa = ls.quartic().a;

  auto consistency = [&](const Vector3d& f, const Vector3d& vhat) {
    const Vector3d g = quartic_gradient(qa, f);
    if (g.norm() < 1e-300 || vhat.norm() < 1e-300) return 1.0;
    return (g.normalized() - vhat.normalized()).norm();
  };

  Vector3d f = project_to_unit_level(ls, nc.J.transpose() * c.n);
  double err_prev = std::numeric_limits<double>::infinity();
  Vector3d vhat = Vector3d::Zero();
  for (int iter = 0; iter < 200; ++iter) {
    const Matrix3d a = quartic_hessian(qa, f);
    vhat = sticking_twist(a, nc, c.v_p);
    Vector3d f_raw = a.ldlt().solve(vhat);
    if (!(quartic_eval(qa, f_raw) > 0.0))
      throw NoConvergence("quartic sticking iterate left the positive cone");
    const Vector3d f_full = project_to_unit_level(ls, f_raw);
    Vector3d f_next = f_full;
    double err = consistency(f_next, vhat);
    double eta = 1.0;
    for (int h = 0; h < 20 && err > err_prev; ++h) {
      eta *= 0.5;
      f_next = project_to_unit_level(ls, (1.0 - eta) * f + eta * f_full);
      err = consistency(f_next, vhat);
    }
    const double rel_change = (f_next - f).norm() / std::max(f.norm(), 1e-300);
    f = f_next;
    err_prev = err;
    if (rel_change < 1e-10) {
      SingleContactOutcome out;
      out.mode = ContactMode::Sticking;
      const Matrix3d a_final = quartic_hessian(qa, f);
      out.V = to_physical(sticking_twist(a_final, nc, c.v_p), nc.rho);
      out.F = f;
      return out;
    }
  }
  throw NoConvergence("quartic sticking fixed point did not converge");
}

}  // namespace

const char* to_string(ContactMode m) {
  switch (m) {
    case ContactMode::Sticking: return "sticking";
    case ContactMode::SlideLeft: return "slide_left";
    case ContactMode::SlideRight: return "slide_right";
    case ContactMode::Separating: return "separating";
  }
  return "unknown";
}

SingleContactOutcome solve_sticking(const LimitSurface& ls, const ContactPoint& c) {
  const NormalizedContact nc = normalize_contact(ls, c);
  if (c.v_p.norm() < kVelEps) {
    SingleContactOutcome out;
    out.mode = ContactMode::Sticking;
    return out;
  }
  if (ls.degree() == 2) return solve_sticking_quadratic(ls, c, nc);
  return solve_sticking_quartic(ls, c, nc);
}

MotionCone motion_cone(const LimitSurface& ls, const ContactPoint& c) {
  const NormalizedContact nc = normalize_contact(ls, c);
  const Vector2d t2 = perp(c.n);
  const Vector2d f_left = (c.n + c.mu_c * t2).normalized();
  const Vector2d f_right = (c.n - c.mu_c * t2).normalized();

  MotionCone cone;
  cone.F_left = project_to_unit_level(ls, nc.J.transpose() * f_left);
  cone.F_right = project_to_unit_level(ls, nc.J.transpose() * f_right);
  cone.V_left = twist_of_wrench(ls, cone.F_left);
  cone.V_right = twist_of_wrench(ls, cone.F_right);
  cone.v_left = nc.J * cone.V_left;
  cone.v_right = nc.J * cone.V_right;
  cone.degenerate =
      cross2(cone.v_right, cone.v_left) <= 1e-12 * cone.v_left.norm() * cone.v_right.norm();
  return cone;
}

SingleContactOutcome resolve_single_contact(const LimitSurface& ls, const ContactPoint& c) {
  SingleContactOutcome out;
  if (c.n.dot(c.v_p) <= kVelEps) {
    out.mode = ContactMode::Separating;
    return out;
  }

  const MotionCone cone = motion_cone(ls, c);
  const NormalizedContact nc = normalize_contact(ls, c);

  auto slide = [&](const Vector3d& v_edge, const Vector2d& v_edge2, const Vector3d& f_edge,
                   ContactMode mode) {
    const double denom = c.n.dot(v_edge2);
    if (denom <= kVelEps) return solve_sticking(ls, c);  // grazing edge, no slide scale
    const double s = c.n.dot(c.v_p) / denom;
    SingleContactOutcome r;
    r.mode = mode;
    r.V = to_physical(s * v_edge, nc.rho);
    r.F = f_edge;
    return r;
  };

  if (cone.degenerate) {
    const double side = cross2(cone.v_left, c.v_p);
    const double align = cone.v_left.dot(c.v_p);
    if (std::fabs(side) <= 1e-12 * std::max(1.0, c.v_p.norm()) && align > 0.0)
      return solve_sticking(ls, c);
    if (side > 0.0) return slide(cone.V_left, cone.v_left, cone.F_left, ContactMode::SlideLeft);
    return slide(cone.V_right, cone.v_right, cone.F_right, ContactMode::SlideRight);
  }

  const double cl = cross2(cone.v_left, c.v_p);
  const double cr = cross2(cone.v_right, c.v_p);
  if (cl > 0.0) return slide(cone.V_left, cone.v_left, cone.F_left, ContactMode::SlideLeft);
  if (cr < 0.0) return slide(cone.V_right, cone.v_right, cone.F_right, ContactMode::SlideRight);
  return solve_sticking(ls, c);
}

}  // namespace pushsim
