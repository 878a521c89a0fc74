#pragma once

#include <Eigen/Core>

namespace pushsim {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

/// Wraps an angle to (-pi, pi].
double normalize_angle(double theta);

/// Planar pose: position in mm, heading in radians.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Matrix2d rotation() const;
  /// Maps a point from this frame to the world frame.
  Vector2d apply(const Vector2d& p) const;
  /// Maps a world point into this frame.
  Vector2d apply_inverse(const Vector2d& p) const;
};

/// Body-frame twist (vx, vy in mm/s, omega in rad/s).
struct Twist {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;

  Vector3d vec() const { return {vx, vy, omega}; }
  static Twist from_vec(const Vector3d& v) { return {v[0], v[1], v[2]}; }
};

/// Body-frame wrench (fx, fy normalized force, tau normalized torque).
struct Wrench {
  double fx = 0.0;
  double fy = 0.0;
  double tau = 0.0;

  Vector3d vec() const { return {fx, fy, tau}; }
  static Wrench from_vec(const Vector3d& f) { return {f[0], f[1], f[2]}; }
};

/// 2x3 Jacobian mapping a body twist to the velocity of body point p:
/// v(p) = [[1,0,-py],[0,1,px]] * V.
Eigen::Matrix<double, 2, 3> contact_jacobian(const Vector2d& p);

/// First-order Euler step of a body-frame twist: the linear part is rotated
/// into the world frame before integrating; theta is re-wrapped.
Pose integrate_pose(const Pose& q, const Twist& v, double dt);

/// Weighted SE(2) distance: translation plus rho times the wrapped
/// angular difference.
double pose_deviation(const Pose& a, const Pose& b, double rho);

/// z-component of the 2D cross product.
inline double cross2(const Vector2d& a, const Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Counterclockwise perpendicular.
inline Vector2d perp(const Vector2d& v) { return {-v.y(), v.x()}; }

}  // namespace pushsim
