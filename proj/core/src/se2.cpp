#include "pushsim/se2.hpp"

#include <cmath>

namespace pushsim {

double normalize_angle(double theta) {
  double t = std::fmod(theta, 2.0 * M_PI);
  if (t <= -M_PI) t += 2.0 * M_PI;
  if (t > M_PI) t -= 2.0 * M_PI;
  return t;
}

Matrix2d Pose::rotation() const {
  const double c = std::cos(theta), s = std::sin(theta);
  Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Vector2d Pose::apply(const Vector2d& p) const {
  return rotation() * p + Vector2d(x, y);
}

Vector2d Pose::apply_inverse(const Vector2d& p) const {
  return rotation().transpose() * (p - Vector2d(x, y));
}

Eigen::Matrix<double, 2, 3> contact_jacobian(const Vector2d& p) {
  Eigen::Matrix<double, 2, 3> j;
  j << 1.0, 0.0, -p.y(),
       0.0, 1.0, p.x();
  return j;
}

Pose integrate_pose(const Pose& q, const Twist& v, double dt) {
  const Vector2d dp = q.rotation() * Vector2d(v.vx, v.vy) * dt;
  return {q.x + dp.x(), q.y + dp.y(), normalize_angle(q.theta + v.omega * dt)};
}

double pose_deviation(const Pose& a, const Pose& b, double rho) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  const double dth = std::fabs(normalize_angle(a.theta - b.theta));
  return std::sqrt(dx * dx + dy * dy) + rho * std::min(dth, 2.0 * M_PI - dth);
}

}  // namespace pushsim
