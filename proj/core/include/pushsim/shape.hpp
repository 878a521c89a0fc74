#pragma once

#include <vector>

#include "pushsim/se2.hpp"
#include "pushsim/single_contact.hpp"

namespace pushsim {

/// Closed polygon in the body frame (mm). Vertices are stored
/// counter-clockwise; construction enforces simplicity and positive area.
class Shape {
 public:
  Shape(std::vector<Vector2d> vertices, double rho = 0.0);

  const std::vector<Vector2d>& vertices() const { return verts_; }
  double rho() const { return rho_; }
  double area() const { return area_; }
  Vector2d centroid() const { return centroid_; }
  /// Radius of gyration about the centroid, uniform density.
  double gyration_radius() const { return gyration_; }
  /// Smallest width over all directions (computed on the convex hull);
  /// a gap narrower than this cannot contain the object.
  double min_width() const { return min_width_; }
  /// Largest vertex distance from the centroid.
  double max_radius() const { return max_radius_; }

  bool contains(const Vector2d& q) const;
  /// Closest boundary point to q, the edge index it lies on, and the inward
  /// normal of the boundary there (vertex hits get the adjacent-edge bisector).
  struct BoundaryHit {
    Vector2d point;
    Vector2d inward_normal;
    int edge;
    double distance;
  };
  BoundaryHit closest_boundary_point(const Vector2d& q) const;

 private:
  std::vector<Vector2d> verts_;
  double rho_ = 0.0;
  double area_ = 0.0;
  Vector2d centroid_ = Vector2d::Zero();
  double gyration_ = 0.0;
  double min_width_ = 0.0;
  double max_radius_ = 0.0;
};

Shape rectangle_shape(double width, double height, double rho = 0.0);
/// Regular n-gon approximation of a disc of the given radius.
Shape disc_shape(double radius, int n = 64, double rho = 0.0);

/// One rigid piece of the pusher, in the pusher frame: a point (1 vertex),
/// a finger face (2), or a closed polygon (>= 3). `velocity` is the piece's
/// motion relative to the rig (jaw closing), expressed in the pusher frame.
struct PusherElement {
  std::vector<Vector2d> verts;
  Vector2d velocity = Vector2d::Zero();
};

struct PusherGeometry {
  std::vector<PusherElement> elements;
  /// Rig translation velocity in the world frame (the motion script).
  Vector2d rig_velocity = Vector2d::Zero();
};

PusherGeometry point_pusher();
/// Two point fingers on the pusher y-axis, `separation` apart.
PusherGeometry two_point_pusher(double separation);
/// Two rectangular fingers with inner faces `separation` apart, closing along
/// the pusher y-axis at `closing_speed` (total approach rate).
PusherGeometry parallel_jaw_pusher(double finger_length, double finger_thickness,
                                   double separation, double closing_speed);

/// All points where the pusher boundary is within `tol` of the object
/// boundary, in the object body frame. Face-on-face touches report the two
/// overlap-interval endpoints; candidates closer than `tol` are merged.
/// Penetration up to `max_penetration` is reported via ContactPoint::depth;
/// beyond it the step has failed and OverlapError is thrown.
std::vector<ContactPoint> detect_contacts(const Shape& object, const Pose& object_pose,
                                          const PusherGeometry& pusher,
                                          const Pose& pusher_pose, double tol = 0.1,
                                          double max_penetration = 1.0);

}  // namespace pushsim
