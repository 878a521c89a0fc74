#pragma once

#include <vector>

#include "pushsim/limit_surface.hpp"
#include "pushsim/se2.hpp"

namespace pushsim {

enum class ContactMode { Sticking, SlideLeft, SlideRight, Separating };

const char* to_string(ContactMode m);

/// One pusher-object contact in the object body frame.
struct ContactPoint {
  Vector2d p;             // contact position, mm
  Vector2d n;             // unit inward normal (into the object)
  Vector2d v_p;           // pusher velocity at the contact, mm/s
  double mu_c = 0.3;      // contact Coulomb coefficient
  double depth = 0.0;     // penetration depth if positive, mm
  int element = -1;       // index of the pusher element that made the contact
};

/// Motion cone at a contact: twists of the two friction-cone edge wrenches.
/// "left" is the +perp(n) side; a pusher sliding left applies F_left.
struct MotionCone {
  Vector3d F_left, F_right;    // edge wrenches on H = 1 (normalized)
  Vector3d V_left, V_right;    // edge twists, normalized coordinates
  Vector2d v_left, v_right;    // contact-point velocities of the edges
  bool degenerate = false;     // edges collapse (mu ~ 0 or flat surface)
};

MotionCone motion_cone(const LimitSurface& ls, const ContactPoint& c);

struct SingleContactOutcome {
  ContactMode mode = ContactMode::Separating;
  Twist V;        // physical body twist (mm/s, rad/s)
  Vector3d F = Vector3d::Zero();  // applied wrench on H = 1, normalized; zero when separating
};

/// Sticking solve: the unique twist with contact velocity v_p whose wrench is
/// consistent with the limit-surface normal map and the contact torque
/// relation.  Analytic 3x3 solve for degree 2; Hessian fixed-point iteration
/// for degree 4.  Throws SingularD / NoConvergence.
SingleContactOutcome solve_sticking(const LimitSurface& ls, const ContactPoint& c);

/// Full single-contact resolution: separates on receding normal velocity,
/// sticks when v_p lies inside the motion cone, otherwise slides along the
/// matching cone edge with the normal-velocity-matched twist magnitude.
SingleContactOutcome resolve_single_contact(const LimitSurface& ls, const ContactPoint& c);

}  // namespace pushsim
