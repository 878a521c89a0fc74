#pragma once

#include <random>
#include <string>
#include <vector>

#include "pushsim/limit_surface.hpp"
#include "pushsim/se2.hpp"

namespace pushsim {

/// Discrete pressure distribution: support points (body frame, mm) with
/// nonnegative weights.  Weights are normalized to sum to 1 on construction,
/// so total support force is the force unit.
struct SupportModel {
  std::vector<Vector2d> points;
  std::vector<double> weights;

  /// sqrt(sum w_i |r_i|^2): characteristic length of the distribution.
  double gyration_radius() const;
};

SupportModel make_support(std::vector<Vector2d> points, std::vector<double> weights);

/// Uniform n x n grid over an axis-aligned rectangle centered at the origin.
SupportModel grid_support(double width, double height, int n);

/// Evenly spaced points along a polygon boundary with uniform weights.
SupportModel boundary_support(const std::vector<Vector2d>& polygon, int n);

/// Friction wrench balance for a unit-speed twist: the applied body wrench
/// that quasi-statically balances surface friction under twist V is
///   (Fx, Fy) = sum_i w_i u_i,   tau = sum_i w_i (r_i x u_i),
/// with u_i the unit velocity of r_i under V; points moving slower than
/// 1e-12 contribute nothing.  tau is in mm units of the weight force.
Vector3d oracle_wrench(const SupportModel& s, const Twist& v);

/// Samples n twists uniformly on the unit sphere in (vx, vy, rho*omega) and
/// pairs each with its oracle wrench scaled onto (f, f, tau/rho).
std::vector<WrenchTwistPair> generate_pairs(const SupportModel& s, int n, double rho,
                                            std::mt19937_64& rng);

/// JSON round-trip ({points, weights}).  Throws IoError.
SupportModel load_support(const std::string& path);
void save_support(const SupportModel& s, const std::string& path);

}  // namespace pushsim
