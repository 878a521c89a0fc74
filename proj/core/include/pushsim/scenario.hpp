#pragma once

#include <cstdint>
#include <string>

#include "pushsim/limit_surface.hpp"
#include "pushsim/shape.hpp"
#include "pushsim/stochastic.hpp"
#include "pushsim/support_oracle.hpp"

namespace pushsim {

enum class PusherType { Point, TwoPoint, ParallelJaw };

struct PusherSpec {
  PusherType type = PusherType::Point;
  double separation = 0.0;        // two-point / jaw inner-face distance, mm
  double finger_length = 0.0;     // jaw finger face length, mm
  double finger_thickness = 0.0;  // jaw finger depth, mm
  Pose pose;                      // initial rig pose, world frame
};

enum class MotionType { Push, Squeeze };

struct MotionScript {
  MotionType type = MotionType::Push;
  Vector2d direction{1.0, 0.0};  // world frame, normalized on load
  double speed = 10.0;           // rig speed, mm/s
  double distance = 0.0;         // push length, mm
  double closing_speed = 10.0;   // jaw total approach rate, mm/s
};

struct PoseSampler {
  bool explicit_list = false;
  std::vector<Pose> poses;
  Vector2d center{0.0, 0.0};  // disc sampler: uniform over the disc area
  double radius = 0.0;
  double angle_min = 0.0;
  double angle_max = 0.0;
  Pose sample(std::mt19937_64& rng) const;
  Pose nth(int i, std::mt19937_64& rng) const;
};

enum class Redraw { PerTrajectory, PerStep };

struct StochasticSpec {
  bool enabled = false;
  StochasticConfig cfg;
  Redraw redraw = Redraw::PerTrajectory;
};

struct GoalSpec {
  bool enabled = false;
  /// Goal pose taken from a rollout of the nominal (unsampled) model started
  /// at the sampler center when true; explicit `pose` otherwise.
  bool auto_from_nominal = false;
  Pose pose;
  double threshold = 2.0;  // pose_deviation threshold, mm
  bool ignore_theta = false;
};

struct Scenario {
  std::string name;
  Shape shape;
  LimitSurface surface;
  double mu = 0.3;  // contact friction when no stochastic block is active
  PusherSpec pusher;
  MotionScript motion;
  PoseSampler init;
  StochasticSpec stochastic;
  GoalSpec goal;
  double dt = 0.002;       // s
  int max_steps = 200000;
  double tol = 0.1;        // contact tolerance, mm
  double max_penetration = 1.0;  // mm
  std::uint64_t seed = 0;
  int record_stride = 1;   // keep every k-th step in the record

  Scenario(Shape s, LimitSurface ls) : shape(std::move(s)), surface(std::move(ls)) {}
};

/// Builds the current pusher geometry; `closed_by` is how far the jaws have
/// approached so far (0 for point rigs).
PusherGeometry make_pusher(const PusherSpec& spec, const MotionScript& motion,
                           double closed_by);

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text, const std::string& base_dir);

/// Uniform-pressure support over the shape interior: n-by-n grid cells whose
/// centers fall inside the polygon, equal weights.
SupportModel interior_grid_support(const Shape& shape, int n);

/// Surface fitted to oracle pairs from a support model; degree 2 fits the
/// ellipsoid directly, degree 4 lifts it to its squared (sos) form.
LimitSurface fit_surface_from_support(const SupportModel& support, int degree,
                                      int n_pairs, std::uint64_t seed);

}  // namespace pushsim
