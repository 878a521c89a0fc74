#pragma once

#include <array>

#include "pushsim/multi_contact.hpp"
#include "pushsim/scenario.hpp"

namespace pushsim {

enum class RolloutStatus { Completed, Jammed, Grasped, Escaped };

const char* to_string(RolloutStatus s);

struct StepRecord {
  double t = 0.0;
  Pose object;
  Pose pusher;
  Twist V;
  std::vector<ContactMode> modes;
  /// Per contact (f_n, f_t) in normalized force units, matching `modes`.
  std::vector<double> forces;
};

struct RolloutRecord {
  std::vector<StepRecord> steps;
  RolloutStatus status = RolloutStatus::Completed;
  Pose initial_object;
  Pose final_object;
  Pose final_pusher;
  double total_time = 0.0;
  int n_steps = 0;
  bool converged = false;  // set by run_batch when the scenario has a goal
};

/// Simulates one trajectory: detect contacts, resolve (single or multi),
/// integrate object and pusher by dt, until the motion script completes or a
/// terminal status triggers.  Stochastic parameters are drawn from `rng` per
/// the scenario's redraw cadence.  OverlapError is annotated with the step.
RolloutRecord run_rollout(const Scenario& sc, const Pose& initial,
                          std::mt19937_64 rng);

struct BatchSummary {
  Vector3d final_mean = Vector3d::Zero();
  Matrix3d final_covariance = Matrix3d::Zero();
  std::array<int, 4> status_counts{};  // indexed by RolloutStatus
  int n_converged = 0;
  bool has_goal = false;
  Pose goal;
};

struct BatchResult {
  std::vector<RolloutRecord> records;
  BatchSummary summary;
};

/// Deterministic parallel fan-out: rollout i uses substream(seed, i) for both
/// its initial pose draw and its model sampling, so results are independent
/// of thread count and schedule.  An auto goal is resolved once from a
/// nominal rollout started at the sampler center.
BatchResult run_batch(const Scenario& sc, int n, int n_threads = 0);

/// Convergence test used for goal flags: translation deviation plus rho-scaled
/// angular deviation unless the goal ignores orientation.
double goal_deviation(const Pose& q, const GoalSpec& goal, double rho);

}  // namespace pushsim
