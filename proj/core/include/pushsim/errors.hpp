#pragma once

#include <stdexcept>
#include <string>

namespace pushsim {

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pusher penetrates the object deeper than the repairable limit.
struct OverlapError : SimError {
  explicit OverlapError(const std::string& msg, int step = -1)
      : SimError(msg), step(step) {}
  int step;
};

/// A zero wrench was passed where a direction is required.
struct ZeroWrench : SimError {
  using SimError::SimError;
};

/// A zero twist was passed where a direction is required.
struct ZeroTwist : SimError {
  using SimError::SimError;
};

/// An iterative solve failed to converge within its iteration cap.
struct NoConvergence : SimError {
  using SimError::SimError;
};

/// Too few or non-spanning samples for a fit.
struct DegenerateData : SimError {
  using SimError::SimError;
};

/// A matrix expected to be positive (semi)definite is not.
struct NotPsd : SimError {
  using SimError::SimError;
};

/// The sticking-solve matrix D is numerically singular.
struct SingularD : SimError {
  using SimError::SimError;
};

/// Pivoting exceeded the anti-cycling cap.
struct CycleDetected : SimError {
  using SimError::SimError;
};

struct IoError : SimError {
  using SimError::SimError;
};

struct ConfigError : SimError {
  using SimError::SimError;
};

}  // namespace pushsim
