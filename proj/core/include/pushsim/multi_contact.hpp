#pragma once

#include <string>
#include <vector>

#include "pushsim/lemke.hpp"
#include "pushsim/limit_surface.hpp"
#include "pushsim/single_contact.hpp"

namespace pushsim {

/// Builds the complementarity system of the quadratic multi-contact model
/// for z = [f_n; f_t; lambda]:
///   M = [ N A N^T  N A L^T  0 ]      q = [ -n_i . v_pi  ]
///       [ L A N^T  L A L^T  E ]          [ -D_i^T v_pi  ]
///       [ diag(mu)   -E^T   0 ]          [      0       ]
/// where row i of N is n_i^T J_i, rows (2i, 2i+1) of L are +-t_i^T J_i, and
/// contact positions are premultiplied by 1/rho to match the normalized
/// wrench space of A.
LcpProblem assemble_lcp(const Matrix3d& A, const std::vector<ContactPoint>& contacts,
                        double rho);

struct MultiContactOutcome {
  bool jammed = false;
  Twist V;
  std::vector<ContactMode> modes;
  Eigen::VectorXd f_n;    // per contact, normal force magnitudes
  Eigen::VectorXd f_t;    // per contact, tangential pair (+t, -t) magnitudes
  LcpProblem lcp;         // last assembled system, for triage
  LcpSolution sol;
};

/// Resolves m simultaneous contacts against one limit surface.  Degree 2 is
/// a single LCP; degree 4 re-linearizes the Hessian around the net contact
/// wrench until it settles (relative change < 1e-8, cap 50).  Ray
/// termination is retried once with q shifted by 1e-10; persisting
/// infeasibility reports jammed.  Throws NoConvergence / CycleDetected.
MultiContactOutcome resolve_multi_contact(const LimitSurface& ls,
                                          const std::vector<ContactPoint>& contacts);

/// Serializes (M, q, z, w, feasible) to JSON for solver triage.
void dump_lcp_json(const LcpProblem& p, const LcpSolution& s, const std::string& path);

}  // namespace pushsim
