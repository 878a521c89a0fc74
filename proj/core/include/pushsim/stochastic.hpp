#pragma once

#include <cstdint>
#include <random>

#include "pushsim/limit_surface.hpp"

namespace pushsim {

/// Draws W ~ Wishart(scale, n_df) via the Bartlett decomposition. The scale
/// matrix may be positive semidefinite; a symmetric eigenvalue square root is
/// used as the factor, so rank-deficient scales stay supported.
Eigen::MatrixXd wishart_sample(const Eigen::MatrixXd& scale, int n_df,
                               std::mt19937_64& rng);

struct StochasticConfig {
  int n_df = 20;
  double mu_min = 0.15;
  double mu_max = 0.35;
  /// Relative diagonal offset applied to sampled matrices before any
  /// definiteness repair, as a fraction of trace/dim.
  double diag_offset = 1e-6;
};

/// Mean-preserving perturbation of a nominal quadratic surface:
/// A_i = (1/n_df) W with W ~ Wishart(A, n_df), plus a small diagonal offset.
QuadraticLS sample_quadratic(const QuadraticLS& nominal, const StochasticConfig& cfg,
                             std::mt19937_64& rng);

/// Perturbs a quartic surface through its curvature certificate: the Gram
/// matrix is Wishart-sampled, then repaired to an integrable positive
/// semidefinite certificate before conversion back to coefficients.
QuarticLS sample_quartic(const QuarticLS& nominal, const StochasticConfig& cfg,
                         std::mt19937_64& rng);

double sample_mu_c(const StochasticConfig& cfg, std::mt19937_64& rng);

LimitSurface sample_surface(const LimitSurface& nominal, const StochasticConfig& cfg,
                            std::mt19937_64& rng);

/// Deterministic per-trajectory substream: seeds an independent generator
/// from (seed, index) so batches parallelize without sharing RNG state.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index);

}  // namespace pushsim
