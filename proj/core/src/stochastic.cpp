#include "pushsim/stochastic.hpp"

#include <cmath>

#include "pushsim/errors.hpp"
#include "pushsim/quartic_gram.hpp"

namespace pushsim {

Eigen::MatrixXd wishart_sample(const Eigen::MatrixXd& scale, int n_df,
                               std::mt19937_64& rng) {
  const int d = static_cast<int>(scale.rows());
  if (n_df < d) throw ConfigError("wishart degrees of freedom below dimension");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scale);
  if (es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, es.eigenvalues().maxCoeff()))
    throw NotPsd("wishart scale matrix has a negative eigenvalue");
  const Eigen::MatrixXd B =
      es.eigenvectors() *
      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
      es.eigenvectors().transpose();

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < d; ++i) {
    std::chi_squared_distribution<double> chi2(n_df - i);
    C(i, i) = std::sqrt(chi2(rng));
    for (int j = 0; j < i; ++j) C(i, j) = gauss(rng);
  }
  const Eigen::MatrixXd BC = B * C;
  return BC * BC.transpose();
}

QuadraticLS sample_quadratic(const QuadraticLS& nominal, const StochasticConfig& cfg,
                             std::mt19937_64& rng) {
  QuadraticLS out = nominal;
  Matrix3d A = wishart_sample(nominal.A, cfg.n_df, rng) / cfg.n_df;
  A += cfg.diag_offset * (A.trace() / 3.0) * Matrix3d::Identity();
  out.A = A;
  return out;
}

QuarticLS sample_quartic(const QuarticLS& nominal, const StochasticConfig& cfg,
                         std::mt19937_64& rng) {
  Matrix9d W = wishart_sample(nominal.Q, cfg.n_df, rng) / cfg.n_df;
  W += cfg.diag_offset * (W.trace() / 9.0) * Matrix9d::Identity();

  // A raw Wishart draw is positive semidefinite but not integrable; full
  // symmetrization restores integrability at the cost of definiteness. Adding
  // a multiple of the sphere certificate (canonical Gram of ||F||^4 / 12,
  // which is >= 8 I on the subspace where symmetric Grams act) covers the
  // worst-case shift, keeping the repaired certificate both properties.
  const Matrix9d S = symmetrize_gram(W);
  const double beta = (S - W).norm() / 8.0;
  const Matrix9d Q = S + beta * (1.0 + 1e-12) * sphere_gram();
  return quartic_from_gram(Q, nominal.norm);
}

double sample_mu_c(const StochasticConfig& cfg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(cfg.mu_min, cfg.mu_max);
  return u(rng);
}

LimitSurface sample_surface(const LimitSurface& nominal, const StochasticConfig& cfg,
                            std::mt19937_64& rng) {
  if (nominal.degree() == 2)
    return LimitSurface(sample_quadratic(nominal.quadratic(), cfg, rng));
  return LimitSurface(sample_quartic(nominal.quartic(), cfg, rng));
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (index + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state) >> 32),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state) >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace pushsim
