// End-to-end acceptance suite: twelve numbered checks covering the analytic
// contact solver, the polynomial surface calculus, the LCP resolver, the
// stochastic sampler, and the three shipped scenarios.  Each check prints one
// PASS/FAIL line with its measured values; the exit code is the number of
// failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pushsim/errors.hpp"
#include "pushsim/multi_contact.hpp"
#include "pushsim/outputs.hpp"
#include "pushsim/quartic_gram.hpp"
#include "pushsim/rollout.hpp"
#include "pushsim/scenario.hpp"
#include "pushsim/stochastic.hpp"
#include "pushsim/support_oracle.hpp"
#include "support/helpers.hpp"

using namespace pushsim;
using testutil::uniform;

namespace {

int g_failed = 0;

std::string fmt(const char* f, ...) {
  char buf[768];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s %2d %-40s %s\n", pass ? "[PASS]" : "[FAIL]", id, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failed;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// --------------------------------------------------------------------------
// 1. Sticking solves satisfy the full contact system.

double sticking_residual(const LimitSurface& ls, const ContactPoint& c,
                         const SingleContactOutcome& out) {
  const double rho = ls.normalization().rho();
  const Vector2d ph = c.p / rho;
  const Eigen::Matrix<double, 2, 3> j = contact_jacobian(ph);
  const Vector3d vhat(out.V.vx, out.V.vy, rho * out.V.omega);
  const Vector3d t(-ph.y(), ph.x(), -1.0);

  const double scale = std::max(1.0, c.v_p.norm());
  double r = (j * vhat - c.v_p).norm() / scale;
  const Vector3d grad = ls_gradient(ls, out.F);
  r = std::max(r, (vhat.normalized() - grad.normalized()).norm());
  r = std::max(r, std::fabs(ls_eval(ls, out.F) - 1.0));
  r = std::max(r, std::fabs(t.dot(out.F)));
  return r;
}

void criterion_1() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(101);
  double worst = 0.0;
  int singular = 0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) {
    QuadraticLS q;
    q.A = testutil::random_pd3(g);
    q.norm = {1.0, uniform(g, 10.0, 60.0)};
    const LimitSurface ls(q);
    const double rho = q.norm.rho();

    ContactPoint c;
    do {
      c.p = Vector2d(uniform(g, -2.0 * rho, 2.0 * rho),
                     uniform(g, -2.0 * rho, 2.0 * rho));
    } while (c.p.norm() < 1e-3);
    c.n = testutil::random_unit2(g);
    c.mu_c = uniform(g, 0.05, 0.8);
    do {
      c.v_p = uniform(g, 0.1, 20.0) * testutil::random_unit2(g);
    } while (c.n.dot(c.v_p) <= 1e-6 * c.v_p.norm());

    try {
      worst = std::max(worst, sticking_residual(ls, c, solve_sticking(ls, c)));
    } catch (const SingularD&) {
      ++singular;
    }
  }
  const double dt = seconds_since(t0);
  report(1, "sticking solves satisfy the contact system",
         worst < 1e-10 && singular == 0 && dt < 5.0,
         fmt("n=%d max residual %.2e (<1e-10), %d singular, %.2f s (<5)", n,
             worst, singular, dt));
}

// --------------------------------------------------------------------------
// 2. Analytic derivatives against central differences; Euler identities.

void criterion_2() {
  std::mt19937_64 g(102);
  double worst_fd = 0.0, worst_euler = 0.0;
  const int n = 1000;
  for (int k = 0; k < n; ++k) {
    for (int degree : {2, 4}) {
      const LimitSurface ls =
          degree == 2
              ? LimitSurface(QuadraticLS{testutil::random_pd3(g), {}})
              : LimitSurface(quartic_from_gram(testutil::random_sos_gram(g)));
      const Vector3d F = uniform(g, 0.5, 2.0) * testutil::random_unit3(g);
      const double h = 1e-6 * F.norm();

      const Vector3d ga = ls_gradient(ls, F);
      const Vector3d gf = testutil::fd_gradient(
          [&](const Vector3d& x) { return ls_eval(ls, x); }, F, h);
      worst_fd = std::max(worst_fd, (gf - ga).norm() / ga.norm());

      const Matrix3d ha = ls_hessian(ls, F);
      const Matrix3d hf = testutil::fd_jacobian(
          [&](const Vector3d& x) { return ls_gradient(ls, x); }, F, h);
      worst_fd = std::max(worst_fd, (hf - ha).norm() / ha.norm());

      const Vector3d Fu = project_to_unit_level(ls, F);
      const Vector3d gu = ls_gradient(ls, Fu);
      worst_euler = std::max(
          worst_euler, std::fabs(Fu.dot(gu) - degree * ls_eval(ls, Fu)));
      worst_euler = std::max(worst_euler,
                             (ls_hessian(ls, Fu) * Fu - (degree - 1.0) * gu)
                                 .lpNorm<Eigen::Infinity>());
    }
  }
  report(2, "gradients/Hessians match central differences",
         worst_fd < 1e-6 && worst_euler < 1e-10,
         fmt("n=%d/degree, max fd rel err %.2e (<1e-6), max Euler resid %.2e "
             "(<1e-10)",
             n, worst_fd, worst_euler));
}

// --------------------------------------------------------------------------
// 3. twist_of_wrench / wrench_of_twist round-trip on the unit level set.

void criterion_3() {
  std::mt19937_64 g(103);
  double worst = 0.0;
  const int n = 1000;
  for (int k = 0; k < n; ++k) {
    for (int degree : {2, 4}) {
      const LimitSurface ls =
          degree == 2
              ? LimitSurface(QuadraticLS{testutil::random_pd3(g), {}})
              : LimitSurface(quartic_from_gram(testutil::random_sos_gram(g)));
      const Vector3d F0 = project_to_unit_level(ls, testutil::random_unit3(g));
      const Vector3d F1 = wrench_of_twist(ls, twist_of_wrench(ls, F0));
      worst = std::max(worst, (F1 - F0).norm());
    }
  }
  report(3, "dual maps round-trip on the unit level set", worst < 1e-6,
         fmt("n=%d/degree, max |F - F_roundtrip| %.2e (<1e-6)", n, worst));
}

// --------------------------------------------------------------------------
// 4. LCP resolver against the analytic single-contact solver and against
//    exhaustive complementary-basis enumeration.

ContactPoint random_contact(std::mt19937_64& g) {
  ContactPoint c;
  do {
    c.p = Vector2d(uniform(g, -60.0, 60.0), uniform(g, -60.0, 60.0));
  } while (c.p.norm() < 1e-2);
  c.n = testutil::random_unit2(g);
  c.v_p = uniform(g, 0.2, 10.0) * testutil::random_unit2(g);
  c.mu_c = uniform(g, 0.05, 0.8);
  return c;
}

std::uint32_t active_set(const Eigen::VectorXd& z, double tol = 1e-9) {
  std::uint32_t bits = 0;
  for (int i = 0; i < z.size(); ++i)
    if (z[i] > tol) bits |= 1u << i;
  return bits;
}

void criterion_4(std::vector<std::pair<LcpProblem, LcpSolution>>* solved) {
  std::mt19937_64 g(104);

  // Part a: m = 1 LCP vs the analytic resolver, away from mode boundaries.
  int compared = 0, mode_bad = 0;
  double worst_twist = 0.0;
  while (compared < 1000) {
    QuadraticLS q;
    q.A = testutil::random_pd3(g);
    q.norm = {1.0, uniform(g, 15.0, 50.0)};
    const LimitSurface ls(q);
    const ContactPoint c = random_contact(g);

    const MotionCone cone = motion_cone(ls, c);
    if (cone.degenerate || c.n.dot(cone.v_left) < 1e-3 * cone.v_left.norm() ||
        c.n.dot(cone.v_right) < 1e-3 * cone.v_right.norm())
      continue;
    const double margin = 1e-4 * c.v_p.norm();
    if (std::fabs(cross2(cone.v_left, c.v_p)) < margin ||
        std::fabs(cross2(cone.v_right, c.v_p)) < margin)
      continue;
    ++compared;

    const auto single = resolve_single_contact(ls, c);
    const auto multi = resolve_multi_contact(ls, {c});
    if (multi.jammed || multi.modes.size() != 1 || multi.modes[0] != single.mode)
      ++mode_bad;
    else
      worst_twist = std::max(worst_twist,
                             (multi.V.vec() - single.V.vec()).norm() /
                                 std::max(1.0, single.V.vec().norm()));
    if (!multi.jammed && multi.sol.feasible)
      solved->emplace_back(multi.lcp, multi.sol);
  }

  // Part b: Lemke vs enumeration of all 2^{4m} complementary bases.
  int problems = 0, rays = 0, unmatched = 0, ray_missed = 0;
  double worst_z = 0.0;
  for (int m = 1; m <= 3; ++m) {
    for (int rep = 0; rep < 150; ++rep) {
      const Matrix3d A = testutil::random_pd3(g);
      const double rho = uniform(g, 15.0, 50.0);
      std::vector<ContactPoint> cs;
      for (int i = 0; i < m; ++i) cs.push_back(random_contact(g));
      const LcpProblem p = assemble_lcp(A, cs, rho);
      const LcpSolution s = lemke_solve(p);
      ++problems;

      const auto sols = testutil::lcp_enumerate(p.M, p.q);
      if (!s.feasible) {
        ++rays;
        if (!sols.empty()) ++ray_missed;
        continue;
      }
      solved->emplace_back(p, s);
      double best = 1e300;
      bool basis_match = false;
      for (const auto& e : sols) {
        const double dz = (e.z - s.z).lpNorm<Eigen::Infinity>();
        if (active_set(e.z) == active_set(s.z)) best = std::min(best, dz);
        basis_match |= active_set(e.z) == active_set(s.z);
      }
      if (!basis_match || best > 1e-8) {
        ++unmatched;
      } else {
        worst_z = std::max(worst_z, best);
      }
    }
  }

  report(4, "LCP matches analytic solver and enumeration",
         mode_bad == 0 && worst_twist < 1e-6 && unmatched == 0 &&
             ray_missed == 0,
         fmt("m=1: n=%d, %d mode mismatches, max twist err %.2e (<1e-6); "
             "m<=3: n=%d (%d rays), %d unmatched, %d solvable rays, max |dz| "
             "%.2e (<1e-8)",
             compared, mode_bad, worst_twist, problems, rays, unmatched,
             ray_missed, worst_z));
}

// --------------------------------------------------------------------------
// 5. Complementarity residuals of every resolved outcome from criterion 4
//    plus an extra randomized multi-contact sweep.

void criterion_5(std::vector<std::pair<LcpProblem, LcpSolution>>* solved) {
  std::mt19937_64 g(105);
  int extra = 0;
  while (extra < 500) {
    QuadraticLS q;
    q.A = testutil::random_pd3(g);
    q.norm = {1.0, uniform(g, 15.0, 50.0)};
    std::vector<ContactPoint> cs;
    const int m = 2 + static_cast<int>(g() % 3);
    for (int i = 0; i < m; ++i) cs.push_back(random_contact(g));
    const auto out = resolve_multi_contact(LimitSurface(q), cs);
    if (out.jammed || !out.sol.feasible) continue;
    ++extra;
    solved->emplace_back(out.lcp, out.sol);
  }

  double min_z = 0.0, min_w = 0.0, worst_gap = 0.0;
  for (const auto& [p, s] : *solved) {
    min_z = std::min(min_z, s.z.minCoeff());
    min_w = std::min(min_w, s.w.minCoeff());
    worst_gap = std::max(worst_gap, s.z.dot(s.w) / (1.0 + p.q.norm()));
  }
  report(5, "complementarity residuals stay bounded",
         min_z >= -1e-12 && min_w >= -1e-12 && worst_gap < 1e-8,
         fmt("n=%zu outcomes, min z %.2e, min w %.2e (>=-1e-12), max "
             "z.w/(1+|q|) %.2e (<1e-8)",
             solved->size(), min_z, min_w, worst_gap));
}

// --------------------------------------------------------------------------
// 6. Jamming: the offset two-finger squeeze and symmetric antipodal
//    squeezes report jammed; the solver's retry never converts a true jam.

std::vector<ContactPoint> squeeze_pair(double w, double h, double mu) {
  ContactPoint a, b;
  a.p = {-w, h};
  a.n = {0.0, -1.0};
  a.v_p = {0.0, -5.0};
  a.mu_c = mu;
  b.p = {w, -h};
  b.n = {0.0, 1.0};
  b.v_p = {0.0, 5.0};
  b.mu_c = mu;
  return {a, b};
}

void criterion_6() {
  QuadraticLS q;
  q.norm = {1.0, 36.742346141747674};
  const LimitSurface ls(q);

  const bool fig_jams = resolve_multi_contact(ls, squeeze_pair(10.0, 17.5, 0.6)).jammed;
  const bool below_slides =
      !resolve_multi_contact(ls, squeeze_pair(10.0, 17.5, 0.5)).jammed;

  int jams = 0;
  const int n = 100;
  for (int k = 0; k < n; ++k) {
    std::mt19937_64 g(1060 + k);
    QuadraticLS qs;
    qs.A = testutil::random_pd3(g);
    qs.norm = {1.0, uniform(g, 15.0, 50.0)};
    const Vector2d u = testutil::random_unit2(g);
    const double r = uniform(g, 8.0, 50.0);
    const double speed = uniform(g, 1.0, 10.0);
    const double mu = uniform(g, 0.3, 1.0);
    ContactPoint a, b;
    a.p = r * u;
    a.n = -u;
    a.v_p = -speed * u;
    a.mu_c = mu;
    b.p = -r * u;
    b.n = u;
    b.v_p = speed * u;
    b.mu_c = mu;
    if (resolve_multi_contact(LimitSurface(qs), {a, b}).jammed) ++jams;
  }

  report(6, "opposed squeezes jam and stay jammed",
         fig_jams && below_slides && jams == n,
         fmt("offset squeeze mu=0.6 jams: %d, mu=0.5 slides: %d, antipodal "
             "jams %d/%d seeds",
             fig_jams, below_slides, jams, n));
}

// --------------------------------------------------------------------------
// 7. Wishart sampler moments against the closed-form mean and variance.

void criterion_7() {
  const auto t0 = Clock::now();
  std::mt19937_64 g(107);
  Matrix3d A;
  A << 2.0, 0.5, 0.3, 0.5, 1.5, 0.4, 0.3, 0.4, 1.8;
  const int n_df = 200, draws = 20000;

  Matrix3d m1 = Matrix3d::Zero(), m2 = Matrix3d::Zero();
  for (int k = 0; k < draws; ++k) {
    const Matrix3d w = wishart_sample(A, n_df, g) / n_df;
    m1 += w;
    m2 += w.cwiseProduct(w);
  }
  m1 /= draws;
  m2 /= draws;

  double mean_err = 0.0, var_err = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      mean_err = std::max(mean_err, std::fabs(m1(i, j) - A(i, j)) / std::fabs(A(i, j)));
      const double var = m2(i, j) - m1(i, j) * m1(i, j);
      const double expected = (A(i, j) * A(i, j) + A(i, i) * A(j, j)) / n_df;
      var_err = std::max(var_err, std::fabs(var - expected) / expected);
    }
  const double dt = seconds_since(t0);
  report(7, "Wishart sampler matches its moments",
         mean_err < 0.03 && var_err < 0.10 && dt < 10.0,
         fmt("%d draws at n_df=%d: max mean err %.2f%% (<3%%), max var err "
             "%.2f%% (<10%%), %.2f s (<10)",
             draws, n_df, 100.0 * mean_err, 100.0 * var_err, dt));
}

// --------------------------------------------------------------------------
// 8. Every sampled quartic stays convex everywhere it is evaluated.

void criterion_8() {
  std::mt19937_64 g(108);
  StochasticConfig cfg;
  cfg.n_df = 20;
  double min_eig = 1e300;
  const int bases = 10, samples = 100, wrenches = 1000;
  for (int b = 0; b < bases; ++b) {
    const QuarticLS base =
        b % 2 == 0 ? lift_quadratic(QuadraticLS{testutil::random_pd3(g), {}})
                   : quartic_from_gram(testutil::random_sos_gram(g));
    for (int s = 0; s < samples; ++s) {
      const QuarticLS sampled = sample_quartic(base, cfg, g);
      for (int k = 0; k < wrenches; ++k) {
        const Vector3d F = testutil::random_unit3(g);
        Eigen::SelfAdjointEigenSolver<Matrix3d> es(quartic_hessian(sampled.a, F));
        min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
      }
    }
  }
  report(8, "sampled quartics keep convex Hessians",
         min_eig >= -1e-10,
         fmt("%d sampled surfaces x %d wrenches: min Hessian eigenvalue %.2e "
             "(>=-1e-10)",
             bases * samples, wrenches, min_eig));
}

// --------------------------------------------------------------------------
// 9. Stochastic point-push ensemble: unimodal displacement histograms and
//    dispersion that shrinks as the concentration parameter grows.

int kde_mode_count(const std::vector<double>& data) {
  const int n = static_cast<int>(data.size());
  std::vector<double> sorted = data;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front(), hi = sorted.back();
  if (hi - lo < 1e-12) return 1;

  double mean = 0.0;
  for (double d : sorted) mean += d;
  mean /= n;
  double var = 0.0;
  for (double d : sorted) var += (d - mean) * (d - mean);
  const double sigma = std::sqrt(var / (n - 1));
  const auto quantile = [&](double p) {
    const double t = p * (n - 1);
    const int i = static_cast<int>(t);
    return sorted[i] + (t - i) * (sorted[std::min(i + 1, n - 1)] - sorted[i]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double h = 0.9 * std::min(sigma, iqr / 1.34) * std::pow(n, -0.2);
  if (h <= 0.0) h = sigma * std::pow(n, -0.2);

  const int grid = 256;
  std::vector<double> density(grid, 0.0);
  const double x0 = lo - 3.0 * h, x1 = hi + 3.0 * h;
  for (int j = 0; j < grid; ++j) {
    const double x = x0 + (x1 - x0) * j / (grid - 1);
    for (double d : sorted) {
      const double t = (x - d) / h;
      density[j] += std::exp(-0.5 * t * t);
    }
  }
  const double peak = *std::max_element(density.begin(), density.end());
  int modes = 0;
  for (int j = 1; j + 1 < grid; ++j)
    if (density[j] > density[j - 1] && density[j] > density[j + 1] &&
        density[j] > 0.1 * peak)
      ++modes;
  return std::max(modes, 1);
}

void criterion_9() {
  const auto t0 = Clock::now();
  const std::string dir = PUSHSIM_SCENARIO_DIR;
  Scenario sc = load_scenario(dir + "/single_push.json");

  const BatchResult batch = run_batch(sc, 2000);
  std::vector<double> dx, dy, dth;
  for (const auto& r : batch.records) {
    dx.push_back(r.final_object.x - r.initial_object.x);
    dy.push_back(r.final_object.y - r.initial_object.y);
    dth.push_back(normalize_angle(r.final_object.theta - r.initial_object.theta));
  }
  const int mx = kde_mode_count(dx), my = kde_mode_count(dy),
            mth = kde_mode_count(dth);

  const double rho = sc.surface.normalization().rho();
  std::vector<double> disp;
  for (int n_df : {10, 20, 100, 1000}) {
    Scenario swept = sc;
    swept.stochastic.cfg.n_df = n_df;
    const BatchResult b = run_batch(swept, 400);
    const Matrix3d& cov = b.summary.final_covariance;
    disp.push_back(cov(0, 0) + cov(1, 1) + rho * rho * cov(2, 2));
  }
  const bool shrinking =
      disp[0] > disp[1] && disp[1] > disp[2] && disp[2] > disp[3];
  const double dt = seconds_since(t0);

  report(9, "stochastic push ensemble is unimodal, concentrating",
         mx == 1 && my == 1 && mth == 1 && shrinking && dt < 60.0,
         fmt("2000 rollouts: modes dx=%d dy=%d dth=%d (==1); dispersion over "
             "n_df {10,20,100,1000} = {%.3g, %.3g, %.3g, %.3g} mm^2 "
             "(decreasing: %d); %.1f s (<60)",
             mx, my, mth, disp[0], disp[1], disp[2], disp[3], shrinking, dt));
}

// --------------------------------------------------------------------------
// 10. Two-point push capture region is insensitive to the concentration
//     parameter.

void criterion_10() {
  const std::string dir = PUSHSIM_SCENARIO_DIR;
  Scenario sc = load_scenario(dir + "/two_point_push.json");

  Scenario nominal = sc;
  nominal.stochastic.enabled = false;
  const RolloutRecord ref = run_rollout(nominal, {0.0, 0.0, 0.0}, substream(sc.seed, 0));

  sc.goal.enabled = true;
  sc.goal.auto_from_nominal = false;
  sc.goal.pose = ref.final_object;
  sc.goal.threshold = 2.0;
  sc.goal.ignore_theta = true;

  const double radius = 78.8;
  std::mt19937_64 pg(1010);
  sc.init.explicit_list = true;
  sc.init.poses.clear();
  const int n = 500;
  for (int i = 0; i < n; ++i) {
    const double r = radius * std::sqrt(uniform(pg, 0.0, 1.0));
    const double phi = uniform(pg, -M_PI, M_PI);
    sc.init.poses.push_back({r * std::cos(phi), r * std::sin(phi), 0.0});
  }

  double area[2] = {0.0, 0.0};
  int conv[2] = {0, 0};
  const int sweep[2] = {200, 10};
  for (int s = 0; s < 2; ++s) {
    Scenario swept = sc;
    swept.stochastic.cfg.n_df = sweep[s];
    const BatchResult b = run_batch(swept, n);
    conv[s] = b.summary.n_converged;
    area[s] = static_cast<double>(conv[s]) / n * M_PI * radius * radius;
  }
  const double rel = std::fabs(area[0] - area[1]) / std::max(area[0], area[1]);
  report(10, "capture region insensitive to concentration", rel < 0.05,
         fmt("n_df=200: %d/%d converged (%.1f cm^2), n_df=10: %d/%d (%.1f "
             "cm^2), relative difference %.2f%% (<5%%)",
             conv[0], n, area[0] / 100.0, conv[1], n, area[1] / 100.0,
             100.0 * rel));
}

// --------------------------------------------------------------------------
// 11. A quadratic fitted to oracle pairs predicts push outcomes of the
//     generating support model.

Pose oracle_push_pose(const SupportModel& sup, const Vector2d& p_body,
                      double distance, double speed, double dt) {
  Pose q;
  const Vector2d v_world(speed, 0.0);
  const int steps = static_cast<int>(std::round(distance / (speed * dt)));
  for (int k = 0; k < steps; ++k) {
    const Vector2d v_body = q.rotation().transpose() * v_world;
    const auto residual = [&](double s) {
      const Twist V{v_body.x() + s * p_body.y(), v_body.y() - s * p_body.x(), s};
      const Vector3d W = oracle_wrench(sup, V);
      return W[2] - cross2(p_body, Vector2d(W[0], W[1]));
    };
    double lo = -1e-3, hi = 1e-3;
    double flo = residual(lo), fhi = residual(hi);
    for (int grow = 0; flo * fhi > 0.0 && grow < 60; ++grow) {
      lo *= 1.6;
      hi *= 1.6;
      flo = residual(lo);
      fhi = residual(hi);
    }
    double s = 0.0;
    if (flo * fhi <= 0.0) {
      for (int it = 0; it < 90; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = residual(mid);
        if (flo * fm <= 0.0) {
          hi = mid;
          fhi = fm;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      s = 0.5 * (lo + hi);
    }
    const Twist V{v_body.x() + s * p_body.y(), v_body.y() - s * p_body.x(), s};
    q = integrate_pose(q, V, dt);
  }
  return q;
}

void criterion_11() {
  const double push = 30.0, speed = 10.0, dt = 0.005;
  const double fractions[] = {-0.7, -0.45, -0.2, 0.0, 0.2, 0.45, 0.7};
  const struct {
    double w, h;
    int n;
  } objects[] = {{90.0, 90.0, 8}, {50.0, 35.0, 8}, {120.0, 40.0, 10}};

  double sum_dev = 0.0, max_dev = 0.0;
  int cases = 0;
  for (const auto& obj : objects) {
    const SupportModel sup = grid_support(obj.w, obj.h, obj.n);
    const LimitSurface fitted = fit_surface_from_support(sup, 2, 400, 2024);
    const double rho = sup.gyration_radius();
    for (const double f : fractions) {
      const double b = f * 0.5 * obj.h;
      Scenario sc(rectangle_shape(obj.w, obj.h), fitted);
      sc.pusher.pose = {-0.5 * obj.w - 0.05, b, 0.0};
      sc.motion.direction = {1.0, 0.0};
      sc.motion.speed = speed;
      sc.motion.distance = push;
      sc.dt = dt;
      sc.mu = 0.8;
      const RolloutRecord sim = run_rollout(sc, {0.0, 0.0, 0.0}, substream(11, 0));

      const Pose oracle =
          oracle_push_pose(sup, {-0.5 * obj.w, b}, push, speed, dt);
      const double dev =
          (std::hypot(sim.final_object.x - oracle.x,
                      sim.final_object.y - oracle.y) +
           rho * std::fabs(normalize_angle(sim.final_object.theta - oracle.theta))) /
          push;
      sum_dev += dev;
      max_dev = std::max(max_dev, dev);
      ++cases;
    }
  }
  const double mean_dev = sum_dev / cases;
  report(11, "fitted quadratic predicts oracle pushes", mean_dev < 0.30,
         fmt("%d pushes over %zu objects: mean normalized deviation %.1f%% "
             "(<30%%), max %.1f%%",
             cases, std::size(objects), 100.0 * mean_dev, 100.0 * max_dev));
}

// --------------------------------------------------------------------------
// 12. Batch outputs are byte-identical across repeat runs and thread counts.

void criterion_12() {
  namespace fs = std::filesystem;
  const std::string dir = PUSHSIM_SCENARIO_DIR;
  const char* files[] = {"single_push.json", "two_point_push.json",
                         "parallel_jaw_grasp.json"};
  const std::vector<std::string> formats = {"csv", "json", "svg"};
  const fs::path root = fs::temp_directory_path() / "pushsim_acceptance_12";
  fs::remove_all(root);

  const auto read_all = [](const fs::path& d) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::directory_iterator(d)) {
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      out.emplace_back(e.path().filename().string(), ss.str());
    }
    std::sort(out.begin(), out.end());
    return out;
  };

  bool identical = true;
  int files_checked = 0;
  for (int scn = 0; scn < 3; ++scn) {
    const Scenario sc = load_scenario(dir + "/" + files[scn]);
    const int threads[] = {1, 4, 4};
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    for (int r = 0; r < 3; ++r) {
      const fs::path out = root / fmt("s%d_r%d", scn, r);
      emit_outputs(run_batch(sc, 24, threads[r]), formats, out.string());
      runs.push_back(read_all(out));
    }
    for (int r = 1; r < 3; ++r) identical &= runs[r] == runs[0];
    files_checked += static_cast<int>(runs[0].size());
  }
  fs::remove_all(root);
  report(12, "outputs are byte-stable across runs and threads", identical,
         fmt("3 scenarios x 3 runs (1/4/4 threads), %d files per pass: %s",
             files_checked, identical ? "all byte-identical" : "MISMATCH"));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  std::vector<std::pair<LcpProblem, LcpSolution>> solved;

  const struct {
    int id;
    const char* name;
    std::function<void()> fn;
  } checks[] = {
      {1, "sticking solves satisfy the contact system", criterion_1},
      {2, "gradients/Hessians match central differences", criterion_2},
      {3, "dual maps round-trip on the unit level set", criterion_3},
      {4, "LCP matches analytic solver and enumeration",
       [&] { criterion_4(&solved); }},
      {5, "complementarity residuals stay bounded",
       [&] { criterion_5(&solved); }},
      {6, "opposed squeezes jam and stay jammed", criterion_6},
      {7, "Wishart sampler matches its moments", criterion_7},
      {8, "sampled quartics keep convex Hessians", criterion_8},
      {9, "stochastic push ensemble is unimodal, concentrating", criterion_9},
      {10, "capture region insensitive to concentration", criterion_10},
      {11, "fitted quadratic predicts oracle pushes", criterion_11},
      {12, "outputs are byte-stable across runs and threads", criterion_12},
  };

  for (const auto& c : checks) {
    try {
      c.fn();
    } catch (const std::exception& e) {
      report(c.id, c.name, false, fmt("exception: %s", e.what()));
    }
  }
  std::printf("%d/12 criteria passed in %.1f s\n", 12 - g_failed,
              seconds_since(t0));
  return g_failed == 0 ? 0 : 1;
}
