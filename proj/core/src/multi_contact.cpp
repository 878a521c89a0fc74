#include "pushsim/multi_contact.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "pushsim/errors.hpp"

namespace pushsim {

LcpProblem assemble_lcp(const Matrix3d& A, const std::vector<ContactPoint>& contacts,
                        double rho) {
  const int m = static_cast<int>(contacts.size());
  Eigen::MatrixXd N(m, 3), L(2 * m, 3);
  Eigen::VectorXd sa(m), sb(2 * m);
  for (int i = 0; i < m; ++i) {
    const auto& c = contacts[i];
    const auto J = contact_jacobian(c.p / rho);
    const Vector2d t2 = perp(c.n);
    N.row(i) = c.n.transpose() * J;
    L.row(2 * i) = t2.transpose() * J;
    L.row(2 * i + 1) = -t2.transpose() * J;
    sa(i) = -c.n.dot(c.v_p);
    sb(2 * i) = -t2.dot(c.v_p);
    sb(2 * i + 1) = t2.dot(c.v_p);
  }

  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(2 * m, m);
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    E(2 * i, i) = 1.0;
    E(2 * i + 1, i) = 1.0;
    mu(i, i) = contacts[i].mu_c;
  }

  const int dim = 4 * m;
  LcpProblem p;
  p.M = Eigen::MatrixXd::Zero(dim, dim);
  p.q = Eigen::VectorXd::Zero(dim);
  p.M.block(0, 0, m, m) = N * A * N.transpose();
  p.M.block(0, m, m, 2 * m) = N * A * L.transpose();
  p.M.block(m, 0, 2 * m, m) = L * A * N.transpose();
  p.M.block(m, m, 2 * m, 2 * m) = L * A * L.transpose();
  p.M.block(m, 3 * m, 2 * m, m) = E;
  p.M.block(3 * m, 0, m, m) = mu;
  p.M.block(3 * m, m, m, 2 * m) = -E.transpose();
  p.q.head(m) = sa;
  p.q.segment(m, 2 * m) = sb;
  return p;
}

namespace {

std::vector<ContactPoint> merge_duplicates(const std::vector<ContactPoint>& contacts) {
  std::vector<ContactPoint> out;
  for (const auto& c : contacts) {
    bool dup = false;
    for (const auto& kept : out) {
      if ((kept.p - c.p).norm() < 1e-7 && kept.n.dot(c.n) > 1.0 - 1e-9) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(c);
  }
  return out;
}

/// One LCP pass at a fixed linearization; retries a ray termination once
/// with a slightly shifted q before declaring it infeasible.
LcpSolution solve_with_retry(const LcpProblem& p, bool* jammed) {
  LcpSolution sol = lemke_solve(p);
  if (!sol.feasible) {
    LcpProblem nudged = p;
    nudged.q.array() += 1e-10;
    sol = lemke_solve(nudged);
    if (!sol.feasible) *jammed = true;
  }
  return sol;
}

}  // namespace

MultiContactOutcome resolve_multi_contact(const LimitSurface& ls,
                                          const std::vector<ContactPoint>& contacts) {
  MultiContactOutcome out;
  const auto cs = merge_duplicates(contacts);
  const int m = static_cast<int>(cs.size());
  if (m == 0) return out;
  const double rho = ls.normalization().rho();

  // Scale velocities to O(1): z and w scale linearly with q.
  double vscale = 0.0;
  for (const auto& c : cs) vscale = std::max(vscale, c.v_p.norm());
  std::vector<ContactPoint> scaled = cs;
  if (vscale > 0.0)
    for (auto& c : scaled) c.v_p /= vscale;
  else
    vscale = 1.0;

  Eigen::MatrixXd N(m, 3), L(2 * m, 3);
  for (int i = 0; i < m; ++i) {
    const auto J = contact_jacobian(cs[i].p / rho);
    N.row(i) = cs[i].n.transpose() * J;
    L.row(2 * i) = perp(cs[i].n).transpose() * J;
    L.row(2 * i + 1) = -perp(cs[i].n).transpose() * J;
  }

  Matrix3d a_eff;
  if (ls.degree() == 2) {
    a_eff = ls.quadratic().A;
    out.lcp = assemble_lcp(a_eff, scaled, rho);
    out.sol = solve_with_retry(out.lcp, &out.jammed);
  } else {
    // Outer Hessian re-linearization around the net contact wrench.
    Vector3d f = Vector3d::Zero();
    for (int i = 0; i < m; ++i) f += N.row(i).transpose();
    f = project_to_unit_level(ls, f);
    bool settled = false;
    for (int iter = 0; iter < 50 && !settled; ++iter) {
      a_eff = quartic_hessian(ls.quartic().a, f);
      out.lcp = assemble_lcp(a_eff, scaled, rho);
      out.sol = solve_with_retry(out.lcp, &out.jammed);
      if (out.jammed) break;
      const Vector3d f_raw = N.transpose() * out.sol.z.head(m) +
                             L.transpose() * out.sol.z.segment(m, 2 * m);
      if (f_raw.norm() < 1e-14) break;  // all contacts separate
      const Vector3d f_next = project_to_unit_level(ls, f_raw);
      settled = (f_next - f).norm() < 1e-8 * f.norm();
      // Averaged update: plain re-linearization tends to 2-cycle between
      // complementary bases; the midpoint keeps the same fixed points.
      const Vector3d mid = 0.5 * (f + f_next);
      f = mid.norm() > 1e-8 ? project_to_unit_level(ls, mid) : f_next;
    }
    if (!settled && !out.jammed) {
      const Vector3d f_raw = N.transpose() * out.sol.z.head(m) +
                             L.transpose() * out.sol.z.segment(m, 2 * m);
      if (f_raw.norm() >= 1e-14)
        throw NoConvergence("quartic multi-contact linearization did not settle");
    }
  }

  if (out.jammed) return out;

  const Eigen::VectorXd fn = out.sol.z.head(m);
  const Eigen::VectorXd ft = out.sol.z.segment(m, 2 * m);
  const Eigen::VectorXd lam = out.sol.z.tail(m);
  const Vector3d vhat = a_eff * (N.transpose() * fn + L.transpose() * ft) * vscale;
  out.V = {vhat[0], vhat[1], vhat[2] / rho};
  out.f_n = fn * vscale;
  out.f_t = ft * vscale;

  const double fs = std::max(out.sol.z.head(3 * m).cwiseAbs().maxCoeff(), 1.0);
  out.modes.resize(m);
  for (int i = 0; i < m; ++i) {
    if (fn(i) <= 1e-10 * fs)
      out.modes[i] = ContactMode::Separating;
    else if (lam(i) <= 1e-10 * std::max(1.0, lam.cwiseAbs().maxCoeff()))
      out.modes[i] = ContactMode::Sticking;
    else
      out.modes[i] = ft(2 * i) > ft(2 * i + 1) ? ContactMode::SlideLeft
                                               : ContactMode::SlideRight;
  }
  return out;
}

void dump_lcp_json(const LcpProblem& p, const LcpSolution& s, const std::string& path) {
  nlohmann::json j;
  const int n = static_cast<int>(p.q.size());
  auto mat = nlohmann::json::array();
  for (int r = 0; r < n; ++r) {
    auto row = nlohmann::json::array();
    for (int c = 0; c < n; ++c) row.push_back(p.M(r, c));
    mat.push_back(row);
  }
  j["M"] = mat;
  j["q"] = std::vector<double>(p.q.data(), p.q.data() + n);
  j["feasible"] = s.feasible;
  j["pivots"] = s.pivots;
  if (s.z.size() == n) {
    j["z"] = std::vector<double>(s.z.data(), s.z.data() + n);
    j["w"] = std::vector<double>(s.w.data(), s.w.data() + n);
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

}  // namespace pushsim
