#include "pushsim/limit_surface.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pushsim/errors.hpp"
#include "pushsim/quartic_gram.hpp"

namespace pushsim {

const std::array<QuarticMonomial, 15>& quartic_monomials() {
  static const std::array<QuarticMonomial, 15> table = [] {
    std::array<QuarticMonomial, 15> t{};
    int idx = 0;
    for (int i1 = 0; i1 <= 4; ++i1)
      for (int i2 = 0; i2 + i1 <= 4; ++i2) t[idx++] = {i1, i2, 4 - i1 - i2};
    return t;
  }();
  return table;
}

const Normalization& LimitSurface::normalization() const {
  if (degree() == 2) return quadratic().norm;
  return quartic().norm;
}

double quartic_eval(const QuarticCoeffs& a, const Vector3d& F) {
  double px[5], py[5], pt[5];
  px[0] = py[0] = pt[0] = 1.0;
  for (int i = 1; i <= 4; ++i) {
    px[i] = px[i - 1] * F[0];
    py[i] = py[i - 1] * F[1];
    pt[i] = pt[i - 1] * F[2];
  }
  double h = 0.0;
  const auto& mons = quartic_monomials();
  for (int m = 0; m < 15; ++m)
    h += a[m] * px[mons[m].i1] * py[mons[m].i2] * pt[mons[m].i3];
  return h;
}

Vector3d quartic_gradient(const QuarticCoeffs& a, const Vector3d& F) {
  double px[5], py[5], pt[5];
  px[0] = py[0] = pt[0] = 1.0;
  for (int i = 1; i <= 4; ++i) {
    px[i] = px[i - 1] * F[0];
    py[i] = py[i - 1] * F[1];
    pt[i] = pt[i - 1] * F[2];
  }
  Vector3d g = Vector3d::Zero();
  const auto& mons = quartic_monomials();
  for (int m = 0; m < 15; ++m) {
    const auto& e = mons[m];
    if (e.i1 > 0) g[0] += a[m] * e.i1 * px[e.i1 - 1] * py[e.i2] * pt[e.i3];
    if (e.i2 > 0) g[1] += a[m] * e.i2 * px[e.i1] * py[e.i2 - 1] * pt[e.i3];
    if (e.i3 > 0) g[2] += a[m] * e.i3 * px[e.i1] * py[e.i2] * pt[e.i3 - 1];
  }
  return g;
}

Matrix3d quartic_hessian(const QuarticCoeffs& a, const Vector3d& F) {
  double px[5], py[5], pt[5];
  px[0] = py[0] = pt[0] = 1.0;
  for (int i = 1; i <= 4; ++i) {
    px[i] = px[i - 1] * F[0];
    py[i] = py[i - 1] * F[1];
    pt[i] = pt[i - 1] * F[2];
  }
  Matrix3d h = Matrix3d::Zero();
  const auto& mons = quartic_monomials();
  for (int m = 0; m < 15; ++m) {
    const auto& e = mons[m];
    const double c = a[m];
    if (e.i1 >= 2) h(0, 0) += c * e.i1 * (e.i1 - 1) * px[e.i1 - 2] * py[e.i2] * pt[e.i3];
    if (e.i2 >= 2) h(1, 1) += c * e.i2 * (e.i2 - 1) * px[e.i1] * py[e.i2 - 2] * pt[e.i3];
    if (e.i3 >= 2) h(2, 2) += c * e.i3 * (e.i3 - 1) * px[e.i1] * py[e.i2] * pt[e.i3 - 2];
    if (e.i1 >= 1 && e.i2 >= 1)
      h(0, 1) += c * e.i1 * e.i2 * px[e.i1 - 1] * py[e.i2 - 1] * pt[e.i3];
    if (e.i1 >= 1 && e.i3 >= 1)
      h(0, 2) += c * e.i1 * e.i3 * px[e.i1 - 1] * py[e.i2] * pt[e.i3 - 1];
    if (e.i2 >= 1 && e.i3 >= 1)
      h(1, 2) += c * e.i2 * e.i3 * px[e.i1] * py[e.i2 - 1] * pt[e.i3 - 1];
  }
  h(1, 0) = h(0, 1);
  h(2, 0) = h(0, 2);
  h(2, 1) = h(1, 2);
  return h;
}

double ls_eval(const LimitSurface& ls, const Vector3d& F) {
  if (ls.degree() == 2) return F.dot(ls.quadratic().A * F);
  return quartic_eval(ls.quartic().a, F);
}

Vector3d ls_gradient(const LimitSurface& ls, const Vector3d& F) {
  if (ls.degree() == 2) return 2.0 * ls.quadratic().A * F;
  return quartic_gradient(ls.quartic().a, F);
}

Matrix3d ls_hessian(const LimitSurface& ls, const Vector3d& F) {
  if (ls.degree() == 2) return 2.0 * ls.quadratic().A;
  return quartic_hessian(ls.quartic().a, F);
}

Vector3d project_to_unit_level(const LimitSurface& ls, const Vector3d& F) {
  const double h = ls_eval(ls, F);
  if (!(h > 0.0)) throw ZeroWrench("cannot project zero wrench onto H = 1");
  return F / std::pow(h, 1.0 / ls.degree());
}

Vector3d twist_of_wrench(const LimitSurface& ls, const Vector3d& F) {
  const Vector3d g = ls_gradient(ls, F);
  const double n = g.norm();
  if (n < 1e-300) throw ZeroWrench("gradient vanishes; wrench has no twist direction");
  return g / n;
}

Vector3d wrench_of_twist(const LimitSurface& ls, const Vector3d& V) {
  const double vn = V.norm();
  if (vn < 1e-300) throw ZeroTwist("twist direction undefined");
  const Vector3d vhat = V / vn;

  if (ls.degree() == 2) {
    const Matrix3d& A = ls.quadratic().A;
    const Vector3d F = A.llt().solve(vhat);
    const double h = F.dot(A * F);
    if (!(h > 0.0)) throw NoConvergence("quadratic inverse map failed; A not PD");
    return F / std::sqrt(h);
  }

  const QuarticCoeffs& a = ls.quartic().a;
  Vector3d f = vhat;
  double prev_err = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 100; ++iter) {
    const Vector3d g = quartic_gradient(a, f);
    const double gn = g.norm();
    if (gn < 1e-300) throw NoConvergence("degenerate gradient in inverse map");
    const Vector3d ghat = g / gn;
    const Vector3d r = ghat - vhat;
    const double err = r.norm();
    if (err < 1e-14) break;

    const Matrix3d jg =
        (Matrix3d::Identity() - ghat * ghat.transpose()) * quartic_hessian(a, f) / gn;
    const Matrix3d jt = jg * (Matrix3d::Identity() - f * f.transpose());
    const Matrix3d jtj = jt.transpose() * jt + 1e-14 * Matrix3d::Identity();
    Vector3d step = jtj.ldlt().solve(-jt.transpose() * r);

    double eta = 1.0;
    Vector3d f_next = f;
    for (int h = 0; h < 30; ++h) {
      const Vector3d cand = (f + eta * step).normalized();
      const Vector3d gc = quartic_gradient(a, cand);
      if (gc.norm() > 1e-300 && (gc.normalized() - vhat).norm() < err) {
        f_next = cand;
        break;
      }
      eta *= 0.5;
    }
    const double moved = (f_next - f).norm();
    f = f_next;
    if (moved < 1e-12) {
      if (err < 1e-7 || err >= prev_err) break;
    }
    prev_err = err;
  }
  const Vector3d g = quartic_gradient(a, f);
  if ((g.normalized() - vhat).norm() > 1e-7)
    throw NoConvergence("inverse normal map did not converge");
  const double h = quartic_eval(a, f);
  if (!(h > 0.0)) throw NoConvergence("inverse map left the positive cone");
  return f / std::pow(h, 0.25);
}

namespace {

// Maps the 6 free entries (A11,A12,A13,A22,A23,A33) to g = A*F.
Eigen::Matrix<double, 3, 6> coeff_map(const Vector3d& F) {
  Eigen::Matrix<double, 3, 6> m = Eigen::Matrix<double, 3, 6>::Zero();
  m(0, 0) = F[0]; m(0, 1) = F[1]; m(0, 2) = F[2];
  m(1, 1) = F[0]; m(1, 3) = F[1]; m(1, 4) = F[2];
  m(2, 2) = F[0]; m(2, 4) = F[1]; m(2, 5) = F[2];
  return m;
}

Matrix3d from_packed(const Eigen::Matrix<double, 6, 1>& a6) {
  Matrix3d a;
  a << a6[0], a6[1], a6[2],
       a6[1], a6[3], a6[4],
       a6[2], a6[4], a6[5];
  return a;
}

Eigen::Matrix<double, 6, 1> to_packed(const Matrix3d& a) {
  Eigen::Matrix<double, 6, 1> a6;
  a6 << a(0, 0), a(0, 1), a(0, 2), a(1, 1), a(1, 2), a(2, 2);
  return a6;
}

Matrix3d clamp_pd(const Matrix3d& a) {
  Eigen::SelfAdjointEigenSolver<Matrix3d> es(a);
  Vector3d ev = es.eigenvalues();
  const double floor = 1e-6 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < 3; ++i) ev[i] = std::max(ev[i], floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double direction_objective(const Matrix3d& a, const std::vector<WrenchTwistPair>& pairs) {
  double s = 0.0;
  for (const auto& p : pairs) {
    const Vector3d g = a * p.F;
    const double gn = g.norm();
    if (gn < 1e-300) return std::numeric_limits<double>::infinity();
    s += (g / gn - p.V.normalized()).squaredNorm();
  }
  return s;
}

}  // namespace

QuadraticLS fit_quadratic(const std::vector<WrenchTwistPair>& pairs,
                          const Normalization& norm) {
  const int n = static_cast<int>(pairs.size());
  if (n < 6) throw DegenerateData("need at least 6 wrench-twist pairs");

  Eigen::MatrixXd b(3 * n, 6);
  for (int i = 0; i < n; ++i) {
    const Vector3d fhat = pairs[i].F.normalized();
    const Vector3d vhat = pairs[i].V.normalized();
    Matrix3d vx;
    vx << 0, -vhat[2], vhat[1],
          vhat[2], 0, -vhat[0],
          -vhat[1], vhat[0], 0;
    b.block<3, 6>(3 * i, 0) = -vx * coeff_map(fhat);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv[0] < 1e-300 || sv[4] / sv[0] < 1e-10)
    throw DegenerateData("wrench-twist pairs do not span the quadratic model");

  Eigen::Matrix<double, 6, 1> a6 = svd.matrixV().col(5);
  Matrix3d a = from_packed(a6);
  if (a.trace() < 0.0) a = -a;
  a = clamp_pd(a);

  // Damped Gauss-Newton on the normalized-direction residual.
  double lambda = 1e-4;
  double obj = direction_objective(a, pairs);
  for (int iter = 0; iter < 60; ++iter) {
    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (const auto& p : pairs) {
      const Vector3d g = a * p.F;
      const double gn = g.norm();
      if (gn < 1e-300) continue;
      const Vector3d ghat = g / gn;
      const Vector3d r = ghat - p.V.normalized();
      const Eigen::Matrix<double, 3, 6> j =
          (Matrix3d::Identity() - ghat * ghat.transpose()) / gn * coeff_map(p.F);
      jtj += j.transpose() * j;
      jtr += j.transpose() * r;
    }
    bool accepted = false;
    for (int t = 0; t < 12; ++t) {
      const Eigen::Matrix<double, 6, 6> lhs =
          jtj + lambda * Eigen::Matrix<double, 6, 6>::Identity() * (1.0 + jtj.trace());
      const Eigen::Matrix<double, 6, 1> step = lhs.ldlt().solve(-jtr);
      const Matrix3d cand = clamp_pd(from_packed(to_packed(a) + step));
      const double cand_obj = direction_objective(cand, pairs);
      if (cand_obj < obj) {
        a = cand;
        obj = cand_obj;
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
  }

  double mean_h = 0.0;
  for (const auto& p : pairs) mean_h += p.F.dot(a * p.F);
  mean_h /= n;
  if (!(mean_h > 0.0)) throw DegenerateData("fitted form is not positive on the data");
  QuadraticLS out;
  out.A = a / mean_h;
  out.norm = norm;
  return out;
}

namespace {

using nlohmann::json;

json normalization_to_json(const Normalization& n) {
  return json{{"f_max", n.f_max}, {"tau_max", n.tau_max}};
}

Normalization normalization_from_json(const json& j) {
  Normalization n;
  n.f_max = j.at("f_max").get<double>();
  n.tau_max = j.at("tau_max").get<double>();
  if (!(n.f_max > 0.0) || !(n.tau_max > 0.0))
    throw IoError("normalization scales must be positive");
  return n;
}

}  // namespace

std::string limit_surface_to_json_text(const LimitSurface& ls) {
  json j;
  j["degree"] = ls.degree();
  if (ls.degree() == 2) {
    const Matrix3d& a = ls.quadratic().A;
    std::vector<double> flat;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) flat.push_back(a(r, c));
    j["A"] = flat;
    j["normalization"] = normalization_to_json(ls.quadratic().norm);
  } else {
    const auto& q = ls.quartic();
    j["a"] = std::vector<double>(q.a.data(), q.a.data() + 15);
    json mons = json::array();
    for (const auto& m : quartic_monomials()) mons.push_back({m.i1, m.i2, m.i3});
    j["monomials"] = mons;
    j["normalization"] = normalization_to_json(q.norm);
  }
  return j.dump(2) + "\n";
}

LimitSurface limit_surface_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed limit-surface JSON: ") + e.what());
  }
  try {
    const int degree = j.at("degree").get<int>();
    if (degree == 2) {
      const auto flat = j.at("A").get<std::vector<double>>();
      if (flat.size() != 9) throw IoError("A must have 9 row-major entries");
      Matrix3d a;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a(r, c) = flat[3 * r + c];
      a = 0.5 * (a + a.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Matrix3d> es(a);
      if (es.eigenvalues().minCoeff() <= 0.0)
        throw NotPsd("quadratic limit surface matrix is not positive definite");
      QuadraticLS q;
      q.A = a;
      q.norm = normalization_from_json(j.at("normalization"));
      return LimitSurface(q);
    }
    if (degree == 4) {
      const auto av = j.at("a").get<std::vector<double>>();
      if (av.size() != 15) throw IoError("a must have 15 entries");
      if (j.contains("monomials")) {
        const auto mons = j.at("monomials");
        if (mons.size() != 15) throw IoError("monomials must list 15 exponent triples");
        const auto& ref = quartic_monomials();
        for (int m = 0; m < 15; ++m) {
          if (mons[m][0].get<int>() != ref[m].i1 || mons[m][1].get<int>() != ref[m].i2 ||
              mons[m][2].get<int>() != ref[m].i3)
            throw IoError("monomial order does not match (i1,i2) lexicographic");
        }
      }
      QuarticCoeffs a;
      for (int m = 0; m < 15; ++m) a[m] = av[m];
      const Matrix9d q = canonical_gram(a);
      Eigen::SelfAdjointEigenSolver<Matrix9d> es(q);
      if (es.eigenvalues().minCoeff() < -1e-9 * std::max(1.0, q.norm()))
        throw NotPsd("quartic coefficients are not certifiably sos-convex");
      QuarticLS out;
      out.a = a;
      out.Q = q;
      out.norm = normalization_from_json(j.at("normalization"));
      return LimitSurface(out);
    }
    throw IoError("degree must be 2 or 4");
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed limit-surface JSON: ") + e.what());
  }
}

void save_limit_surface(const LimitSurface& ls, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << limit_surface_to_json_text(ls);
}

LimitSurface load_limit_surface(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return limit_surface_from_json_text(ss.str());
}

}  // namespace pushsim
