#include "pushsim/support_oracle.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pushsim/errors.hpp"

namespace pushsim {

double SupportModel::gyration_radius() const {
  double s = 0.0;
  for (size_t i = 0; i < points.size(); ++i) s += weights[i] * points[i].squaredNorm();
  return std::sqrt(s);
}

SupportModel make_support(std::vector<Vector2d> points, std::vector<double> weights) {
  if (points.empty() || points.size() != weights.size())
    throw ConfigError("support model needs matching nonempty points and weights");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ConfigError("support weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw ConfigError("support weights must not all vanish");
  for (double& w : weights) w /= total;
  return {std::move(points), std::move(weights)};
}

SupportModel grid_support(double width, double height, int n) {
  std::vector<Vector2d> pts;
  pts.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = width * ((i + 0.5) / n - 0.5);
      const double y = height * ((j + 0.5) / n - 0.5);
      pts.emplace_back(x, y);
    }
  return make_support(std::move(pts), std::vector<double>(n * n, 1.0));
}

SupportModel boundary_support(const std::vector<Vector2d>& polygon, int n) {
  if (polygon.size() < 3) throw ConfigError("boundary support needs a polygon");
  double perimeter = 0.0;
  const size_t m = polygon.size();
  for (size_t i = 0; i < m; ++i) perimeter += (polygon[(i + 1) % m] - polygon[i]).norm();
  std::vector<Vector2d> pts;
  pts.reserve(n);
  double walked = 0.0;
  size_t edge = 0;
  double edge_len = (polygon[1 % m] - polygon[0]).norm();
  double edge_start = 0.0;
  for (int i = 0; i < n; ++i) {
    const double target = perimeter * (i + 0.5) / n;
    while (edge_start + edge_len < target && edge + 1 < m) {
      edge_start += edge_len;
      ++edge;
      edge_len = (polygon[(edge + 1) % m] - polygon[edge]).norm();
    }
    const double t = edge_len > 0.0 ? (target - edge_start) / edge_len : 0.0;
    pts.push_back(polygon[edge] + t * (polygon[(edge + 1) % m] - polygon[edge]));
    (void)walked;
  }
  return make_support(std::move(pts), std::vector<double>(n, 1.0));
}

Vector3d oracle_wrench(const SupportModel& s, const Twist& v) {
  if (v.vec().norm() < 1e-300) throw ZeroTwist("support oracle needs a direction");
  Vector3d f = Vector3d::Zero();
  for (size_t i = 0; i < s.points.size(); ++i) {
    const Vector2d& r = s.points[i];
    const Vector2d u(v.vx - v.omega * r.y(), v.vy + v.omega * r.x());
    const double speed = u.norm();
    if (speed < 1e-12) continue;
    const Vector2d uhat = u / speed;
    f[0] += s.weights[i] * uhat.x();
    f[1] += s.weights[i] * uhat.y();
    f[2] += s.weights[i] * cross2(r, uhat);
  }
  return f;
}

std::vector<WrenchTwistPair> generate_pairs(const SupportModel& s, int n, double rho,
                                            std::mt19937_64& rng) {
  if (!(rho > 0.0)) throw ConfigError("rho must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<WrenchTwistPair> out;
  out.reserve(n);
  while (static_cast<int>(out.size()) < n) {
    Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
    const double norm = dir.norm();
    if (norm < 1e-9) continue;
    dir /= norm;
    const Twist v{dir[0], dir[1], dir[2] / rho};
    Vector3d f = oracle_wrench(s, v);
    f[2] /= rho;
    if (f.norm() < 1e-12) continue;
    out.push_back({f, dir});
  }
  return out;
}

SupportModel load_support(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
    std::vector<Vector2d> pts;
    for (const auto& p : j.at("points")) pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    auto weights = j.at("weights").get<std::vector<double>>();
    return make_support(std::move(pts), std::move(weights));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed support JSON: ") + e.what());
  }
}

void save_support(const SupportModel& s, const std::string& path) {
  nlohmann::json j;
  auto pts = nlohmann::json::array();
  for (const auto& p : s.points) pts.push_back({p.x(), p.y()});
  j["points"] = pts;
  j["weights"] = s.weights;
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

}  // namespace pushsim
