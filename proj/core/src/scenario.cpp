#include "pushsim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pushsim/errors.hpp"
#include "pushsim/quartic_gram.hpp"

namespace pushsim {

using nlohmann::json;

Pose PoseSampler::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  const double phi = 2.0 * M_PI * u(rng);
  std::uniform_real_distribution<double> ang(angle_min, angle_max);
  Pose q;
  q.x = center.x() + r * std::cos(phi);
  q.y = center.y() + r * std::sin(phi);
  q.theta = angle_min == angle_max ? angle_min : ang(rng);
  return q;
}

Pose PoseSampler::nth(int i, std::mt19937_64& rng) const {
  if (explicit_list) {
    if (poses.empty()) throw ConfigError("empty initial pose list");
    return poses[static_cast<std::size_t>(i) % poses.size()];
  }
  return sample(rng);
}

PusherGeometry make_pusher(const PusherSpec& spec, const MotionScript& motion,
                           double closed_by) {
  switch (spec.type) {
    case PusherType::Point:
      return point_pusher();
    case PusherType::TwoPoint:
      return two_point_pusher(spec.separation);
    case PusherType::ParallelJaw: {
      const double sep = std::max(spec.separation - closed_by, 0.0);
      return parallel_jaw_pusher(spec.finger_length, spec.finger_thickness, sep,
                                 motion.closing_speed);
    }
  }
  throw ConfigError("unknown pusher type");
}

SupportModel interior_grid_support(const Shape& shape, int n) {
  if (n < 1) throw ConfigError("grid resolution must be positive");
  Vector2d lo = shape.vertices()[0], hi = lo;
  for (const auto& v : shape.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Vector2d span = hi - lo;
  std::vector<Vector2d> pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vector2d p(lo.x() + span.x() * (i + 0.5) / n,
                       lo.y() + span.y() * (j + 0.5) / n);
      if (shape.contains(p)) pts.push_back(p);
    }
  if (pts.empty()) throw ConfigError("no grid cells fall inside the shape");
  return make_support(std::move(pts), std::vector<double>(pts.size(), 1.0));
}

namespace {

double support_tau_max(const SupportModel& s) {
  double t = 0.0;
  for (std::size_t i = 0; i < s.points.size(); ++i)
    t += s.weights[i] * s.points[i].norm();
  if (t <= 0.0) throw ConfigError("support model has zero torque capacity");
  return t;
}

}  // namespace

LimitSurface fit_surface_from_support(const SupportModel& support, int degree,
                                      int n_pairs, std::uint64_t seed) {
  const double rho = support_tau_max(support);
  std::mt19937_64 rng = substream(seed, 0);
  const auto pairs = generate_pairs(support, n_pairs, rho, rng);
  QuadraticLS q = fit_quadratic(pairs, Normalization{1.0, rho});
  if (degree == 2) return LimitSurface(q);
  if (degree == 4) return LimitSurface(lift_quadratic(q));
  throw ConfigError("limit surface degree must be 2 or 4");
}

namespace {

Pose pose_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("pose must be [x, y, theta]");
  Pose p;
  p.x = j[0].get<double>();
  p.y = j[1].get<double>();
  p.theta = normalize_angle(j[2].get<double>());
  return p;
}

Shape shape_from_json(const json& j, double rho) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "rectangle")
    return rectangle_shape(j.at("width").get<double>(), j.at("height").get<double>(),
                           rho);
  if (type == "disc")
    return disc_shape(j.at("radius").get<double>(), j.value("segments", 64), rho);
  if (type == "polygon") {
    std::vector<Vector2d> vs;
    for (const auto& v : j.at("vertices"))
      vs.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
    return Shape(std::move(vs), rho);
  }
  throw ConfigError("unknown shape type: " + type);
}

SupportModel support_from_json(const json& j, const Shape& shape) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "grid") return interior_grid_support(shape, j.at("n").get<int>());
  if (type == "boundary")
    return boundary_support(shape.vertices(), j.at("n").get<int>());
  if (type == "points") {
    std::vector<Vector2d> pts;
    for (const auto& p : j.at("points"))
      pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    std::vector<double> ws;
    if (j.contains("weights"))
      ws = j.at("weights").get<std::vector<double>>();
    else
      ws.assign(pts.size(), 1.0);
    return make_support(std::move(pts), std::move(ws));
  }
  throw ConfigError("unknown support type: " + type);
}

LimitSurface surface_from_json(const json& obj, const Shape& shape,
                               const std::string& base_dir) {
  if (!obj.contains("limit_surface"))
    throw ConfigError("object.limit_surface is required");
  const json& j = obj.at("limit_surface");
  if (j.contains("file")) {
    std::filesystem::path p = j.at("file").get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return load_limit_surface(p.string());
  }
  if (j.contains("quadratic")) {
    const json& q = j.at("quadratic");
    QuadraticLS ls;
    const auto a = q.at("A").get<std::vector<double>>();
    if (a.size() != 9) throw ConfigError("quadratic A needs 9 row-major entries");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) ls.A(r, c) = a[3 * r + c];
    ls.norm.f_max = q.value("f_max", 1.0);
    ls.norm.tau_max = q.value("tau_max", 1.0);
    Eigen::SelfAdjointEigenSolver<Matrix3d> es(ls.A);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw ConfigError("quadratic A must be positive definite");
    return LimitSurface(ls);
  }
  if (j.contains("fit")) {
    const json& f = j.at("fit");
    if (!obj.contains("support"))
      throw ConfigError("limit_surface.fit requires object.support");
    const SupportModel support = support_from_json(obj.at("support"), shape);
    return fit_surface_from_support(support, f.value("degree", 2),
                                    f.value("pairs", 400),
                                    f.value("seed", std::uint64_t{2024}));
  }
  throw ConfigError("limit_surface needs one of: file, quadratic, fit");
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON parse error: ") + e.what());
  }
  try {
    const json& obj = j.at("object");
    Shape shape = shape_from_json(obj.at("shape"), obj.value("rho", 0.0));
    LimitSurface surface = surface_from_json(obj, shape, base_dir);
    Scenario sc(std::move(shape), std::move(surface));
    sc.name = j.value("name", "scenario");

    const json& pu = j.at("pusher");
    const std::string ptype = pu.at("type").get<std::string>();
    if (ptype == "point") {
      sc.pusher.type = PusherType::Point;
    } else if (ptype == "two_point") {
      sc.pusher.type = PusherType::TwoPoint;
      sc.pusher.separation = pu.at("separation").get<double>();
    } else if (ptype == "parallel_jaw") {
      sc.pusher.type = PusherType::ParallelJaw;
      sc.pusher.separation = pu.at("separation").get<double>();
      sc.pusher.finger_length = pu.at("finger_length").get<double>();
      sc.pusher.finger_thickness = pu.at("finger_thickness").get<double>();
    } else {
      throw ConfigError("unknown pusher type: " + ptype);
    }
    sc.pusher.pose = pose_from_json(pu.at("pose"));

    const json& mo = j.at("motion");
    const std::string mtype = mo.at("type").get<std::string>();
    if (mtype == "push") {
      sc.motion.type = MotionType::Push;
      if (mo.contains("direction")) {
        sc.motion.direction = Vector2d(mo.at("direction").at(0).get<double>(),
                                       mo.at("direction").at(1).get<double>());
        const double n = sc.motion.direction.norm();
        if (n < 1e-12) throw ConfigError("push direction must be nonzero");
        sc.motion.direction /= n;
      }
      sc.motion.speed = mo.value("speed", 10.0);
      sc.motion.distance = mo.at("distance").get<double>();
      if (sc.motion.speed <= 0.0) throw ConfigError("push speed must be positive");
    } else if (mtype == "squeeze") {
      sc.motion.type = MotionType::Squeeze;
      sc.motion.closing_speed = mo.value("closing_speed", 10.0);
      sc.motion.speed = mo.value("speed", 0.0);
      if (mo.contains("direction")) {
        sc.motion.direction = Vector2d(mo.at("direction").at(0).get<double>(),
                                       mo.at("direction").at(1).get<double>());
        sc.motion.direction.normalize();
      }
      if (sc.motion.closing_speed <= 0.0)
        throw ConfigError("closing speed must be positive");
    } else {
      throw ConfigError("unknown motion type: " + mtype);
    }

    const json& ip = j.at("initial_poses");
    if (ip.contains("poses")) {
      sc.init.explicit_list = true;
      for (const auto& p : ip.at("poses")) sc.init.poses.push_back(pose_from_json(p));
    } else {
      sc.init.radius = ip.at("radius").get<double>();
      if (sc.init.radius < 0.0) throw ConfigError("sampler radius must be >= 0");
      if (ip.contains("center"))
        sc.init.center = Vector2d(ip.at("center").at(0).get<double>(),
                                  ip.at("center").at(1).get<double>());
      if (ip.contains("angle_range")) {
        sc.init.angle_min = ip.at("angle_range").at(0).get<double>();
        sc.init.angle_max = ip.at("angle_range").at(1).get<double>();
      }
    }

    if (j.contains("stochastic")) {
      const json& st = j.at("stochastic");
      sc.stochastic.enabled = true;
      sc.stochastic.cfg.n_df = st.at("n_df").get<int>();
      if (st.contains("mu_range")) {
        sc.stochastic.cfg.mu_min = st.at("mu_range").at(0).get<double>();
        sc.stochastic.cfg.mu_max = st.at("mu_range").at(1).get<double>();
      }
      const std::string redraw = st.value("redraw", "per_trajectory");
      if (redraw == "per_trajectory")
        sc.stochastic.redraw = Redraw::PerTrajectory;
      else if (redraw == "per_step")
        sc.stochastic.redraw = Redraw::PerStep;
      else
        throw ConfigError("stochastic.redraw must be per_trajectory or per_step");
    }

    if (j.contains("goal")) {
      const json& g = j.at("goal");
      sc.goal.enabled = true;
      sc.goal.auto_from_nominal = g.value("auto", false);
      if (g.contains("pose"))
        sc.goal.pose = pose_from_json(g.at("pose"));
      else if (!sc.goal.auto_from_nominal)
        throw ConfigError("goal needs a pose or auto: true");
      sc.goal.threshold = g.value("threshold", 2.0);
      sc.goal.ignore_theta = g.value("ignore_theta", false);
    }

    sc.mu = j.value("mu", 0.3);
    sc.dt = j.value("dt", 0.002);
    sc.max_steps = j.value("max_steps", 200000);
    sc.tol = j.value("tol", 0.1);
    sc.max_penetration = j.value("max_penetration", 1.0);
    sc.seed = j.value("seed", std::uint64_t{0});
    sc.record_stride = j.value("record_stride", 1);
    if (sc.dt <= 0.0) throw ConfigError("dt must be positive");
    if (sc.max_steps < 1) throw ConfigError("max_steps must be positive");
    if (sc.record_stride < 1) throw ConfigError("record_stride must be positive");
    if (sc.mu < 0.0) throw ConfigError("mu must be nonnegative");
    return sc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario field error: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return scenario_from_json_text(ss.str(),
                                 std::filesystem::path(path).parent_path().string());
}

}  // namespace pushsim
