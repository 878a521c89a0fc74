#include "pushsim/rollout.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "pushsim/errors.hpp"
#include "pushsim/single_contact.hpp"

namespace pushsim {

const char* to_string(RolloutStatus s) {
  switch (s) {
    case RolloutStatus::Completed: return "Completed";
    case RolloutStatus::Jammed: return "Jammed";
    case RolloutStatus::Grasped: return "Grasped";
    case RolloutStatus::Escaped: return "Escaped";
  }
  return "?";
}

namespace {

constexpr double kOpposedDot = -0.98480775301220802;  // cos(170 deg)

bool opposed_across_elements(const std::vector<ContactPoint>& contacts) {
  for (std::size_t i = 0; i < contacts.size(); ++i)
    for (std::size_t j = i + 1; j < contacts.size(); ++j)
      if (contacts[i].element != contacts[j].element &&
          contacts[i].n.dot(contacts[j].n) <= kOpposedDot)
        return true;
  return false;
}

struct StepOutcome {
  Twist V;
  std::vector<ContactMode> modes;
  std::vector<double> forces;
  bool jammed = false;
};

StepOutcome resolve_step(const LimitSurface& surface,
                         const std::vector<ContactPoint>& contacts) {
  StepOutcome out;
  if (contacts.empty()) return out;
  if (contacts.size() == 1) {
    const auto r = resolve_single_contact(surface, contacts[0]);
    out.V = r.V;
    out.modes = {r.mode};
    const Vector2d t2 = perp(contacts[0].n);
    out.forces = {r.F.head<2>().dot(contacts[0].n), r.F.head<2>().dot(t2)};
    return out;
  }
  const auto r = resolve_multi_contact(surface, contacts);
  if (r.jammed) {
    out.jammed = true;
    return out;
  }
  out.V = r.V;
  out.modes = r.modes;
  const int m = static_cast<int>(r.modes.size());
  out.forces.resize(2 * m);
  for (int i = 0; i < m; ++i) {
    out.forces[2 * i] = r.f_n(i);
    out.forces[2 * i + 1] = r.f_t(2 * i) - r.f_t(2 * i + 1);
  }
  return out;
}

}  // namespace

RolloutRecord run_rollout(const Scenario& sc, const Pose& initial,
                          std::mt19937_64 rng) {
  RolloutRecord rec;
  rec.initial_object = initial;

  LimitSurface surface = sc.surface;
  double mu = sc.mu;
  if (sc.stochastic.enabled) {
    surface = sample_surface(sc.surface, sc.stochastic.cfg, rng);
    mu = sample_mu_c(sc.stochastic.cfg, rng);
  }

  Pose obj = initial;
  Pose rig = sc.pusher.pose;
  const bool squeezing = sc.motion.type == MotionType::Squeeze;
  const Vector2d rig_v = sc.motion.direction * sc.motion.speed;
  double closed_by = 0.0;
  double pushed = 0.0;
  double t = 0.0;
  int step = 0;

  const auto record = [&](const StepOutcome& o) {
    StepRecord s;
    s.t = t;
    s.object = obj;
    s.pusher = rig;
    s.V = o.V;
    s.modes = o.modes;
    s.forces = o.forces;
    rec.steps.push_back(std::move(s));
  };

  for (; step < sc.max_steps; ++step) {
    if (sc.motion.type == MotionType::Push && pushed >= sc.motion.distance) break;
    if (squeezing && closed_by >= sc.pusher.separation) break;

    if (sc.stochastic.enabled && sc.stochastic.redraw == Redraw::PerStep && step > 0) {
      surface = sample_surface(sc.surface, sc.stochastic.cfg, rng);
      mu = sample_mu_c(sc.stochastic.cfg, rng);
    }

    PusherGeometry pusher = make_pusher(sc.pusher, sc.motion, closed_by);
    pusher.rig_velocity = rig_v;

    std::vector<ContactPoint> contacts;
    try {
      contacts = detect_contacts(sc.shape, obj, pusher, rig, sc.tol,
                                 sc.max_penetration);
      double deepest = 0.0;
      const ContactPoint* worst = nullptr;
      for (const auto& c : contacts)
        if (c.depth > deepest) {
          deepest = c.depth;
          worst = &c;
        }
      if (worst && deepest > 1e-9) {
        const Vector2d shift = obj.rotation() * (worst->n * deepest);
        obj.x += shift.x();
        obj.y += shift.y();
        contacts = detect_contacts(sc.shape, obj, pusher, rig, sc.tol,
                                   sc.max_penetration);
      }
    } catch (OverlapError& e) {
      e.step = step;
      throw;
    }

    if (squeezing && contacts.empty() &&
        sc.pusher.separation - closed_by < sc.shape.min_width()) {
      rec.status = RolloutStatus::Escaped;
      record({});
      break;
    }

    for (auto& c : contacts) c.mu_c = mu;
    const StepOutcome o = resolve_step(surface, contacts);
    if (o.jammed) {
      rec.status = squeezing && opposed_across_elements(contacts)
                       ? RolloutStatus::Grasped
                       : RolloutStatus::Jammed;
      record(o);
      break;
    }

    if (step % sc.record_stride == 0) record(o);

    obj = integrate_pose(obj, o.V, sc.dt);
    rig = integrate_pose(rig, {rig_v.x(), rig_v.y(), 0.0}, sc.dt);
    if (squeezing) closed_by += sc.motion.closing_speed * sc.dt;
    if (sc.motion.type == MotionType::Push) pushed += sc.motion.speed * sc.dt;
    t += sc.dt;
  }

  rec.n_steps = step;
  rec.total_time = t;
  rec.final_object = obj;
  rec.final_pusher = rig;
  StepRecord last;
  last.t = t;
  last.object = obj;
  last.pusher = rig;
  rec.steps.push_back(std::move(last));
  return rec;
}

double goal_deviation(const Pose& q, const GoalSpec& goal, double rho) {
  if (goal.ignore_theta)
    return std::hypot(q.x - goal.pose.x, q.y - goal.pose.y);
  return pose_deviation(q, goal.pose, rho);
}

BatchResult run_batch(const Scenario& sc, int n, int n_threads) {
  if (n < 1) throw ConfigError("batch size must be positive");

  GoalSpec goal = sc.goal;
  if (goal.enabled && goal.auto_from_nominal) {
    Scenario nominal = sc;
    nominal.stochastic.enabled = false;
    Pose start;
    start.x = sc.init.center.x();
    start.y = sc.init.center.y();
    const auto base = run_rollout(nominal, start, substream(sc.seed, 0));
    goal.pose = base.final_object;
  }

  BatchResult out;
  out.records.resize(n);
  std::vector<std::exception_ptr> errors(n);

  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int nt = std::clamp(n_threads > 0 ? n_threads : hw, 1, std::max(1, n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        std::mt19937_64 rng = substream(sc.seed, static_cast<std::uint64_t>(i) + 1);
        const Pose start = sc.init.nth(i, rng);
        out.records[i] = run_rollout(sc, start, std::move(rng));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int k = 0; k < nt; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  auto& sum = out.summary;
  sum.has_goal = goal.enabled;
  sum.goal = goal.pose;
  Vector3d mean = Vector3d::Zero();
  for (auto& r : out.records) {
    sum.status_counts[static_cast<int>(r.status)]++;
    if (goal.enabled) {
      r.converged = goal_deviation(r.final_object, goal, sc.shape.rho()) <
                    goal.threshold;
      if (r.converged) sum.n_converged++;
    }
    mean += Vector3d(r.final_object.x, r.final_object.y, r.final_object.theta);
  }
  mean /= n;
  sum.final_mean = mean;
  for (const auto& r : out.records) {
    const Vector3d d =
        Vector3d(r.final_object.x, r.final_object.y, r.final_object.theta) - mean;
    sum.final_covariance += d * d.transpose();
  }
  if (n > 1) sum.final_covariance /= (n - 1);
  return out;
}

}  // namespace pushsim
