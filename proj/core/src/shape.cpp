#include "pushsim/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pushsim/errors.hpp"

namespace pushsim {

namespace {

bool segments_properly_intersect(const Vector2d& a, const Vector2d& b, const Vector2d& c,
                                 const Vector2d& d) {
  const double d1 = cross2(d - c, a - c);
  const double d2 = cross2(d - c, b - c);
  const double d3 = cross2(b - a, c - a);
  const double d4 = cross2(b - a, d - a);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

std::vector<Vector2d> convex_hull(std::vector<Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vector2d& a, const Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  const int n = static_cast<int>(pts.size());
  std::vector<Vector2d> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0)
      --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double hull_min_width(const std::vector<Vector2d>& hull) {
  const int n = static_cast<int>(hull.size());
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const Vector2d d = hull[(i + 1) % n] - hull[i];
    const double len = d.norm();
    if (len < 1e-12) continue;
    double farthest = 0.0;
    for (const auto& p : hull)
      farthest = std::max(farthest, std::abs(cross2(d, p - hull[i])) / len);
    best = std::min(best, farthest);
  }
  return best;
}

Vector2d closest_on_segment(const Vector2d& a, const Vector2d& b, const Vector2d& q,
                            double* t_out = nullptr) {
  const Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  double t = len2 > 0.0 ? std::clamp(d.dot(q - a) / len2, 0.0, 1.0) : 0.0;
  if (t_out) *t_out = t;
  return a + t * d;
}

void closest_between_segments(const Vector2d& p1, const Vector2d& p2, const Vector2d& q1,
                              const Vector2d& q2, Vector2d* on_p, Vector2d* on_q) {
  // Candidate pairs: each endpoint against the other segment.
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector2d& a, const Vector2d& b) {
    const double d = (a - b).squaredNorm();
    if (d < best) {
      best = d;
      *on_p = a;
      *on_q = b;
    }
  };
  consider(closest_on_segment(p1, p2, q1), q1);
  consider(closest_on_segment(p1, p2, q2), q2);
  consider(p1, closest_on_segment(q1, q2, p1));
  consider(p2, closest_on_segment(q1, q2, p2));
  if (segments_properly_intersect(p1, p2, q1, q2)) {
    const Vector2d d1 = p2 - p1, d2 = q2 - q1;
    const double denom = cross2(d1, d2);
    const double t = cross2(q1 - p1, d2) / denom;
    *on_p = *on_q = p1 + t * d1;
  }
}

}  // namespace

Shape::Shape(std::vector<Vector2d> vertices, double rho) : verts_(std::move(vertices)) {
  const int n = static_cast<int>(verts_.size());
  if (n < 3) throw ConfigError("shape needs at least 3 vertices");
  for (const auto& v : verts_)
    if (!v.allFinite()) throw ConfigError("shape vertex not finite");

  double a2 = 0.0;
  for (int i = 0; i < n; ++i) a2 += cross2(verts_[i], verts_[(i + 1) % n]);
  if (std::abs(a2) < 1e-12) throw ConfigError("shape has zero area");
  if (a2 < 0.0) std::reverse(verts_.begin(), verts_.end()), a2 = -a2;
  area_ = 0.5 * a2;

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_properly_intersect(verts_[i], verts_[(i + 1) % n], verts_[j],
                                      verts_[(j + 1) % n]))
        throw ConfigError("shape boundary self-intersects");
    }

  Vector2d c = Vector2d::Zero();
  double polar = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector2d &u = verts_[i], &v = verts_[(i + 1) % n];
    const double cr = cross2(u, v);
    c += cr * (u + v);
    polar += cr * (u.squaredNorm() + u.dot(v) + v.squaredNorm());
  }
  centroid_ = c / (6.0 * area_);
  polar /= 12.0;
  gyration_ = std::sqrt(std::max(0.0, polar / area_ - centroid_.squaredNorm()));
  rho_ = rho > 0.0 ? rho : gyration_;

  min_width_ = hull_min_width(convex_hull(verts_));
  for (const auto& v : verts_)
    max_radius_ = std::max(max_radius_, (v - centroid_).norm());
}

bool Shape::contains(const Vector2d& q) const {
  const int n = static_cast<int>(verts_.size());
  bool inside = false;
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Vector2d &vi = verts_[i], &vj = verts_[j];
    if ((vi.y() > q.y()) != (vj.y() > q.y()) &&
        q.x() < (vj.x() - vi.x()) * (q.y() - vi.y()) / (vj.y() - vi.y()) + vi.x())
      inside = !inside;
  }
  return inside;
}

Shape::BoundaryHit Shape::closest_boundary_point(const Vector2d& q) const {
  const int n = static_cast<int>(verts_.size());
  BoundaryHit hit;
  hit.distance = std::numeric_limits<double>::infinity();
  double t_best = 0.0;
  for (int i = 0; i < n; ++i) {
    double t;
    const Vector2d p = closest_on_segment(verts_[i], verts_[(i + 1) % n], q, &t);
    const double d = (p - q).norm();
    if (d < hit.distance) {
      hit.distance = d;
      hit.point = p;
      hit.edge = i;
      t_best = t;
    }
  }
  const auto inward = [&](int e) -> Vector2d {
    return perp((verts_[(e + 1) % n] - verts_[e]).normalized());
  };
  constexpr double kEnd = 1e-9;
  if (t_best > kEnd && t_best < 1.0 - kEnd) {
    hit.inward_normal = inward(hit.edge);
  } else {
    const int other = t_best <= kEnd ? (hit.edge + n - 1) % n : (hit.edge + 1) % n;
    Vector2d sum = inward(hit.edge) + inward(other);
    hit.inward_normal = sum.norm() > 1e-9 ? Vector2d(sum.normalized()) : inward(hit.edge);
  }
  return hit;
}

Shape rectangle_shape(double width, double height, double rho) {
  const double w = width / 2.0, h = height / 2.0;
  return Shape({{-w, -h}, {w, -h}, {w, h}, {-w, h}}, rho);
}

Shape disc_shape(double radius, int n, double rho) {
  std::vector<Vector2d> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * M_PI * i / n;
    v.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  return Shape(std::move(v), rho);
}

PusherGeometry point_pusher() {
  PusherGeometry g;
  g.elements.push_back({{Vector2d::Zero()}, Vector2d::Zero()});
  return g;
}

PusherGeometry two_point_pusher(double separation) {
  PusherGeometry g;
  g.elements.push_back({{Vector2d(0.0, separation / 2.0)}, Vector2d::Zero()});
  g.elements.push_back({{Vector2d(0.0, -separation / 2.0)}, Vector2d::Zero()});
  return g;
}

PusherGeometry parallel_jaw_pusher(double finger_length, double finger_thickness,
                                   double separation, double closing_speed) {
  const double l = finger_length / 2.0, s = separation / 2.0;
  PusherGeometry g;
  PusherElement upper;
  upper.verts = {{-l, s}, {l, s}, {l, s + finger_thickness}, {-l, s + finger_thickness}};
  upper.velocity = {0.0, -closing_speed / 2.0};
  PusherElement lower;
  lower.verts = {{-l, -s - finger_thickness}, {l, -s - finger_thickness}, {l, -s}, {-l, -s}};
  lower.velocity = {0.0, closing_speed / 2.0};
  g.elements = {upper, lower};
  return g;
}

namespace {

struct Candidate {
  Vector2d p;
  Vector2d n;
  double gap;    // signed: negative means penetration
  double depth;  // max(0, -gap)
};

void add_candidate(std::vector<Candidate>& out, const Vector2d& p, const Vector2d& n,
                   double gap) {
  out.push_back({p, n, gap, std::max(0.0, -gap)});
}

/// Scans one pusher-element segment against every object edge; near-parallel
/// touches contribute the two overlap endpoints, everything else the closest
/// pair on that edge.  `reach` bounds how deep a parallel-face candidate may
/// report penetration; edges on the far side of the object project onto the
/// segment too and must not read as overlap (real deep penetration is caught
/// by the vertex-inside pass instead).
void scan_segment(const Shape& object, const Vector2d& e0, const Vector2d& e1,
                  double tol, double reach, std::vector<Candidate>& out) {
  const auto& vs = object.vertices();
  const int n = static_cast<int>(vs.size());
  for (int i = 0; i < n; ++i) {
    const Vector2d &a = vs[i], &b = vs[(i + 1) % n];
    const Vector2d d = b - a;
    const double len = d.norm();
    if (len < 1e-12) continue;
    const Vector2d u = d / len;
    const Vector2d n_in = perp(u);
    const Vector2d de = e1 - e0;
    const bool parallel = std::abs(cross2(u, de)) <= 1e-6 * de.norm();

    if (parallel && de.norm() > 1e-12) {
      const double s0 = u.dot(e0 - a), s1 = u.dot(e1 - a);
      const double lo = std::max(0.0, std::min(s0, s1));
      const double hi = std::min(len, std::max(s0, s1));
      if (hi < lo) continue;
      for (const double s : {lo, hi}) {
        const Vector2d ob = a + s * u;
        const Vector2d el = closest_on_segment(e0, e1, ob);
        const double gap = -n_in.dot(el - ob);
        if (gap <= tol && gap >= -reach) add_candidate(out, ob, n_in, gap);
      }
      continue;
    }

    Vector2d ob, el;
    closest_between_segments(a, b, e0, e1, &ob, &el);
    const double dist = (ob - el).norm();
    if (dist > tol) continue;
    const double t_ob = u.dot(ob - a) / len;
    Vector2d normal = n_in;
    if (t_ob <= 1e-9 || t_ob >= 1.0 - 1e-9) {
      // Object corner against the element: the constraint acts along the
      // element face (or the corner gap), oriented into the object.  The
      // corner bisector only breaks the orientation tie.
      const Vector2d hint = object.closest_boundary_point(ob).inward_normal;
      if (dist > 1e-9)
        normal = (ob - el) / dist;
      else if (de.norm() > 1e-12)
        normal = perp(de).normalized();
      else
        normal = hint;
      if (normal.dot(hint) < 0.0) normal = -normal;
    }
    add_candidate(out, ob, normal, dist);
  }
}

}  // namespace

std::vector<ContactPoint> detect_contacts(const Shape& object, const Pose& object_pose,
                                          const PusherGeometry& pusher,
                                          const Pose& pusher_pose, double tol,
                                          double max_penetration) {
  const Matrix2d r_obj = object_pose.rotation();
  const Matrix2d r_push = pusher_pose.rotation();
  const Vector2d t_obj(object_pose.x, object_pose.y);
  const Vector2d t_push(pusher_pose.x, pusher_pose.y);
  auto to_body = [&](const Vector2d& p_pusher) -> Vector2d {
    return r_obj.transpose() * (r_push * p_pusher + t_push - t_obj);
  };

  std::vector<ContactPoint> contacts;
  for (std::size_t ei = 0; ei < pusher.elements.size(); ++ei) {
    const auto& elem = pusher.elements[ei];
    const Vector2d v_body =
        r_obj.transpose() * (pusher.rig_velocity + r_push * elem.velocity);

    std::vector<Vector2d> ev;
    ev.reserve(elem.verts.size());
    for (const auto& v : elem.verts) ev.push_back(to_body(v));

    std::vector<Candidate> cands;
    if (ev.size() == 1) {
      const auto hit = object.closest_boundary_point(ev[0]);
      const double gap = object.contains(ev[0]) ? -hit.distance : hit.distance;
      if (gap <= tol) add_candidate(cands, hit.point, hit.inward_normal, gap);
    } else {
      const int ne = static_cast<int>(ev.size());
      const int nseg = ne == 2 ? 1 : ne;
      for (int i = 0; i < nseg; ++i)
        scan_segment(object, ev[i], ev[(i + 1) % ne], tol, max_penetration + tol,
                     cands);

      for (const auto& v : ev)
        if (object.contains(v)) {
          const auto hit = object.closest_boundary_point(v);
          add_candidate(cands, hit.point, hit.inward_normal, -hit.distance);
        }
      if (ne >= 3) {
        Shape elem_shape(ev);
        for (const auto& ov : object.vertices())
          if (elem_shape.contains(ov)) {
            // The corner entered through the nearest element face; pushing
            // the object along that face's outward normal extracts it.
            const auto ehit = elem_shape.closest_boundary_point(ov);
            add_candidate(cands, ov, -ehit.inward_normal, -ehit.distance);
          }
      }
    }

    // Merge candidates closer than tol along the boundary to their midpoint,
    // keeping the deepest gap.
    std::vector<Candidate> merged;
    for (const auto& c : cands) {
      bool absorbed = false;
      for (auto& m : merged) {
        if ((m.p - c.p).norm() < tol) {
          m.p = 0.5 * (m.p + c.p);
          if (c.gap < m.gap) {
            m.gap = c.gap;
            m.depth = c.depth;
            m.n = c.n;
          }
          absorbed = true;
          break;
        }
      }
      if (!absorbed) merged.push_back(c);
    }

    for (const auto& m : merged) {
      if (m.depth > max_penetration)
        throw OverlapError("penetration exceeds limit at contact");
      ContactPoint cp;
      cp.p = m.p;
      cp.n = m.n;
      cp.v_p = v_body;
      cp.depth = m.depth;
      cp.element = static_cast<int>(ei);
      contacts.push_back(cp);
    }
  }

  std::sort(contacts.begin(), contacts.end(), [](const ContactPoint& a,
                                                 const ContactPoint& b) {
    if (a.p.x() != b.p.x()) return a.p.x() < b.p.x();
    return a.p.y() < b.p.y();
  });
  return contacts;
}

}  // namespace pushsim
