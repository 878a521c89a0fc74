#include "pushsim/outputs.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "pushsim/errors.hpp"

namespace pushsim {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Histogram make_histogram(const std::vector<double>& data, int bins) {
  Histogram h;
  h.counts.assign(bins, 0);
  if (data.empty()) return h;
  h.lo = *std::min_element(data.begin(), data.end());
  h.hi = *std::max_element(data.begin(), data.end());
  if (h.hi <= h.lo) {
    h.counts[bins / 2] = static_cast<int>(data.size());
    return h;
  }
  for (const double v : data) {
    int b = static_cast<int>((v - h.lo) / (h.hi - h.lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    h.counts[b]++;
  }
  return h;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + p.string());
  return f;
}

const char* mode_code(ContactMode m) {
  switch (m) {
    case ContactMode::Sticking: return "K";
    case ContactMode::SlideLeft: return "L";
    case ContactMode::SlideRight: return "R";
    case ContactMode::Separating: return "S";
  }
  return "?";
}

void write_trajectories_csv(const BatchResult& batch,
                            const std::filesystem::path& dir) {
  auto f = open_out(dir / "trajectories.csv");
  f << "rollout,t_s,x_mm,y_mm,theta_rad,pusher_x_mm,pusher_y_mm,pusher_theta_rad,"
       "vx_mm_s,vy_mm_s,omega_rad_s,modes\n";
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    for (const auto& s : batch.records[i].steps) {
      f << i << ',' << format_double(s.t) << ',' << format_double(s.object.x) << ','
        << format_double(s.object.y) << ',' << format_double(s.object.theta) << ','
        << format_double(s.pusher.x) << ',' << format_double(s.pusher.y) << ','
        << format_double(s.pusher.theta) << ',' << format_double(s.V.vx) << ','
        << format_double(s.V.vy) << ',' << format_double(s.V.omega) << ',';
      for (std::size_t k = 0; k < s.modes.size(); ++k) {
        if (k) f << ';';
        f << mode_code(s.modes[k]);
      }
      f << '\n';
    }
  }
}

void write_final_poses_csv(const BatchResult& batch,
                           const std::filesystem::path& dir) {
  auto f = open_out(dir / "final_poses.csv");
  f << "x_mm,y_mm,theta_rad\n";
  for (const auto& r : batch.records)
    f << format_double(r.final_object.x) << ',' << format_double(r.final_object.y)
      << ',' << format_double(r.final_object.theta) << '\n';
}

void write_rollouts_csv(const BatchResult& batch, const std::filesystem::path& dir) {
  auto f = open_out(dir / "rollouts.csv");
  f << "rollout,initial_x_mm,initial_y_mm,initial_theta_rad,final_x_mm,final_y_mm,"
       "final_theta_rad,status,converged,steps\n";
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    const auto& r = batch.records[i];
    f << i << ',' << format_double(r.initial_object.x) << ','
      << format_double(r.initial_object.y) << ','
      << format_double(r.initial_object.theta) << ','
      << format_double(r.final_object.x) << ',' << format_double(r.final_object.y)
      << ',' << format_double(r.final_object.theta) << ',' << to_string(r.status)
      << ',' << (r.converged ? 1 : 0) << ',' << r.n_steps << '\n';
  }
}

nlohmann::json histogram_json(const Histogram& h) {
  return {{"min", h.lo}, {"max", h.hi}, {"bins", h.counts}};
}

void write_histogram_json(const BatchResult& batch,
                          const std::filesystem::path& dir) {
  std::vector<double> dx, dy, dth;
  for (const auto& r : batch.records) {
    dx.push_back(r.final_object.x - r.initial_object.x);
    dy.push_back(r.final_object.y - r.initial_object.y);
    dth.push_back(normalize_angle(r.final_object.theta - r.initial_object.theta));
  }
  nlohmann::json j;
  j["n"] = batch.records.size();
  j["bin_count"] = 50;
  j["dx_mm"] = histogram_json(make_histogram(dx));
  j["dy_mm"] = histogram_json(make_histogram(dy));
  j["dtheta_rad"] = histogram_json(make_histogram(dth));
  auto f = open_out(dir / "histogram.json");
  f << j.dump(2) << '\n';
}

void write_summary_json(const BatchResult& batch, const std::filesystem::path& dir) {
  const auto& s = batch.summary;
  nlohmann::json j;
  j["n"] = batch.records.size();
  j["status_counts"] = {{"Completed", s.status_counts[0]},
                        {"Jammed", s.status_counts[1]},
                        {"Grasped", s.status_counts[2]},
                        {"Escaped", s.status_counts[3]}};
  j["final_mean"] = {s.final_mean[0], s.final_mean[1], s.final_mean[2]};
  auto cov = nlohmann::json::array();
  for (int r = 0; r < 3; ++r)
    cov.push_back({s.final_covariance(r, 0), s.final_covariance(r, 1),
                   s.final_covariance(r, 2)});
  j["final_covariance"] = cov;
  if (s.has_goal) {
    j["goal"] = {s.goal.x, s.goal.y, s.goal.theta};
    j["n_converged"] = s.n_converged;
  }
  auto f = open_out(dir / "summary.json");
  f << j.dump(2) << '\n';
}

void write_svg(const BatchResult& batch, const std::filesystem::path& dir) {
  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  bool first = true;
  for (const auto& r : batch.records)
    for (const auto& s : r.steps) {
      if (first) {
        lo_x = hi_x = s.object.x;
        lo_y = hi_y = s.object.y;
        first = false;
      }
      lo_x = std::min(lo_x, s.object.x);
      hi_x = std::max(hi_x, s.object.x);
      lo_y = std::min(lo_y, s.object.y);
      hi_y = std::max(hi_y, s.object.y);
    }
  const double pad = 0.05 * std::max({hi_x - lo_x, hi_y - lo_y, 1.0});
  auto f = open_out(dir / "trajectories.svg");
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
    << format_double(lo_x - pad) << ' ' << format_double(-(hi_y + pad)) << ' '
    << format_double(hi_x - lo_x + 2 * pad) << ' '
    << format_double(hi_y - lo_y + 2 * pad) << "\">\n";
  for (const auto& r : batch.records) {
    f << "<polyline fill=\"none\" stroke=\"#4477aa\" stroke-width=\""
      << format_double(pad * 0.05) << "\" points=\"";
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
      if (k) f << ' ';
      f << format_double(r.steps[k].object.x) << ','
        << format_double(-r.steps[k].object.y);
    }
    f << "\"/>\n";
  }
  for (const auto& r : batch.records)
    f << "<circle cx=\"" << format_double(r.final_object.x) << "\" cy=\""
      << format_double(-r.final_object.y) << "\" r=\"" << format_double(pad * 0.15)
      << "\" fill=\"#cc3311\"/>\n";
  f << "</svg>\n";
}

}  // namespace

void emit_outputs(const BatchResult& batch, const std::vector<std::string>& formats,
                  const std::string& out_dir) {
  if (formats.empty()) return;
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output dir: " + dir.string());
  for (const auto& fmt : formats) {
    if (fmt == "csv") {
      write_trajectories_csv(batch, dir);
      write_final_poses_csv(batch, dir);
      write_rollouts_csv(batch, dir);
    } else if (fmt == "json") {
      write_histogram_json(batch, dir);
      write_summary_json(batch, dir);
    } else if (fmt == "svg") {
      write_svg(batch, dir);
    } else {
      throw ConfigError("unknown output format: " + fmt);
    }
  }
}

}  // namespace pushsim
