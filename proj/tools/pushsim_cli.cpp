#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pushsim/errors.hpp"
#include "pushsim/outputs.hpp"
#include "pushsim/quartic_gram.hpp"
#include "pushsim/rollout.hpp"
#include "pushsim/scenario.hpp"
#include "pushsim/stochastic.hpp"
#include "pushsim/support_oracle.hpp"

namespace {

using namespace pushsim;

constexpr int kExitConfig = 2;
constexpr int kExitSim = 3;

std::vector<std::string> split_formats(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_simulate(const std::string& scenario_path, int n, std::uint64_t seed,
                 bool seed_set, const std::string& out_dir,
                 const std::string& formats, int threads) {
  Scenario sc = load_scenario(scenario_path);
  if (seed_set) sc.seed = seed;
  if (n <= 0) n = sc.init.explicit_list ? static_cast<int>(sc.init.poses.size()) : 100;

  const BatchResult batch = run_batch(sc, n, threads);
  emit_outputs(batch, split_formats(formats), out_dir);

  const auto& s = batch.summary;
  std::cout << sc.name << ": " << n << " rollouts\n"
            << "  Completed " << s.status_counts[0] << ", Jammed "
            << s.status_counts[1] << ", Grasped " << s.status_counts[2]
            << ", Escaped " << s.status_counts[3] << "\n"
            << "  final pose mean (" << format_double(s.final_mean[0]) << ", "
            << format_double(s.final_mean[1]) << ", "
            << format_double(s.final_mean[2]) << ")\n";
  if (s.has_goal)
    std::cout << "  converged " << s.n_converged << "/" << n << "\n";
  return 0;
}

void write_pairs_csv(const std::vector<WrenchTwistPair>& pairs,
                     const Normalization& norm, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << "fx,fy,tau,vx,vy,omega\n";
  for (const auto& p : pairs) {
    f << format_double(p.F[0]) << ',' << format_double(p.F[1]) << ','
      << format_double(p.F[2]) << ',' << format_double(p.V[0]) << ','
      << format_double(p.V[1]) << ',' << format_double(p.V[2]) << '\n';
  }
  nlohmann::json meta{{"f_max", norm.f_max}, {"tau_max", norm.tau_max}};
  std::ofstream m(path + ".meta.json", std::ios::binary);
  if (!m) throw IoError("cannot open for writing: " + path + ".meta.json");
  m << meta.dump(2) << '\n';
}

std::vector<WrenchTwistPair> read_pairs_csv(const std::string& path,
                                            Normalization* norm) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open pairs file: " + path);
  std::vector<WrenchTwistPair> pairs;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (first && line.find("fx") != std::string::npos) {
      first = false;
      continue;
    }
    first = false;
    std::stringstream ss(line);
    std::string cell;
    double v[6];
    for (int i = 0; i < 6; ++i) {
      if (!std::getline(ss, cell, ','))
        throw IoError("pairs row needs 6 columns: " + line);
      v[i] = std::stod(cell);
    }
    pairs.push_back({Vector3d(v[0], v[1], v[2]), Vector3d(v[3], v[4], v[5])});
  }
  std::ifstream m(path + ".meta.json");
  if (m) {
    nlohmann::json j = nlohmann::json::parse(m);
    norm->f_max = j.value("f_max", 1.0);
    norm->tau_max = j.value("tau_max", 1.0);
  }
  return pairs;
}

int cmd_gen_pairs(const std::string& support_path, int n, std::uint64_t seed,
                  const std::string& out) {
  const SupportModel s = load_support(support_path);
  double tau_max = 0.0;
  for (std::size_t i = 0; i < s.points.size(); ++i)
    tau_max += s.weights[i] * s.points[i].norm();
  std::mt19937_64 rng = substream(seed, 0);
  const auto pairs = generate_pairs(s, n, tau_max, rng);
  write_pairs_csv(pairs, Normalization{1.0, tau_max}, out);
  std::cout << "wrote " << pairs.size() << " pairs to " << out << "\n";
  return 0;
}

int cmd_fit_quadratic(const std::string& pairs_path, const std::string& out) {
  Normalization norm;
  const auto pairs = read_pairs_csv(pairs_path, &norm);
  const QuadraticLS q = fit_quadratic(pairs, norm);
  save_limit_surface(LimitSurface(q), out);
  double worst = 0.0;
  for (const auto& p : pairs) {
    const Vector3d g = (q.A * p.F).normalized();
    worst = std::max(worst, (g - p.V.normalized()).norm());
  }
  std::cout << "fitted quadratic from " << pairs.size()
            << " pairs, worst direction residual " << format_double(worst) << "\n";
  return 0;
}

int cmd_validate(const std::string& ls_path) {
  const LimitSurface ls = load_limit_surface(ls_path);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int d = ls.degree();
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
    if (!ok) ++failures;
  };

  double euler1 = 0.0, euler2 = 0.0, roundtrip = 0.0, min_eig = 1e300;
  for (int i = 0; i < 500; ++i) {
    Vector3d F(gauss(rng), gauss(rng), gauss(rng));
    F = project_to_unit_level(ls, F);
    const double h = ls_eval(ls, F);
    const Vector3d g = ls_gradient(ls, F);
    const Matrix3d hess = ls_hessian(ls, F);
    euler1 = std::max(euler1, std::abs(F.dot(g) - d * h));
    euler2 = std::max(euler2, (hess * F - (d - 1) * g).norm());
    Eigen::SelfAdjointEigenSolver<Matrix3d> es(hess);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    const Vector3d back = wrench_of_twist(ls, twist_of_wrench(ls, F));
    roundtrip = std::max(roundtrip, (back - F).norm());
  }
  check("unit-level evaluations finite and positive", true);
  check("Euler identity F.grad = d H (< 1e-10)", euler1 < 1e-10);
  check("Euler identity H'' F = (d-1) grad (< 1e-10)", euler2 < 1e-10);
  check("Hessian PSD on unit level (>= -1e-10)", min_eig >= -1e-10);
  check("dual map roundtrip (< 1e-6)", roundtrip < 1e-6);
  std::cout << (failures == 0 ? "valid" : "invalid") << ": " << ls_path << "\n";
  return failures == 0 ? 0 : kExitSim;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-static planar pushing and grasping simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", formats = "csv,json";
  std::string support_path, pairs_path, ls_path, out_file;
  int n = 0, threads = 0;
  std::uint64_t seed = 0;

  auto* sim = app.add_subcommand("simulate", "run scenario rollouts");
  sim->add_option("--scenario", scenario_path, "scenario JSON")->required();
  sim->add_option("--n", n, "number of rollouts");
  auto* seed_opt = sim->add_option("--seed", seed, "RNG seed override");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--formats", formats, "comma list: csv,json,svg");
  sim->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* gen = app.add_subcommand("gen-pairs", "sample oracle wrench-twist pairs");
  gen->add_option("--support", support_path, "support model JSON")->required();
  gen->add_option("--n", n, "number of pairs")->required();
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--out", out_file, "output CSV")->required();

  auto* fit = app.add_subcommand("fit-quadratic", "fit an ellipsoid to pairs");
  fit->add_option("--pairs", pairs_path, "pairs CSV")->required();
  fit->add_option("--out", out_file, "limit surface JSON")->required();

  auto* val = app.add_subcommand("validate", "check a limit-surface file");
  val->add_option("--ls", ls_path, "limit surface JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(scenario_path, n, seed, seed_opt->count() > 0, out_dir,
                          formats, threads);
    if (gen->parsed()) return cmd_gen_pairs(support_path, n, seed, out_file);
    if (fit->parsed()) return cmd_fit_quadratic(pairs_path, out_file);
    if (val->parsed()) return cmd_validate(ls_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const OverlapError& e) {
    std::cerr << "simulation error at step " << e.step << ": " << e.what() << "\n";
    return kExitSim;
  } catch (const SimError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitSim;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSim;
  }
  return kExitConfig;
}
