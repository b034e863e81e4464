/*
 * Copyright 2026 The maml-lqr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Acceptance checks. Each criterion prints one PASS/FAIL line; pass a number to
// run a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "experiment/commands.hpp"
#include "experiment/config.hpp"
#include "maml_lqr/maml_lqr.hpp"
#include "support/random_tasks.hpp"
#include "support/scalar_oracle.hpp"

namespace {

using namespace maml_lqr;
using namespace maml_lqr::experiment;
using nlohmann::json;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string yes(bool b) { return b ? "yes" : "no"; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("maml_lqr_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  if (flo * f(hi) > 0) return std::nan("");
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// 1. Riccati oracle
Outcome riccati_oracle() {
  const double s5 = std::sqrt(5.0);
  const LqrTask task = LqrTask::scalar(1, 1, 2, 2, 1);
  const RiccatiSolution sol = solve_riccati(task);
  const double p_err = std::abs(sol.P(0, 0) - (1 + s5));
  const double w_err = std::abs(sol.w_star.gain()(0, 0) - (1 + s5) / (3 + s5));
  const double g = cost_gradient(task, sol.w_star).norm();
  return {p_err < 1e-10 && w_err < 1e-10 && g < 1e-8,
          "|P-(1+sqrt5)|=" + num(p_err) + " |W*-ref|=" + num(w_err) + " |grad|=" + num(g)};
}

// 2. Gradient correctness
Outcome gradient_correctness() {
  std::mt19937_64 rng(20260415);
  std::uniform_int_distribution<int> dim(1, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = dim(rng), r = dim(rng);
    const auto [task, w] = testing::random_stable_pair(rng, d, r);
    const Matrix g = cost_gradient(task, w);
    const double h = 1e-6 * std::max(1.0, w.gain().norm());
    Matrix fd(w.rows(), w.cols());
    for (Eigen::Index k = 0; k < w.gain().size(); ++k) {
      Matrix plus = w.gain(), minus = w.gain();
      plus.data()[k] += h;
      minus.data()[k] -= h;
      fd.data()[k] =
          (eval_cost(task, Policy(plus)).value - eval_cost(task, Policy(minus)).value) / (2 * h);
    }
    worst = std::max(worst, (g - fd).norm() / g.norm());
  }
  return {worst < 1e-6, "100 pairs, max relative error " + num(worst)};
}

// 3. Single-task landscape: three equal strict minima
Outcome single_task_minima() {
  const ExperimentConfig cfg = preset_config("fig1");
  const LandscapeReport rep =
      analyze_landscape(maml_objective(cfg.taskset(), cfg.maml), cfg.grid, cfg.search_options());
  std::vector<StationaryPoint> mins;
  for (const auto& p : rep.points)
    if (p.kind == StationaryKind::local_min) mins.push_back(p);
  if (mins.size() != 3) return {false, "found " + std::to_string(mins.size()) + " local minima"};

  double vmin = mins[0].value, vmax = mins[0].value;
  for (const auto& p : mins) {
    vmin = std::min(vmin, p.value);
    vmax = std::max(vmax, p.value);
  }
  const double spread = (vmax - vmin) / vmin;
  const testing::ScalarTask ref{1, 1, 2, 2, 1};
  const double ws = testing::scalar_wstar(ref);
  const double eta = cfg.maml.eta;
  const auto fixed_point = [&](double w) { return w - eta * testing::scalar_dcost(ref, w) - ws; };
  const double left_root = bisect(fixed_point, 0.10, 0.15);
  const double right_root = bisect(fixed_point, 1.75, 1.80);
  const double w0 = mins[0].w.gain()(0, 0), w1 = mins[1].w.gain()(0, 0),
               w2 = mins[2].w.gain()(0, 0);
  const bool brackets = w0 > 0.10 && w0 < 0.15 && w2 > 1.75 && w2 < 1.80 &&
                        std::abs(w0 - left_root) < 1e-6 && std::abs(w2 - right_root) < 1e-6;
  const bool pass = spread < 1e-6 && std::abs(w1 - ws) < 1e-4 && brackets;
  return {pass, "minima at " + num(w0) + ", " + num(w1) + ", " + num(w2) + " (bisection roots " +
                    num(left_root) + ", " + num(right_root) + "), value spread " + num(spread)};
}

// 4. Two scaled tasks, vanilla: spurious minima
Outcome two_task_spurious() {
  const ExperimentConfig cfg = preset_config("fig2");
  const LandscapeReport rep =
      analyze_landscape(maml_objective(cfg.taskset(), cfg.maml), cfg.grid, cfg.search_options());
  const double threshold = 1e-3 * rep.global_min_value;
  std::ostringstream sink;
  const json train = cmd_train(cfg, scratch("c4"), sink);
  std::size_t spurious = 0;
  for (const json& run : train["runs"]) {
    if (run["stop_reason"] != "grad_tol") continue;
    if (run["final_value"].get<double>() - rep.global_min_value > threshold) ++spurious;
  }
  const bool pass = rep.epsilon_gap > threshold && train["runs"].size() == 20 && spurious >= 1;
  return {pass, "epsilon_gap " + num(rep.epsilon_gap) + " vs " + num(threshold) + "; " +
                    std::to_string(spurious) + "/20 runs end at a spurious minimum"};
}

// 5. Normalized variant restores globality
Outcome normalized_rescue() {
  ExperimentConfig cfg = preset_config("fig2");
  cfg.maml.variant = MamlVariant::normalized;
  const Objective obj = maml_objective(cfg.taskset(), cfg.maml);
  const LandscapeReport rep = analyze_landscape(obj, cfg.grid, cfg.search_options());
  const bool gap_ok = rep.epsilon_gap < 1e-6 * rep.global_min_value;

  // Both tasks are (1,1,2,2,1) with costs scaled by 1 and 0.05.
  const testing::ScalarTask base{1, 1, 2, 2, 1};
  const double alpha_bar = 0.5 * 1.0 + 0.5 * 0.05;
  double worst = 0.0;
  std::size_t mismatched = 0, compared = 0;
  for (std::size_t i = 0; i < cfg.grid.point_count(); ++i) {
    const double w = cfg.grid.point(i)(0, 0);
    const auto v = obj.value(cfg.grid.point(i));
    const double g = testing::scalar_dcost(base, w);
    const double ref = alpha_bar * testing::scalar_cost(base, w - cfg.maml.eta * g / std::abs(g));
    const bool ref_defined = testing::scalar_stable(base, w) && std::isfinite(ref);
    if (v.has_value() != ref_defined) {
      ++mismatched;
      continue;
    }
    if (!v) continue;
    ++compared;
    worst = std::max(worst, std::abs(*v - ref) / std::abs(ref));
  }
  const bool pass = gap_ok && worst < 1e-10 && mismatched == 0 && compared > 0;
  return {pass, "epsilon_gap " + num(rep.epsilon_gap) + "; pointwise identity on " +
                    std::to_string(compared) + " points, max relative error " + num(worst) +
                    ", " + std::to_string(mismatched) + " definedness mismatches"};
}

// 6. Certified training runs reach the global value
Outcome certified_runs() {
  const ExperimentConfig cfg = preset_config("fig1");
  std::ostringstream sink;
  const json train = cmd_train(cfg, scratch("c6"), sink);
  const double global = train["scan_global_min"].get<double>();
  std::size_t certified = 0, ok = 0;
  double worst = 0.0;
  for (const json& run : train["runs"]) {
    if (run["certificate"] != "certified") continue;
    ++certified;
    const double rel = std::abs(run["final_value"].get<double>() - global) / std::abs(global);
    worst = std::max(worst, rel);
    if (rel <= 1e-5) ++ok;
  }
  const bool pass = train["runs"].size() == 20 && certified > 0 && ok == certified;
  return {pass, std::to_string(certified) + "/20 runs certified, " + std::to_string(ok) +
                    " within 1e-5 of the scan minimum (worst " + num(worst) + ")"};
}

// 7. Perturbation robustness
Outcome perturbation_robustness() {
  const ExperimentConfig cfg = preset_config("fig3a");
  const LandscapeReport rep =
      analyze_landscape(maml_objective(cfg.taskset(), cfg.maml), cfg.grid, cfg.search_options());
  const bool base_ok = rep.epsilon_gap <= 1e-3 * rep.global_min_value && rep.assumption1_ok;

  const SweepSpec spec{0.04, 5, 20, cfg.seed};
  const auto reports = perturb_sweep(cfg.sweep->base, spec, cfg.maml, cfg.grid, cfg.search_options());
  double max_gap = 0.0;
  std::size_t within = 0;
  for (const LandscapeReport& r : reports) {
    max_gap = std::max(max_gap, r.epsilon_gap);
    if (r.epsilon_gap <= 1e-2 * r.global_min_value) ++within;
  }
  const bool pass = base_ok && reports.size() == 20 && within >= 18;
  return {pass, "preset epsilon_gap " + num(rep.epsilon_gap) + " (limit " +
                    num(1e-3 * rep.global_min_value) + "), assumption1_ok " +
                    yes(rep.assumption1_ok) + "; sweep max gap " + num(max_gap) + ", " +
                    std::to_string(within) + "/20 trials within 1e-2 relative"};
}

// 8. Many tasks, shared dynamics: argmins and per-task gradients
Outcome shared_dynamics_argmins() {
  const ExperimentConfig many = preset_config("fig3d");
  const ArgminComparison a =
      compare_argmins(many.taskset(), many.maml, many.grid, many.search_options());
  const ExperimentConfig two = preset_config("fig3b");
  const ArgminComparison b =
      compare_argmins(two.taskset(), two.maml, two.grid, two.search_options());
  bool far = b.task_grad_norms.size() == 2;
  std::string norms;
  for (double g : b.task_grad_norms) {
    far = far && g > 10 * 1e-8;
    norms += (norms.empty() ? "" : ", ") + num(g);
  }
  const bool pass = std::isfinite(a.distance) && far;
  return {pass, "11-task argmin distance " + num(a.distance) + " (MAML " +
                    num(a.maml_argmin.gain()(0, 0)) + ", average cost " +
                    num(a.average_argmin.gain()(0, 0)) + "); 2-task gradient norms at the MAML argmin: " +
                    norms};
}

// 9. Scaling invariances
Outcome scaling_invariances() {
  // Powers of two keep every intermediate product exact.
  bool exact = true;
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [task, w] = testing::random_stable_pair(rng, 2, 2);
    for (double alpha : {0.25, 4.0}) {
      MamlConfig scaled_cfg, base_cfg;
      scaled_cfg.eta = 0.01;
      base_cfg.eta = alpha * 0.01;
      exact = exact && adapt(task.with_scaled_cost(alpha), w, scaled_cfg) == adapt(task, w, base_cfg);
    }
  }
  const testing::ScalarTask ref{1, 1, 2, 2, 1};
  for (double w = 0.2; w < 1.9; w += 0.1) {
    MamlConfig scaled_cfg, base_cfg;
    scaled_cfg.eta = 0.01;
    base_cfg.eta = 4.0 * 0.01;
    exact = exact && adapt(LqrTask::scalar(1, 1, 8, 8, 1), Policy::scalar(w), scaled_cfg) ==
                         adapt(LqrTask::scalar(1, 1, 2, 2, 1), Policy::scalar(w), base_cfg);
  }

  const ExperimentConfig cfg = preset_config("fig2");
  const LandscapeReport base =
      analyze_landscape(maml_objective(cfg.taskset(), cfg.maml), cfg.grid, cfg.search_options());
  double worst = 0.0;
  for (double alpha : {3.0, 0.2}) {
    std::vector<LqrTask> tasks;
    for (const LqrTask& t : cfg.tasks) tasks.push_back(t.with_scaled_cost(alpha));
    MamlConfig mc = cfg.maml;
    mc.eta /= alpha;
    const LandscapeReport scaled = analyze_landscape(maml_objective(TaskSet::uniform(tasks), mc),
                                                     cfg.grid, cfg.search_options());
    worst = std::max(worst, std::abs(scaled.epsilon_gap - alpha * base.epsilon_gap) /
                                (alpha * base.epsilon_gap));
  }
  return {exact && worst < 1e-9, "adapt equivalence exact: " + yes(exact) +
                                     "; epsilon_gap scaling max relative error " + num(worst)};
}

// 10. CLI contract
int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(MAML_LQR_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string strip_timestamp(const fs::path& p) {
  json j = json::parse(slurp(p));
  j["metadata"].erase("timestamp");
  return j.dump();
}

Outcome cli_contract() {
  const fs::path dir = scratch("c10");
  bool round_trip = true;
  for (const Preset& p : presets()) {
    const fs::path dump = dir / (p.name + ".json");
    round_trip = round_trip && run_cli("presets --preset " + p.name, dump) == 0 &&
                 load_config(dump.string()) == p.config;
  }

  bool reproducible = true;
  const std::vector<std::string> commands = {"scan", "landscape", "train --runs 5"};
  const std::vector<std::vector<std::string>> files = {
      {"scan.csv", "scan.json"}, {"landscape.json"}, {"train_iterates.csv", "train.json"}};
  for (std::size_t c = 0; c < commands.size(); ++c) {
    const fs::path a = dir / ("a" + std::to_string(c)), b = dir / ("b" + std::to_string(c));
    for (const fs::path& out : {a, b}) {
      reproducible = reproducible &&
                     run_cli(commands[c] + " --preset fig2 --seed 11 --out " + out.string(),
                             out.string() + ".log") == 0;
    }
    for (const std::string& f : files[c]) {
      if (f.ends_with(".csv")) {
        reproducible = reproducible && slurp(a / f) == slurp(b / f) && !slurp(a / f).empty();
      } else {
        reproducible = reproducible && strip_timestamp(a / f) == strip_timestamp(b / f);
      }
    }
  }

  std::ofstream(dir / "bad.json") << R"({"tasks": [], "maml": {"eta": 0.01}})";
  const int ok_code = run_cli("presets", dir / "log");
  const int config_code = run_cli("scan --config " + (dir / "bad.json").string(), dir / "log");
  const int unknown_code = run_cli("scan --preset nope", dir / "log");
  const int numeric_code =
      run_cli("landscape --preset fig1 --grid 1.95,1.99,11 --out " + (dir / "n").string(),
              dir / "log");
  const bool codes = ok_code == 0 && config_code == 2 && unknown_code == 2 && numeric_code == 3;
  return {round_trip && reproducible && codes,
          "presets round-trip " + yes(round_trip) + ", byte-reproducible " + yes(reproducible) +
              ", exit codes " + std::to_string(ok_code) + "/" + std::to_string(config_code) + "/" +
              std::to_string(unknown_code) + "/" + std::to_string(numeric_code)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  Outcome (*check)();
};

const Criterion kCriteria[] = {
    {1, "Riccati oracle", 1, riccati_oracle},
    {2, "gradient correctness", 10, gradient_correctness},
    {3, "single-task landscape has three equal minima", 30, single_task_minima},
    {4, "scaled task pair is spurious under vanilla MAML", 60, two_task_spurious},
    {5, "normalized variant restores globality", 30, normalized_rescue},
    {6, "certified training runs reach the global value", 60, certified_runs},
    {7, "perturbation robustness", 300, perturbation_robustness},
    {8, "shared-dynamics argmins", 60, shared_dynamics_argmins},
    {9, "scaling invariances", 5, scaling_invariances},
    {10, "CLI contract", 10, cli_contract},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (only && c.id != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("criterion %d [%s]: %s - %s (%.2fs, budget %.0fs%s)\n", c.id, c.name,
                pass ? "PASS" : "FAIL", out.detail.c_str(), secs, c.budget_s,
                in_time ? "" : ", over budget");
  }
  return failures == 0 ? 0 : 1;
}
