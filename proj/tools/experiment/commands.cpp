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

#include "experiment/commands.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace maml_lqr::experiment {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json metadata(const ExperimentConfig& cfg, const std::string& command) {
  return json{{"tool", "maml_lqr"},
              {"version", kToolVersion},
              {"command", command},
              {"config_hash", config_hash(cfg)},
              {"timestamp", utc_timestamp()}};
}

json grid_to_json(const ScanGrid& grid) {
  return json{{"lo", matrix_to_json(grid.lo)},
              {"hi", matrix_to_json(grid.hi)},
              {"resolution", grid.resolution}};
}

// Non-finite numbers become null so the documents stay valid JSON.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

fs::path prepare(const fs::path& out_dir) {
  fs::create_directories(out_dir);
  return out_dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

std::string csv_row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

void append_vec_cells(std::vector<std::string>& cells, const Matrix& w) {
  for (Eigen::Index j = 0; j < w.size(); ++j) cells.push_back(format_double(w.data()[j]));
}

std::vector<std::string> vec_headers(Eigen::Index n) {
  std::vector<std::string> h;
  for (Eigen::Index j = 1; j <= n; ++j) h.push_back("w_" + std::to_string(j));
  return h;
}

std::optional<double> scan_minimum(const ExperimentConfig& cfg) {
  if (cfg.grid.dims() > kMaxDenseScanDims) return std::nullopt;
  const ScanTable table = grid_scan(maml_objective(cfg.taskset(), cfg.maml), cfg.grid);
  const auto best = table.argmin();
  if (!best) return std::nullopt;
  return *table.values[*best];
}

std::string short_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = serialize_config(cfg).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

json report_to_json(const LandscapeReport& report) {
  json points = json::array();
  for (const StationaryPoint& p : report.points) {
    points.push_back(json{{"w", matrix_to_json(p.w.gain())},
                          {"value", p.value},
                          {"grad_norm", p.grad_norm},
                          {"hessian_eigs", p.hessian_eigs},
                          {"kind", std::string(to_string(p.kind))}});
  }
  const double scale = std::abs(report.global_min_value);
  return json{
      {"points", points},
      {"local_min_count", report.local_min_count()},
      {"global_min_value", report.global_min_value},
      {"global_minimizer", matrix_to_json(report.global_minimizer.gain())},
      {"epsilon_gap", report.epsilon_gap},
      {"relative_gap", scale > 0 ? json(report.epsilon_gap / scale) : json(nullptr)},
      {"is_global", report.is_global},
      {"spurious", !report.is_global},
      {"assumption1_ok", report.assumption1_ok},
      {"masked_fraction", report.masked_fraction},
      {"box", grid_to_json(report.box)},
  };
}

json cmd_scan(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  const TaskSet ts = cfg.taskset();
  const ScanTable table = grid_scan(maml_objective(ts, cfg.maml), cfg.grid);

  std::vector<TaskSet> singles;
  for (const LqrTask& t : ts.tasks()) singles.push_back(TaskSet::uniform({t}));

  std::vector<std::string> header = vec_headers(cfg.grid.dims());
  header.insert(header.end(), {"value", "defined"});
  for (std::size_t i = 1; i <= ts.size(); ++i) header.push_back("task_" + std::to_string(i));

  std::string csv = csv_row(header);
  for (std::size_t i = 0; i < table.points.size(); ++i) {
    std::vector<std::string> cells;
    append_vec_cells(cells, table.points[i]);
    const auto& v = table.values[i];
    cells.push_back(v ? format_double(*v) : "nan");
    cells.push_back(v ? "1" : "0");
    for (const TaskSet& single : singles) {
      const MamlEval ev = maml_value(single, Policy(table.points[i]), cfg.maml);
      cells.push_back(ev.defined ? format_double(ev.value) : "nan");
    }
    csv += csv_row(cells);
  }
  prepare(out_dir);
  write_text(out_dir / "scan.csv", csv);

  json doc{{"metadata", metadata(cfg, "scan")},
           {"config", serialize_config(cfg)},
           {"grid", grid_to_json(cfg.grid)},
           {"rows", table.points.size()},
           {"columns", header},
           {"masked_fraction", table.masked_fraction()},
           {"min", nullptr}};
  if (const auto best = table.argmin()) {
    doc["min"] = json{{"w", matrix_to_json(table.points[*best])},
                      {"value", *table.values[*best]}};
    out << "scan min " << format_double(*table.values[*best]) << " at w = "
        << format_double(table.points[*best].data()[0]) << (cfg.grid.dims() > 1 ? " ..." : "")
        << "\n";
  }
  write_json(out_dir / "scan.json", doc);
  out << "wrote " << (out_dir / "scan.csv").string() << " (" << table.points.size()
      << " rows, masked " << format_double(table.masked_fraction()) << ")\n";
  return doc;
}

json cmd_landscape(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  const LandscapeReport report =
      analyze_landscape(maml_objective(cfg.taskset(), cfg.maml), cfg.grid, cfg.search_options());
  json doc{{"metadata", metadata(cfg, "landscape")},
           {"config", serialize_config(cfg)},
           {"report", report_to_json(report)}};
  prepare(out_dir);
  write_json(out_dir / "landscape.json", doc);
  out << "stationary points " << report.points.size() << ", local minima "
      << report.local_min_count() << "\n"
      << "global min " << format_double(report.global_min_value) << ", epsilon gap "
      << format_double(report.epsilon_gap) << (report.is_global ? " (global)" : " (spurious)")
      << "\n"
      << "assumption1_ok " << (report.assumption1_ok ? "true" : "false") << "\n";
  return doc;
}

json cmd_train(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  const TaskSet ts = cfg.taskset();
  const Matrix lo = cfg.train.init_lo.value_or(cfg.grid.lo);
  const Matrix hi = cfg.train.init_hi.value_or(cfg.grid.hi);

  std::vector<Policy> inits;
  if (!cfg.train.inits.empty()) {
    for (const Matrix& m : cfg.train.inits) inits.emplace_back(m);
  } else {
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t r = 0; r < cfg.train.runs; ++r) {
      inits.push_back(random_stable_init(ts, cfg.maml, lo, hi, rng));
    }
  }

  const std::optional<double> reference = scan_minimum(cfg);
  const Objective objective = maml_objective(ts, cfg.maml);
  const TrainMode mode = cfg.train.sampled
                             ? TrainMode::sampled(cfg.seed, cfg.train.batch)
                             : TrainMode::full_batch();

  std::vector<std::string> header{"run", "iteration"};
  const auto wh = vec_headers(cfg.grid.dims());
  header.insert(header.end(), wh.begin(), wh.end());
  header.insert(header.end(), {"value", "grad_norm"});
  std::string csv = csv_row(header);

  json runs = json::array();
  for (std::size_t r = 0; r < inits.size(); ++r) {
    const TrainRecord rec =
        maml_train(ts, cfg.maml, inits[r], cfg.train.stop, mode, cfg.train.armijo);
    const std::size_t n = rec.iterates.size();
    for (std::size_t k = 0; k < n; ++k) {
      if (k % cfg.train.iterate_stride != 0 && k + 1 != n) continue;
      std::vector<std::string> cells{std::to_string(r), std::to_string(k)};
      append_vec_cells(cells, rec.iterates[k].gain());
      cells.push_back(format_double(rec.values[k]));
      cells.push_back(format_double(rec.grad_norms[k]));
      csv += csv_row(cells);
    }

    const Policy& final_w = rec.final_policy();
    json margin = nullptr;
    json hessian_pd = nullptr;
    std::string certificate = "not_applicable";
    if (rec.stop_reason != StopReason::diverged) {
      double min_margin = std::numeric_limits<double>::infinity();
      bool margin_ok = true;
      for (const LqrTask& t : ts.tasks()) {
        try {
          min_margin = std::min(min_margin, open_map_margin(t, final_w, cfg.maml));
        } catch (const std::exception&) {
          margin_ok = false;
        }
      }
      if (margin_ok) margin = number_or_null(min_margin);
      if (const auto H = objective.hessian(final_w.gain())) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(*H, Eigen::EigenvaluesOnly);
        hessian_pd = eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() > 0.0;
      }
      if (ts.size() == 1 && rec.stop_reason == StopReason::grad_tol) {
        const bool ok = margin_ok && min_margin > 0.0 && hessian_pd.is_boolean() &&
                        hessian_pd.get<bool>();
        certificate = ok ? "certified" : "uncertified";
      }
    }

    json run{{"run", r},
             {"init", matrix_to_json(inits[r].gain())},
             {"stop_reason", std::string(to_string(rec.stop_reason))},
             {"converged", rec.converged},
             {"iterations", n},
             {"final_policy", matrix_to_json(final_w.gain())},
             {"final_value", number_or_null(rec.final_value())},
             {"final_grad_norm", number_or_null(rec.grad_norms.back())},
             {"open_map_margin", margin},
             {"hessian_pd", hessian_pd},
             {"certificate", certificate},
             {"relative_excess", nullptr}};
    if (reference && std::isfinite(rec.final_value())) {
      run["relative_excess"] = (rec.final_value() - *reference) / std::abs(*reference);
    }
    runs.push_back(run);

    out << "run " << r << ": stop=" << to_string(rec.stop_reason) << " iterations=" << n
        << " value=" << format_double(rec.final_value())
        << " grad_norm=" << format_double(rec.grad_norms.back()) << " margin="
        << (margin.is_number() ? format_double(margin.get<double>()) : "n/a")
        << " certificate=" << certificate << "\n";
  }

  json doc{{"metadata", metadata(cfg, "train")},
           {"config", serialize_config(cfg)},
           {"scan_global_min", reference ? json(*reference) : json(nullptr)},
           {"runs", runs}};
  prepare(out_dir);
  write_text(out_dir / "train_iterates.csv", csv);
  write_json(out_dir / "train.json", doc);
  return doc;
}

json cmd_sweep(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  const SearchOptions options = cfg.search_options();
  json doc{{"metadata", metadata(cfg, "sweep")},
           {"config", serialize_config(cfg)},
           {"sweep", nullptr}};

  if (cfg.sweep) {
    const SweepSpec spec{cfg.sweep->delta, cfg.sweep->k, cfg.sweep->trials, cfg.seed};
    const auto reports = perturb_sweep(cfg.sweep->base, spec, cfg.maml, cfg.grid, options);
    json list = json::array();
    double max_gap = 0.0, max_rel = 0.0;
    std::size_t within = 0, a1 = 0;
    for (const LandscapeReport& rep : reports) {
      list.push_back(report_to_json(rep));
      const double rel = rep.epsilon_gap / std::abs(rep.global_min_value);
      max_gap = std::max(max_gap, rep.epsilon_gap);
      max_rel = std::max(max_rel, rel);
      within += rel <= 1e-2 ? 1 : 0;
      a1 += rep.assumption1_ok ? 1 : 0;
    }
    doc["sweep"] = json{{"reports", list},
                        {"summary",
                         {{"trials", reports.size()},
                          {"max_epsilon_gap", max_gap},
                          {"max_relative_gap", max_rel},
                          {"trials_relative_gap_le_1e-2", within},
                          {"trials_assumption1_ok", a1}}}};
    out << "sweep: " << reports.size() << " trials, max epsilon gap " << format_double(max_gap)
        << " (relative " << format_double(max_rel) << "), " << within
        << " trials with relative gap <= 1e-2\n";
  }

  const ArgminComparison cmp = compare_argmins(cfg.taskset(), cfg.maml, cfg.grid, options);
  doc["argmins"] = json{{"maml_argmin", matrix_to_json(cmp.maml_argmin.gain())},
                        {"maml_min_value", cmp.maml_min_value},
                        {"average_cost_argmin", matrix_to_json(cmp.average_argmin.gain())},
                        {"distance", cmp.distance},
                        {"task_grad_norms", cmp.task_grad_norms},
                        {"mean_optimal_policy", matrix_to_json(cmp.mean_optimal_policy.gain())}};
  out << "MAML argmin " << format_double(cmp.maml_argmin.gain().data()[0])
      << ", average-cost argmin " << format_double(cmp.average_argmin.gain().data()[0])
      << ", distance " << format_double(cmp.distance) << "\n";

  prepare(out_dir);
  write_json(out_dir / "sweep.json", doc);
  return doc;
}

void cmd_presets(std::ostream& out) {
  for (const Preset& p : presets()) {
    out << p.name << ": eta=" << short_number(p.config.maml.eta) << " tasks=";
    for (std::size_t i = 0; i < p.config.tasks.size(); ++i) {
      const LqrTask& t = p.config.tasks[i];
      out << (i ? ", " : "") << "(" << short_number(t.A()(0, 0)) << ", "
          << short_number(t.B()(0, 0)) << ", " << short_number(t.Q()(0, 0)) << ", "
          << short_number(t.R()(0, 0)) << ", " << short_number(t.Sigma0()(0, 0)) << ")";
    }
    out << "\n";
  }
}

}  // namespace maml_lqr::experiment
