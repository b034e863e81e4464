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

#include "experiment/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace maml_lqr::experiment {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) throw ConfigError(where + ": expected a nonnegative integer");
  return j.get<std::size_t>();
}

bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + ": expected true or false");
  return j.get<bool>();
}

// A bare number is accepted as a 1x1 matrix.
Matrix matrix(const json& j, const std::string& where) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a matrix");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) throw ConfigError(where + ": expected rows");
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ConfigError(where + ": ragged matrix rows");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          number(j[i][k], where);
    }
  }
  return m;
}

LqrTask task(const json& j, const std::string& where) {
  require_keys(j, where, {"A", "B", "Q", "R", "Sigma0"});
  for (const char* key : {"A", "B", "Q", "R", "Sigma0"}) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  }
  try {
    return LqrTask(matrix(j["A"], where + ".A"), matrix(j["B"], where + ".B"),
                   matrix(j["Q"], where + ".Q"), matrix(j["R"], where + ".R"),
                   matrix(j["Sigma0"], where + ".Sigma0"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": invalid task: " + e.what());
  }
}

json task_to_json(const LqrTask& t) {
  return json{{"A", matrix_to_json(t.A())},
              {"B", matrix_to_json(t.B())},
              {"Q", matrix_to_json(t.Q())},
              {"R", matrix_to_json(t.R())},
              {"Sigma0", matrix_to_json(t.Sigma0())}};
}

bool same_matrix(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same_optional_matrix(const std::optional<Matrix>& a, const std::optional<Matrix>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same_matrix(*a, *b);
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

bool operator==(const TrainSettings& a, const TrainSettings& b) {
  if (a.inits.size() != b.inits.size()) return false;
  for (std::size_t i = 0; i < a.inits.size(); ++i) {
    if (!same_matrix(a.inits[i], b.inits[i])) return false;
  }
  return a.runs == b.runs && same_optional_matrix(a.init_lo, b.init_lo) &&
         same_optional_matrix(a.init_hi, b.init_hi) && a.stop == b.stop &&
         a.armijo == b.armijo && a.sampled == b.sampled && a.batch == b.batch &&
         a.iterate_stride == b.iterate_stride;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.name == b.name && a.description == b.description && a.tasks == b.tasks &&
         a.weights == b.weights && a.maml == b.maml && a.grid == b.grid &&
         a.seed == b.seed && a.landscape == b.landscape && a.train == b.train &&
         a.sweep == b.sweep;
}

SearchOptions ExperimentConfig::search_options() const {
  SearchOptions opt;
  opt.uniform_seeds = landscape.uniform_seeds;
  opt.tol = landscape.newton_tol;
  opt.seed = seed;
  return opt;
}

ExperimentConfig parse_config(const json& j) {
  require_keys(j, "config", {"name", "description", "tasks", "weights", "maml", "grid",
                             "seed", "landscape", "train", "sweep"});
  ExperimentConfig cfg;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw ConfigError("name: expected a string");
    cfg.name = j["name"].get<std::string>();
  }
  if (j.contains("description")) {
    if (!j["description"].is_string()) throw ConfigError("description: expected a string");
    cfg.description = j["description"].get<std::string>();
  }

  if (!j.contains("tasks") || !j["tasks"].is_array() || j["tasks"].empty()) {
    throw ConfigError("tasks: expected a nonempty list");
  }
  for (std::size_t i = 0; i < j["tasks"].size(); ++i) {
    cfg.tasks.push_back(task(j["tasks"][i], "tasks[" + std::to_string(i) + "]"));
  }
  if (j.contains("weights")) {
    if (!j["weights"].is_array()) throw ConfigError("weights: expected a list");
    for (const json& w : j["weights"]) cfg.weights.push_back(number(w, "weights"));
  } else {
    cfg.weights.assign(cfg.tasks.size(), 1.0 / static_cast<double>(cfg.tasks.size()));
  }
  try {
    (void)cfg.taskset();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("tasks/weights: ") + e.what());
  }

  if (!j.contains("maml")) throw ConfigError("maml: missing section");
  {
    const json& m = j["maml"];
    require_keys(m, "maml", {"eta", "beta", "variant"});
    if (!m.contains("eta")) throw ConfigError("maml.eta: missing");
    cfg.maml.eta = number(m["eta"], "maml.eta");
    if (m.contains("beta")) cfg.maml.beta = number(m["beta"], "maml.beta");
    if (m.contains("variant")) {
      if (!m["variant"].is_string()) throw ConfigError("maml.variant: expected a string");
      try {
        cfg.maml.variant = parse_variant(m["variant"].get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError(std::string("maml.variant: ") + e.what());
      }
    }
    try {
      cfg.maml.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("maml: ") + e.what());
    }
  }

  if (!j.contains("grid")) throw ConfigError("grid: missing section");
  {
    const json& g = j["grid"];
    require_keys(g, "grid", {"lo", "hi", "resolution"});
    if (!g.contains("lo") || !g.contains("hi")) throw ConfigError("grid: needs lo and hi");
    cfg.grid.lo = matrix(g["lo"], "grid.lo");
    cfg.grid.hi = matrix(g["hi"], "grid.hi");
    if (g.contains("resolution")) cfg.grid.resolution = count(g["resolution"], "grid.resolution");
    try {
      cfg.grid.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("grid: ") + e.what());
    }
    if (cfg.grid.lo.rows() != cfg.tasks.front().input_dim() ||
        cfg.grid.lo.cols() != cfg.tasks.front().state_dim()) {
      throw ConfigError("grid: bounds must have the policy shape r x d");
    }
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("seed: expected an unsigned integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }

  if (j.contains("landscape")) {
    const json& l = j["landscape"];
    require_keys(l, "landscape", {"uniform_seeds", "newton_tol"});
    if (l.contains("uniform_seeds")) {
      cfg.landscape.uniform_seeds = count(l["uniform_seeds"], "landscape.uniform_seeds");
    }
    if (l.contains("newton_tol")) {
      cfg.landscape.newton_tol = number(l["newton_tol"], "landscape.newton_tol");
      if (!(cfg.landscape.newton_tol > 0.0)) {
        throw ConfigError("landscape.newton_tol: must be positive");
      }
    }
  }

  if (j.contains("train")) {
    const json& t = j["train"];
    require_keys(t, "train", {"runs", "inits", "init_lo", "init_hi", "grad_tol", "max_iter",
                              "value_blowup", "armijo", "mode", "batch", "iterate_stride"});
    TrainSettings& ts = cfg.train;
    if (t.contains("runs")) ts.runs = count(t["runs"], "train.runs");
    if (t.contains("inits")) {
      if (!t["inits"].is_array()) throw ConfigError("train.inits: expected a list");
      for (const json& m : t["inits"]) ts.inits.push_back(matrix(m, "train.inits"));
    }
    if (t.contains("init_lo") && !t["init_lo"].is_null()) {
      ts.init_lo = matrix(t["init_lo"], "train.init_lo");
    }
    if (t.contains("init_hi") && !t["init_hi"].is_null()) {
      ts.init_hi = matrix(t["init_hi"], "train.init_hi");
    }
    if (t.contains("grad_tol")) ts.stop.grad_tol = number(t["grad_tol"], "train.grad_tol");
    if (t.contains("max_iter")) ts.stop.max_iter = count(t["max_iter"], "train.max_iter");
    if (t.contains("value_blowup")) {
      ts.stop.value_blowup = number(t["value_blowup"], "train.value_blowup");
    }
    if (t.contains("armijo")) ts.armijo = boolean(t["armijo"], "train.armijo");
    if (t.contains("mode")) {
      const std::string mode = t["mode"].is_string() ? t["mode"].get<std::string>() : "";
      if (mode != "full_batch" && mode != "sampled") {
        throw ConfigError("train.mode: expected 'full_batch' or 'sampled'");
      }
      ts.sampled = mode == "sampled";
    }
    if (t.contains("batch")) ts.batch = count(t["batch"], "train.batch");
    if (t.contains("iterate_stride")) {
      ts.iterate_stride = count(t["iterate_stride"], "train.iterate_stride");
    }
    try {
      ts.stop.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("train: ") + e.what());
    }
    if (ts.batch == 0 || ts.iterate_stride == 0) {
      throw ConfigError("train: batch and iterate_stride must be positive");
    }
    auto check_shape = [&](const Matrix& m, const char* what) {
      if (m.rows() != cfg.grid.lo.rows() || m.cols() != cfg.grid.lo.cols()) {
        throw ConfigError(std::string("train.") + what + ": must have the policy shape");
      }
    };
    for (const Matrix& m : ts.inits) check_shape(m, "inits");
    if (ts.init_lo) check_shape(*ts.init_lo, "init_lo");
    if (ts.init_hi) check_shape(*ts.init_hi, "init_hi");
  }

  if (j.contains("sweep") && !j["sweep"].is_null()) {
    const json& s = j["sweep"];
    require_keys(s, "sweep", {"base", "delta", "k", "trials"});
    if (!s.contains("base")) throw ConfigError("sweep.base: missing");
    SweepSettings sw{task(s["base"], "sweep.base")};
    if (s.contains("delta")) sw.delta = number(s["delta"], "sweep.delta");
    if (s.contains("k")) sw.k = count(s["k"], "sweep.k");
    if (s.contains("trials")) sw.trials = count(s["trials"], "sweep.trials");
    if (!(sw.delta >= 0.0) || sw.k == 0 || sw.trials == 0) {
      throw ConfigError("sweep: needs delta >= 0 and positive k, trials");
    }
    if (sw.base.input_dim() != cfg.grid.lo.rows() || sw.base.state_dim() != cfg.grid.lo.cols()) {
      throw ConfigError("sweep.base: dimensions must match the grid");
    }
    cfg.sweep = std::move(sw);
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json serialize_config(const ExperimentConfig& cfg) {
  json tasks = json::array();
  for (const LqrTask& t : cfg.tasks) tasks.push_back(task_to_json(t));
  json inits = json::array();
  for (const Matrix& m : cfg.train.inits) inits.push_back(matrix_to_json(m));
  json j{
      {"name", cfg.name},
      {"description", cfg.description},
      {"tasks", tasks},
      {"weights", cfg.weights},
      {"maml",
       {{"eta", cfg.maml.eta},
        {"beta", cfg.maml.beta},
        {"variant", std::string(to_string(cfg.maml.variant))}}},
      {"grid",
       {{"lo", matrix_to_json(cfg.grid.lo)},
        {"hi", matrix_to_json(cfg.grid.hi)},
        {"resolution", cfg.grid.resolution}}},
      {"seed", cfg.seed},
      {"landscape",
       {{"uniform_seeds", cfg.landscape.uniform_seeds},
        {"newton_tol", cfg.landscape.newton_tol}}},
      {"train",
       {{"runs", cfg.train.runs},
        {"inits", inits},
        {"init_lo", cfg.train.init_lo ? matrix_to_json(*cfg.train.init_lo) : json(nullptr)},
        {"init_hi", cfg.train.init_hi ? matrix_to_json(*cfg.train.init_hi) : json(nullptr)},
        {"grad_tol", cfg.train.stop.grad_tol},
        {"max_iter", cfg.train.stop.max_iter},
        {"value_blowup", cfg.train.stop.value_blowup},
        {"armijo", cfg.train.armijo},
        {"mode", cfg.train.sampled ? "sampled" : "full_batch"},
        {"batch", cfg.train.batch},
        {"iterate_stride", cfg.train.iterate_stride}}},
      {"sweep", nullptr},
  };
  if (cfg.sweep) {
    j["sweep"] = json{{"base", task_to_json(cfg.sweep->base)},
                      {"delta", cfg.sweep->delta},
                      {"k", cfg.sweep->k},
                      {"trials", cfg.sweep->trials}};
  }
  return j;
}

void apply_grid_override(ExperimentConfig& cfg, const std::string& spec) {
  std::stringstream ss(spec);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, ',')) parts.push_back(part);
  if (parts.size() != 3) throw ConfigError("--grid expects lo,hi,n");
  double lo = 0.0, hi = 0.0;
  long long n = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("lo");
    hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("hi");
    n = std::stoll(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("n");
  } catch (const std::exception&) {
    throw ConfigError("--grid expects lo,hi,n with numeric fields");
  }
  if (n < 3) throw ConfigError("--grid resolution must be at least 3");
  ScanGrid grid{Matrix::Constant(cfg.grid.lo.rows(), cfg.grid.lo.cols(), lo),
                Matrix::Constant(cfg.grid.lo.rows(), cfg.grid.lo.cols(), hi),
                static_cast<std::size_t>(n)};
  try {
    grid.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("--grid: ") + e.what());
  }
  cfg.grid = std::move(grid);
}

}  // namespace maml_lqr::experiment
