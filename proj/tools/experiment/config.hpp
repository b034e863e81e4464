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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "maml_lqr/maml_lqr.hpp"

namespace maml_lqr::experiment {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LandscapeSettings {
  std::size_t uniform_seeds = 32;
  double newton_tol = 1e-10;

  friend bool operator==(const LandscapeSettings&, const LandscapeSettings&) = default;
};

struct TrainSettings {
  std::size_t runs = 20;
  std::vector<Matrix> inits;   // explicit starts; when empty, `runs` random draws
  std::optional<Matrix> init_lo;  // default: grid box
  std::optional<Matrix> init_hi;
  StopRule stop;
  bool armijo = false;
  bool sampled = false;
  std::size_t batch = 1;
  std::size_t iterate_stride = 10;  // rows kept in the iterate CSV

  friend bool operator==(const TrainSettings&, const TrainSettings&);
};

struct SweepSettings {
  LqrTask base = LqrTask::scalar(1, 1, 1, 1, 1);
  double delta = 0.0;
  std::size_t k = 1;
  std::size_t trials = 1;

  friend bool operator==(const SweepSettings&, const SweepSettings&) = default;
};

/// Everything one CLI invocation needs. JSON with a strict schema: unknown keys
/// are rejected, omitted optional keys take the defaults above, and serialize()
/// writes every key so parse(serialize(c)) == c.
struct ExperimentConfig {
  std::string name = "custom";
  std::string description;
  std::vector<LqrTask> tasks;
  std::vector<double> weights;
  MamlConfig maml;
  ScanGrid grid;
  std::uint64_t seed = 0;
  LandscapeSettings landscape;
  TrainSettings train;
  std::optional<SweepSettings> sweep;

  TaskSet taskset() const { return TaskSet(tasks, weights); }
  SearchOptions search_options() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
nlohmann::json serialize_config(const ExperimentConfig& cfg);

nlohmann::json matrix_to_json(const Matrix& m);

struct Preset {
  std::string name;
  ExperimentConfig config;
};

const std::vector<Preset>& presets();
/// Throws ConfigError for unknown names.
ExperimentConfig preset_config(const std::string& name);

/// Applies `--grid lo,hi,n`: every gain entry spans [lo, hi].
void apply_grid_override(ExperimentConfig& cfg, const std::string& spec);

}  // namespace maml_lqr::experiment
