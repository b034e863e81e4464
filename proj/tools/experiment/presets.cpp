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

#include <algorithm>

#include "experiment/config.hpp"

namespace maml_lqr::experiment {

namespace {

struct Row {
  double a, b, q, r, s0;
};

ExperimentConfig make(std::string name, std::string description, std::vector<Row> rows,
                      double eta) {
  ExperimentConfig cfg;
  cfg.name = std::move(name);
  cfg.description = std::move(description);
  for (const Row& row : rows) {
    cfg.tasks.push_back(LqrTask::scalar(row.a, row.b, row.q, row.r, row.s0));
  }
  cfg.weights.assign(cfg.tasks.size(), 1.0 / static_cast<double>(cfg.tasks.size()));
  cfg.maml = MamlConfig{eta, 1e-3, MamlVariant::vanilla};
  cfg.grid = ScanGrid::scalar(0.01, 1.99, 10001);
  return cfg;
}

std::vector<Preset> build() {
  std::vector<Preset> out;
  auto add = [&](ExperimentConfig cfg) {
    std::string name = cfg.name;
    out.push_back({std::move(name), std::move(cfg)});
  };

  add(make("fig1", "MAML objective on a single 1-D LQR task", {{1, 1, 2, 2, 1}}, 0.01));
  add(make("fig2",
           "Two tasks identical up to cost scaling (factor 0.05) and their uniform average",
           {{1, 1, 2, 2, 1}, {1, 1, 0.1, 0.1, 1}}, 0.01));

  ExperimentConfig fig3a = make(
      "fig3a",
      "Four tasks near (1,1,1,1,1), each with one parameter moved by 0.01. The sweep "
      "section draws k=5 tasks within delta=0.04 of the base.",
      {{1.01, 1, 1, 1, 1}, {1, 1.01, 1, 1, 1}, {1, 1, 1.01, 1, 1}, {0.99, 1, 1, 1, 1}}, 0.01);
  fig3a.sweep = SweepSettings{LqrTask::scalar(1, 1, 1, 1, 1), 0.04, 5, 20};
  add(std::move(fig3a));

  add(make("fig3b", "Two tasks with common dynamics and different costs",
           {{1, 1, 1, 2, 1}, {1, 1, 2, 1, 1}}, 0.1));
  add(make("fig3c", "Five tasks with common dynamics and different costs",
           {{1, 1, 1, 1, 1}, {1, 1, 1, 2, 1}, {1, 1, 2, 1, 1}, {1, 1, 2, 3, 1}, {1, 1, 3, 2, 1}},
           0.1));
  add(make("fig3d", "Eleven tasks with common dynamics and different costs",
           {{1, 1, 1, 1, 1},
            {1, 1, 1, 2, 1},
            {1, 1, 2, 1, 1},
            {1, 1, 2, 3, 1},
            {1, 1, 3, 2, 1},
            {1, 1, 3, 1, 1},
            {1, 1, 1, 3, 1},
            {1, 1, 4, 1, 1},
            {1, 1, 1, 4, 1},
            {1, 1, 5, 3, 1},
            {1, 1, 3, 5, 1}},
           0.1));
  return out;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

ExperimentConfig preset_config(const std::string& name) {
  const auto& all = presets();
  const auto it = std::find_if(all.begin(), all.end(),
                               [&](const Preset& p) { return p.name == name; });
  if (it == all.end()) throw ConfigError("unknown preset '" + name + "'");
  return it->config;
}

}  // namespace maml_lqr::experiment
