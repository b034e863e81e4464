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

#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiment/commands.hpp"
#include "experiment/config.hpp"
#include "maml_lqr/maml_lqr.hpp"

namespace {

using namespace maml_lqr;
using namespace maml_lqr::experiment;

struct Options {
  std::string config_path;
  std::string preset;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> variant;
  std::optional<double> eta;
  std::optional<double> beta;
  std::optional<std::string> grid;
  std::vector<std::string> inits;
  std::optional<std::size_t> runs;
};

void add_common(CLI::App* sub, Options& o) {
  auto* cfg = sub->add_option("--config", o.config_path, "Experiment config (JSON)");
  auto* pre = sub->add_option("--preset", o.preset, "Built-in experiment preset");
  cfg->excludes(pre);
  sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--seed", o.seed, "RNG seed");
  sub->add_option("--variant", o.variant, "vanilla | normalized");
  sub->add_option("--eta", o.eta, "Inner-loop step size");
  sub->add_option("--beta", o.beta, "Outer-loop step size");
  sub->add_option("--grid", o.grid, "Scan box as lo,hi,n");
}

Matrix parse_gain(const std::string& text, Eigen::Index rows, Eigen::Index cols) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--init: cannot parse '" + item + "' as a number");
    }
  }
  if (static_cast<Eigen::Index>(vals.size()) != rows * cols) {
    throw ConfigError("--init: expected " + std::to_string(rows * cols) + " values, got " +
                      std::to_string(vals.size()));
  }
  return Eigen::Map<const Matrix>(vals.data(), rows, cols);
}

ExperimentConfig resolve(const Options& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    cfg = load_config(o.config_path);
  } else if (!o.preset.empty()) {
    cfg = preset_config(o.preset);
  } else {
    throw ConfigError("one of --config or --preset is required");
  }
  if (o.seed) cfg.seed = *o.seed;
  try {
    if (o.variant) cfg.maml.variant = parse_variant(*o.variant);
    if (o.eta) cfg.maml.eta = *o.eta;
    if (o.beta) cfg.maml.beta = *o.beta;
    cfg.maml.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (o.grid) apply_grid_override(cfg, *o.grid);
  if (!o.inits.empty()) {
    cfg.train.inits.clear();
    for (const std::string& s : o.inits) {
      cfg.train.inits.push_back(parse_gain(s, cfg.grid.lo.rows(), cfg.grid.lo.cols()));
    }
  }
  if (o.runs) {
    if (*o.runs == 0) throw ConfigError("--runs must be positive");
    cfg.train.runs = *o.runs;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landscape and training experiments for MAML on linear-quadratic control"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  Options opts;
  auto* scan = app.add_subcommand("scan", "Evaluate the MAML objective on a dense grid");
  auto* landscape = app.add_subcommand("landscape", "Locate and classify stationary points");
  auto* train = app.add_subcommand("train", "Run MAML gradient descent from several starts");
  auto* sweep = app.add_subcommand("sweep", "Perturbation sweep and argmin comparison");
  auto* list = app.add_subcommand("presets", "List presets, or dump one as JSON");
  for (auto* sub : {scan, landscape, train, sweep}) add_common(sub, opts);
  train->add_option("--init", opts.inits, "Initial gain, comma separated, column-major")
      ->take_all();
  train->add_option("--runs", opts.runs, "Number of random starts");
  list->add_option("--preset", opts.preset, "Print this preset's config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (list->parsed()) {
      if (opts.preset.empty()) {
        cmd_presets(std::cout);
      } else {
        std::cout << serialize_config(preset_config(opts.preset)).dump(2) << "\n";
      }
      return kExitOk;
    }
    const ExperimentConfig cfg = resolve(opts);
    if (scan->parsed()) cmd_scan(cfg, opts.out_dir, std::cout);
    if (landscape->parsed()) cmd_landscape(cfg, opts.out_dir, std::cout);
    if (train->parsed()) cmd_train(cfg, opts.out_dir, std::cout);
    if (sweep->parsed()) cmd_sweep(cfg, opts.out_dir, std::cout);
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
