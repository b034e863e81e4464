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

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "experiment/config.hpp"

namespace maml_lqr::experiment {

inline constexpr const char* kToolVersion = "0.1.0";

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

/// "%.17g"; non-finite values print as "nan" / "inf" / "-inf".
std::string format_double(double v);

/// Hex SHA-256 of the compact canonical config JSON.
std::string config_hash(const ExperimentConfig& cfg);

nlohmann::json report_to_json(const LandscapeReport& report);

/// Each command writes its files into `out_dir` (created if needed), prints a
/// short summary to `out`, and returns the JSON document it wrote. Numerical
/// failures surface as maml_lqr exceptions.
nlohmann::json cmd_scan(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                        std::ostream& out);
nlohmann::json cmd_landscape(const ExperimentConfig& cfg,
                             const std::filesystem::path& out_dir, std::ostream& out);
nlohmann::json cmd_train(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                         std::ostream& out);
nlohmann::json cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                         std::ostream& out);

/// One line per preset: tasks as (A, B, Q, R, s0 s0') tuples and eta.
void cmd_presets(std::ostream& out);

}  // namespace maml_lqr::experiment
