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
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "maml_lqr/maml.hpp"

namespace maml_lqr {

/// A scalar objective over r x d gains. Each callback returns nullopt where
/// the objective (or its derivative) is undefined. The Hessian is over vec(W).
struct Objective {
  Eigen::Index rows = 1;
  Eigen::Index cols = 1;
  std::function<std::optional<double>(const Matrix&)> value;
  std::function<std::optional<Matrix>(const Matrix&)> gradient;
  std::function<std::optional<Matrix>(const Matrix&)> hessian;
};

Objective plain_cost_objective(const LqrTask& task);
Objective average_cost_objective(const TaskSet& ts);
Objective maml_objective(const TaskSet& ts, const MamlConfig& cfg);

/// Central-difference Hessian of a gradient callback, symmetrized.
std::optional<Matrix> fd_hessian(
    const std::function<std::optional<Matrix>(const Matrix&)>& gradient, const Matrix& w,
    double step);

/// Axis-aligned box of gains sampled with `resolution` points per axis,
/// endpoints included.
struct ScanGrid {
  Matrix lo;
  Matrix hi;
  std::size_t resolution = 101;

  static ScanGrid scalar(double lo, double hi, std::size_t resolution);

  void validate() const;
  Eigen::Index dims() const { return lo.size(); }
  std::size_t point_count() const;
  /// Row-major over grid indices: the last vec(W) axis varies fastest.
  Matrix point(std::size_t index) const;
  bool contains(const Matrix& w, double slack = 0.0) const;

  friend bool operator==(const ScanGrid& a, const ScanGrid& b);
};

/// Dense scans are limited to this many gain entries.
inline constexpr Eigen::Index kMaxDenseScanDims = 2;

struct ScanTable {
  std::vector<Matrix> points;
  std::vector<std::optional<double>> values;

  double masked_fraction() const;
  std::optional<std::size_t> argmin() const;
};

ScanTable grid_scan(const std::function<std::optional<double>(const Matrix&)>& value,
                    const ScanGrid& grid);
ScanTable grid_scan(const Objective& objective, const ScanGrid& grid);

enum class StationaryKind { local_min, local_max, saddle, degenerate };

std::string_view to_string(StationaryKind k);

struct StationaryPoint {
  Policy w;
  double value = 0.0;
  double grad_norm = 0.0;
  std::vector<double> hessian_eigs;
  StationaryKind kind = StationaryKind::degenerate;
};

/// Classification by Hessian eigenvalues: degenerate when
/// min|eig| < tol * max(1, max|eig|), otherwise by sign pattern.
StationaryKind classify_hessian(const Vector& eigenvalues, double degeneracy_tol = 1e-6);

struct SearchOptions {
  std::size_t uniform_seeds = 32;
  std::uint64_t seed = 0;
  double tol = 1e-10;                // Newton target on ||grad||
  double accept_grad_norm = 1e-8;    // survivors must satisfy this
  std::size_t max_newton_iter = 200;
  std::size_t polish_iter = 5;       // extra Newton steps once tol is reached
  double merge_radius = 1e-6;
  double boundary_clearance = 1e-4;  // distance kept from the undefined region
  double degeneracy_tol = 1e-6;
  std::size_t max_grid_seeds = 2000;
};

/// Multi-start damped Newton on the gradient. Seeds are grid-local minima of
/// ||grad|| (dense grids only) plus `uniform_seeds` uniform draws in the box.
/// Starts that leave the defined region or the box are discarded; survivors
/// within merge_radius are merged. Sorted by vec(W), lexicographically.
std::vector<StationaryPoint> find_stationary_points(const Objective& objective,
                                                    const ScanGrid& grid,
                                                    const SearchOptions& options = {});

struct EpsilonGlobality {
  double epsilon_gap = 0.0;
  bool is_global = true;
  double global_min_value = 0.0;
};

/// Gap between the worst local minimum and the global minimum, where the global
/// minimum is the best local minimum or `reference_min` if lower. Global means
/// gap < 1e-6 max(1, |global min|). Throws NumericalError without local minima.
EpsilonGlobality epsilon_globality(const std::vector<StationaryPoint>& points,
                                   std::optional<double> reference_min = std::nullopt);

struct LandscapeReport {
  std::vector<StationaryPoint> points;
  double global_min_value = 0.0;
  Policy global_minimizer;
  double epsilon_gap = 0.0;
  bool is_global = false;
  bool assumption1_ok = false;
  double masked_fraction = 0.0;
  ScanGrid box;  // compact surrogate the report is relative to

  std::size_t local_min_count() const;
};

/// Scan + stationary search + globality on the box.
LandscapeReport analyze_landscape(const Objective& objective, const ScanGrid& grid,
                                  const SearchOptions& options = {});

struct Assumption1Check {
  bool ok = false;
  double min_abs_hessian_det = 0.0;
  std::vector<StationaryPoint> points;
};

/// Finitely many stationary points, none with a singular Hessian.
Assumption1Check check_assumption1(const Objective& objective, const ScanGrid& grid,
                                   const SearchOptions& options = {});

/// Tasks (A, B, c_i Q, c_i R, Sigma0). Empty `weights` means uniform.
TaskSet make_scaled_taskset(const LqrTask& base, const std::vector<double>& scales,
                            std::vector<double> weights = {});

struct SweepSpec {
  double delta = 0.0;
  std::size_t k = 1;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
};

/// Half-width of the per-entry uniform perturbation of an m x n parameter
/// block. Any two draws then differ by at most delta/4 in spectral norm per
/// block, so the summed A, B, Q, R distance stays within delta.
double perturbation_halfwidth(double delta, Eigen::Index rows, Eigen::Index cols);

/// Draws one task around `base`: A, B, Q, R entries shifted uniformly within
/// perturbation_halfwidth (Q, R symmetrically), Sigma0 kept. Draws that fail
/// task validation are rejected; DomainError after 1000 rejections.
LqrTask perturb_task(const LqrTask& base, double delta, std::mt19937_64& rng);

/// One LandscapeReport per trial for the uniform-weight MAML objective over k
/// perturbed copies of `base`. Deterministic in spec.seed.
std::vector<LandscapeReport> perturb_sweep(const LqrTask& base, const SweepSpec& spec,
                                           const MamlConfig& cfg, const ScanGrid& grid,
                                           const SearchOptions& options = {});

/// Minimizer of sum_i w_i C_i(W): best grid point refined by Newton.
Policy average_cost_argmin(const TaskSet& ts, const ScanGrid& grid,
                           const SearchOptions& options = {});

struct ArgminComparison {
  Policy maml_argmin;
  double maml_min_value = 0.0;
  Policy average_argmin;
  double distance = 0.0;                 // Frobenius
  std::vector<double> task_grad_norms;   // ||grad C_i|| at the MAML argmin
  Policy mean_optimal_policy;            // sum_i w_i W*_i
};

ArgminComparison compare_argmins(const TaskSet& ts, const MamlConfig& cfg,
                                 const ScanGrid& grid, const SearchOptions& options = {});

}  // namespace maml_lqr
