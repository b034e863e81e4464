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
#include <random>
#include <string_view>
#include <vector>

#include "maml_lqr/maml.hpp"

namespace maml_lqr {

enum class StopReason { grad_tol, max_iter, diverged };

std::string_view to_string(StopReason r);

struct StopRule {
  double grad_tol = 1e-8;
  std::size_t max_iter = 100000;
  double value_blowup = 1e12;

  void validate() const;
  friend bool operator==(const StopRule&, const StopRule&) = default;
};

/// Optimization trace. iterates, values and grad_norms have equal length.
/// Every accepted iterate has a finite value; a diverged record ends with the
/// offending iterate carrying +inf value and gradient norm.
struct TrainRecord {
  std::vector<Policy> iterates;
  std::vector<double> values;
  std::vector<double> grad_norms;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iter;

  const Policy& final_policy() const { return iterates.back(); }
  double final_value() const { return values.back(); }
};

/// Full batch uses every task with its weight at every step. Sampled mode
/// draws `batch` task indices per step from the weights, seeded.
struct TrainMode {
  enum class Kind { full_batch, sampled };
  Kind kind = Kind::full_batch;
  std::uint64_t seed = 0;
  std::size_t batch = 1;

  static TrainMode full_batch() { return {}; }
  static TrainMode sampled(std::uint64_t seed, std::size_t batch) {
    return {Kind::sampled, seed, batch};
  }
};

struct ArmijoParams {
  double sigma = 1e-4;
  double shrink = 0.5;
  double t0 = 1.0;
  int max_shrinks = 60;
};

/// Scalar objective over gain matrices. Returns +inf where undefined.
using ValueFn = std::function<double(const Matrix&)>;

/// Largest t = t0 shrink^k, 0 <= k <= max_shrinks, with
///   f(w + t d) <= f(w) + sigma t <grad, d>.
/// Throws std::invalid_argument unless d is a descent direction and
/// LineSearchError if no k passes.
double armijo_step(const ValueFn& value_fn, const Matrix& grad, const Matrix& w,
                   const Matrix& direction, const ArmijoParams& params = {});

/// MAML outer loop: w <- w - beta grad h(w), or an Armijo step along -grad h
/// with default ArmijoParams when `use_armijo` is set (beta is then unused).
/// Numerical trouble, including a failed line search, ends the run as
/// diverged instead of throwing.
TrainRecord maml_train(const TaskSet& ts, const MamlConfig& cfg, const Policy& init,
                       const StopRule& stop = {},
                       const TrainMode& mode = TrainMode::full_batch(),
                       bool use_armijo = false);

/// Plain gradient descent on a single task's cost with a constant step.
TrainRecord gradient_descent(const LqrTask& task, const Policy& init, double step,
                             const StopRule& stop = {});

/// Uniform draw from the box [lo, hi] rejected until it stabilizes every task.
/// Throws DomainError after `max_attempts` rejections.
Policy random_stable_init(const TaskSet& ts, const Matrix& lo, const Matrix& hi,
                          std::mt19937_64& rng, std::size_t max_attempts = 10000);

/// As above, additionally rejecting draws where the MAML objective is undefined.
Policy random_stable_init(const TaskSet& ts, const MamlConfig& cfg, const Matrix& lo,
                          const Matrix& hi, std::mt19937_64& rng,
                          std::size_t max_attempts = 10000);

}  // namespace maml_lqr
