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
#include <limits>
#include <string_view>
#include <vector>

#include "maml_lqr/lqr.hpp"

namespace maml_lqr {

enum class MamlVariant { vanilla, normalized };

std::string_view to_string(MamlVariant v);
MamlVariant parse_variant(std::string_view name);

/// Adaptation step `eta`, meta step `beta`, and which adaptation map to use.
struct MamlConfig {
  double eta = 0.01;
  double beta = 1e-3;
  MamlVariant variant = MamlVariant::vanilla;

  /// Throws DomainError unless both steps are finite and positive.
  void validate() const;

  friend bool operator==(const MamlConfig&, const MamlConfig&) = default;
};

/// Finite task distribution. Weights are nonnegative and sum to one; all
/// tasks share (d, r).
class TaskSet {
 public:
  TaskSet(std::vector<LqrTask> tasks, std::vector<double> weights);
  static TaskSet uniform(std::vector<LqrTask> tasks);

  const std::vector<LqrTask>& tasks() const { return tasks_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return tasks_.size(); }
  Eigen::Index state_dim() const { return tasks_.front().state_dim(); }
  Eigen::Index input_dim() const { return tasks_.front().input_dim(); }

 private:
  std::vector<LqrTask> tasks_;
  std::vector<double> weights_;
};

enum class UndefinedReason {
  none,
  base_unstable,     // W does not stabilize some task
  adapted_unstable,  // W' = adapt(W) does not stabilize its task
  zero_gradient,     // normalized step at a stationary point of some task
};

std::string_view to_string(UndefinedReason r);

struct MamlEval {
  double value = std::numeric_limits<double>::infinity();
  std::vector<Policy> adapted;
  std::vector<double> per_task_value;
  bool defined = false;
  UndefinedReason reason = UndefinedReason::none;
  std::size_t failing_task = 0;
};

/// Gradient norms at or below this make the normalized step undefined.
inline constexpr double kZeroGradientNorm = 1e-12;

/// One adaptation step: W - eta grad C(W), or W - eta grad C(W)/||grad C(W)||_F.
Policy adapt(const LqrTask& task, const Policy& policy, const MamlConfig& cfg);

/// h(W) = sum_i w_i C_i(adapt(task_i, W)).
MamlEval maml_value(const TaskSet& ts, const Policy& policy, const MamlConfig& cfg);

/// General single-shot form sum_i w_i f_i(W - eta grad g_i(W)): the step is taken
/// on `inner` and the adapted policy is scored on `outer`. Weights come from
/// `outer`; both sets must have the same length.
MamlEval maml_value(const TaskSet& outer, const TaskSet& inner, const Policy& policy,
                    const MamlConfig& cfg);

/// Meta-gradient of h. Vanilla uses the chain rule
///   sum_i w_i (I - eta H_i(W))' grad C_i(W'_i)
/// with the finite-difference cost Hessian; normalized uses central differences
/// of maml_value. Throws DomainError if h is undefined in the stencil.
Matrix maml_gradient(const TaskSet& ts, const Policy& policy, const MamlConfig& cfg);

/// Central differences of maml_value, for either variant.
Matrix maml_gradient_fd(const TaskSet& ts, const Policy& policy, const MamlConfig& cfg,
                        double step = 1e-6);

/// Jacobian of the adaptation map over vec(W). Vanilla: I - eta H. Normalized:
///   I - eta (||g||^2 I - g g') H / ||g||^3.
Matrix adaptation_jacobian(const LqrTask& task, const Policy& policy,
                           const MamlConfig& cfg);

/// Slack in the step-size condition that makes the adaptation map locally open:
/// vanilla 1/||H||_2 - eta, normalized ||g||_F/||H||_2 - eta. Positive slack
/// certifies openness at W.
double open_map_margin(const LqrTask& task, const Policy& policy, const MamlConfig& cfg);

}  // namespace maml_lqr
