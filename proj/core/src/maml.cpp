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

#include "maml_lqr/maml.hpp"

#include <cmath>
#include <string>

#include "maml_lqr/errors.hpp"

namespace maml_lqr {

namespace {

double operator_norm_symmetric(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(H, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("Hessian eigensolve failed");
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

MamlEval undefined(UndefinedReason reason, std::size_t task) {
  MamlEval out;
  out.reason = reason;
  out.failing_task = task;
  return out;
}

}  // namespace

std::string_view to_string(MamlVariant v) {
  return v == MamlVariant::vanilla ? "vanilla" : "normalized";
}

MamlVariant parse_variant(std::string_view name) {
  if (name == "vanilla") return MamlVariant::vanilla;
  if (name == "normalized") return MamlVariant::normalized;
  throw std::invalid_argument("unknown MAML variant '" + std::string(name) + "'");
}

std::string_view to_string(UndefinedReason r) {
  switch (r) {
    case UndefinedReason::none: return "none";
    case UndefinedReason::base_unstable: return "base_unstable";
    case UndefinedReason::adapted_unstable: return "adapted_unstable";
    case UndefinedReason::zero_gradient: return "zero_gradient";
  }
  return "unknown";
}

void MamlConfig::validate() const {
  if (!(std::isfinite(eta) && eta > 0.0)) throw DomainError("eta must be finite and positive");
  if (!(std::isfinite(beta) && beta > 0.0)) {
    throw DomainError("beta must be finite and positive");
  }
}

TaskSet::TaskSet(std::vector<LqrTask> tasks, std::vector<double> weights)
    : tasks_(std::move(tasks)), weights_(std::move(weights)) {
  if (tasks_.empty()) throw DomainError("task set must not be empty");
  if (weights_.size() != tasks_.size()) {
    throw DimensionError("task set needs one weight per task");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("weights must sum to one");
  for (const LqrTask& t : tasks_) {
    if (t.state_dim() != tasks_.front().state_dim() ||
        t.input_dim() != tasks_.front().input_dim()) {
      throw DimensionError("all tasks in a set must share (d, r)");
    }
  }
}

TaskSet TaskSet::uniform(std::vector<LqrTask> tasks) {
  const std::size_t k = tasks.size();
  if (k == 0) throw DomainError("task set must not be empty");
  return TaskSet(std::move(tasks), std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Policy adapt(const LqrTask& task, const Policy& policy, const MamlConfig& cfg) {
  const Matrix g = cost_gradient(task, policy);
  if (cfg.variant == MamlVariant::vanilla) {
    return Policy(policy.gain() - cfg.eta * g);
  }
  const double norm = g.norm();
  if (norm <= kZeroGradientNorm) {
    throw DomainError("zero-gradient adaptation undefined for the normalized step");
  }
  return Policy(policy.gain() - cfg.eta * (g / norm));
}

MamlEval maml_value(const TaskSet& ts, const Policy& policy, const MamlConfig& cfg) {
  return maml_value(ts, ts, policy, cfg);
}

MamlEval maml_value(const TaskSet& outer, const TaskSet& inner, const Policy& policy,
                    const MamlConfig& cfg) {
  if (outer.size() != inner.size()) {
    throw DimensionError("outer and inner task sets differ in length");
  }
  MamlEval out;
  out.adapted.reserve(outer.size());
  out.per_task_value.reserve(outer.size());
  double total = 0.0;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const LqrTask& g_task = inner.tasks()[i];
    const LqrTask& f_task = outer.tasks()[i];
    if (!is_stabilizing(g_task, policy)) return undefined(UndefinedReason::base_unstable, i);
    const Matrix g = cost_gradient(g_task, policy);
    Matrix step = cfg.eta * g;
    if (cfg.variant == MamlVariant::normalized) {
      const double norm = g.norm();
      if (norm <= kZeroGradientNorm) return undefined(UndefinedReason::zero_gradient, i);
      step = cfg.eta * (g / norm);
    }
    Policy adapted(policy.gain() - step);
    const CostEval ev = eval_cost(f_task, adapted);
    if (!ev.stable) return undefined(UndefinedReason::adapted_unstable, i);
    total += outer.weights()[i] * ev.value;
    out.per_task_value.push_back(ev.value);
    out.adapted.push_back(std::move(adapted));
  }
  out.value = total;
  out.defined = true;
  return out;
}

Matrix maml_gradient_fd(const TaskSet& ts, const Policy& policy, const MamlConfig& cfg,
                        double step) {
  const Eigen::Index rows = policy.rows(), cols = policy.cols();
  const Vector w = policy.vec();
  const double h = step * std::max(1.0, w.norm());
  Vector grad(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    Vector plus = w, minus = w;
    plus(j) += h;
    minus(j) -= h;
    const MamlEval vp = maml_value(ts, Policy::from_vec(plus, rows, cols), cfg);
    const MamlEval vm = maml_value(ts, Policy::from_vec(minus, rows, cols), cfg);
    if (!vp.defined || !vm.defined) {
      throw DomainError("MAML objective undefined inside the difference stencil");
    }
    grad(j) = (vp.value - vm.value) / (2.0 * h);
  }
  return Eigen::Map<const Matrix>(grad.data(), rows, cols);
}

Matrix maml_gradient(const TaskSet& ts, const Policy& policy, const MamlConfig& cfg) {
  if (cfg.variant == MamlVariant::normalized) return maml_gradient_fd(ts, policy, cfg);

  const MamlEval ev = maml_value(ts, policy, cfg);
  if (!ev.defined) {
    throw DomainError("MAML objective undefined at W (" +
                      std::string(to_string(ev.reason)) + ")");
  }
  const Eigen::Index n = policy.gain().size();
  Vector total = Vector::Zero(n);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const LqrTask& task = ts.tasks()[i];
    const Matrix jac = adaptation_jacobian(task, policy, cfg);
    const Matrix g_adapted = cost_gradient(task, ev.adapted[i]);
    total += ts.weights()[i] * (jac.transpose() * Eigen::Map<const Vector>(g_adapted.data(), n));
  }
  return Eigen::Map<const Matrix>(total.data(), policy.rows(), policy.cols());
}

Matrix adaptation_jacobian(const LqrTask& task, const Policy& policy,
                           const MamlConfig& cfg) {
  const Matrix H = cost_hessian(task, policy);
  const Eigen::Index n = H.rows();
  const Matrix I = Matrix::Identity(n, n);
  if (cfg.variant == MamlVariant::vanilla) return I - cfg.eta * H;

  const Matrix g_mat = cost_gradient(task, policy);
  const Vector g = Eigen::Map<const Vector>(g_mat.data(), n);
  const double norm = g.norm();
  if (norm <= kZeroGradientNorm) {
    throw DomainError("zero-gradient adaptation undefined for the normalized step");
  }
  const Matrix projector = norm * norm * I - g * g.transpose();
  // d(g/||g||) = (||g||^2 I - g g') H / ||g||^3
  return I - cfg.eta * (projector * H) / (norm * norm * norm);
}

double open_map_margin(const LqrTask& task, const Policy& policy, const MamlConfig& cfg) {
  const Matrix H = cost_hessian(task, policy);
  const double h_norm = operator_norm_symmetric(H);
  const double numerator =
      cfg.variant == MamlVariant::vanilla ? 1.0 : cost_gradient(task, policy).norm();
  if (h_norm == 0.0) {
    return numerator > 0.0 ? std::numeric_limits<double>::infinity() : -cfg.eta;
  }
  return numerator / h_norm - cfg.eta;
}

}  // namespace maml_lqr
