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

#include "maml_lqr/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "maml_lqr/errors.hpp"

namespace maml_lqr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void push(TrainRecord& rec, const Matrix& w, double value, double grad_norm) {
  rec.iterates.emplace_back(w);
  rec.values.push_back(value);
  rec.grad_norms.push_back(grad_norm);
}

TrainRecord finish(TrainRecord rec, StopReason reason) {
  rec.stop_reason = reason;
  rec.converged = reason == StopReason::grad_tol;
  return rec;
}

// Shared descent loop; `value` returns +inf where undefined and `gradient`
// may throw DomainError / NumericalError near the boundary.
template <typename ValueF, typename GradF>
TrainRecord descend(const Matrix& init, ValueF&& value, GradF&& gradient, double step,
                    const StopRule& stop, bool use_armijo) {
  stop.validate();
  TrainRecord rec;
  Matrix w = init;
  for (std::size_t steps = 0;; ++steps) {
    const double v = value(w);
    if (!std::isfinite(v) || v > stop.value_blowup) {
      push(rec, w, kInf, kInf);
      return finish(std::move(rec), StopReason::diverged);
    }
    Matrix g;
    try {
      g = gradient(w);
    } catch (const DomainError&) {
      push(rec, w, v, kInf);
      return finish(std::move(rec), StopReason::diverged);
    } catch (const NumericalError&) {
      push(rec, w, v, kInf);
      return finish(std::move(rec), StopReason::diverged);
    }
    const double gn = g.norm();
    push(rec, w, v, gn);
    if (gn < stop.grad_tol) return finish(std::move(rec), StopReason::grad_tol);
    if (steps >= stop.max_iter) return finish(std::move(rec), StopReason::max_iter);

    if (use_armijo) {
      try {
        const double t = armijo_step(value, g, w, -g);
        w -= t * g;
      } catch (const LineSearchError&) {
        return finish(std::move(rec), StopReason::diverged);
      }
    } else {
      w -= step * g;
    }
  }
}

}  // namespace

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::grad_tol: return "grad_tol";
    case StopReason::max_iter: return "max_iter";
    case StopReason::diverged: return "diverged";
  }
  return "unknown";
}

void StopRule::validate() const {
  if (!(grad_tol > 0.0) || max_iter == 0 || !(value_blowup > 0.0)) {
    throw DomainError("stop rule thresholds must be positive");
  }
}

double armijo_step(const ValueFn& value_fn, const Matrix& grad, const Matrix& w,
                   const Matrix& direction, const ArmijoParams& params) {
  const double slope = (grad.array() * direction.array()).sum();
  if (!(slope < 0.0)) {
    throw std::invalid_argument("Armijo step needs a descent direction");
  }
  const double f0 = value_fn(w);
  double t = params.t0;
  for (int k = 0; k <= params.max_shrinks; ++k) {
    const double f = value_fn(w + t * direction);
    if (std::isfinite(f) && f <= f0 + params.sigma * t * slope) return t;
    t *= params.shrink;
  }
  throw LineSearchError("Armijo line search found no acceptable step");
}

TrainRecord maml_train(const TaskSet& ts, const MamlConfig& cfg, const Policy& init,
                       const StopRule& stop, const TrainMode& mode, bool use_armijo) {
  cfg.validate();
  auto value = [&](const Matrix& w) {
    const MamlEval ev = maml_value(ts, Policy(w), cfg);
    return ev.defined ? ev.value : kInf;
  };

  if (mode.kind == TrainMode::Kind::full_batch) {
    auto gradient = [&](const Matrix& w) { return maml_gradient(ts, Policy(w), cfg); };
    return descend(init.gain(), value, gradient, cfg.beta, stop, use_armijo);
  }

  if (mode.batch == 0) throw DomainError("sampled mode needs a positive batch size");
  std::mt19937_64 rng(mode.seed);
  std::discrete_distribution<std::size_t> pick(ts.weights().begin(), ts.weights().end());
  auto gradient = [&](const Matrix& w) {
    std::vector<LqrTask> drawn;
    drawn.reserve(mode.batch);
    for (std::size_t b = 0; b < mode.batch; ++b) drawn.push_back(ts.tasks()[pick(rng)]);
    return maml_gradient(TaskSet::uniform(std::move(drawn)), Policy(w), cfg);
  };
  return descend(init.gain(), value, gradient, cfg.beta, stop, use_armijo);
}

TrainRecord gradient_descent(const LqrTask& task, const Policy& init, double step,
                             const StopRule& stop) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("step must be positive");
  auto value = [&](const Matrix& w) { return eval_cost(task, Policy(w)).value; };
  auto gradient = [&](const Matrix& w) { return cost_gradient(task, Policy(w)); };
  return descend(init.gain(), value, gradient, step, stop, /*use_armijo=*/false);
}

namespace {

template <typename Accept>
Policy draw_init(const TaskSet& ts, const Matrix& lo, const Matrix& hi, std::mt19937_64& rng,
                 std::size_t max_attempts, Accept accept) {
  if (lo.rows() != ts.input_dim() || lo.cols() != ts.state_dim() ||
      hi.rows() != lo.rows() || hi.cols() != lo.cols()) {
    throw DimensionError("init box must match the policy shape");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Matrix w(lo.rows(), lo.cols());
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        w(i, j) = lo(i, j) + (hi(i, j) - lo(i, j)) * unit(rng);
      }
    }
    Policy p(std::move(w));
    bool ok = true;
    for (const LqrTask& t : ts.tasks()) ok = ok && is_stabilizing(t, p);
    if (ok && accept(p)) return p;
  }
  throw DomainError("no admissible initial policy found in the box");
}

}  // namespace

Policy random_stable_init(const TaskSet& ts, const Matrix& lo, const Matrix& hi,
                          std::mt19937_64& rng, std::size_t max_attempts) {
  return draw_init(ts, lo, hi, rng, max_attempts, [](const Policy&) { return true; });
}

Policy random_stable_init(const TaskSet& ts, const MamlConfig& cfg, const Matrix& lo,
                          const Matrix& hi, std::mt19937_64& rng, std::size_t max_attempts) {
  return draw_init(ts, lo, hi, rng, max_attempts,
                   [&](const Policy& p) { return maml_value(ts, p, cfg).defined; });
}

}  // namespace maml_lqr
