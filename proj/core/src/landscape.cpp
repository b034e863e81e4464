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

#include "maml_lqr/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maml_lqr/errors.hpp"

namespace maml_lqr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kRejectionBudget = 1000;

Vector as_vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix as_mat(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

template <typename F>
auto guarded(F&& f) -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

double grad_norm_or_inf(const Objective& obj, const Matrix& w) {
  const auto g = obj.gradient(w);
  return g ? g->norm() : kInf;
}

// Every point of the +-clearance stencil around w must be defined.
bool clear_of_boundary(const Objective& obj, const Matrix& w, double clearance) {
  if (!obj.value(w)) return false;
  Vector x = as_vec(w);
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    for (double s : {-clearance, clearance}) {
      Vector y = x;
      y(j) += s;
      if (!obj.value(as_mat(y, w.rows(), w.cols()))) return false;
    }
  }
  return true;
}

struct NewtonResult {
  Vector x;
  double grad_norm = kInf;
};

std::optional<NewtonResult> newton(const Objective& obj, Vector x,
                                   const SearchOptions& opt) {
  const Eigen::Index rows = obj.rows, cols = obj.cols;
  auto grad_at = [&](const Vector& v) -> std::optional<Vector> {
    const auto g = obj.gradient(as_mat(v, rows, cols));
    if (!g || !g->allFinite()) return std::nullopt;
    return as_vec(*g);
  };

  auto g = grad_at(x);
  if (!g) return std::nullopt;
  double gn = g->norm();
  // Past the tolerance, keep stepping while steps are still macroscopic: near
  // a singular Hessian Newton only converges linearly.
  std::size_t polish = 0;
  double last_step = kInf;
  for (std::size_t it = 0; it < opt.max_newton_iter; ++it) {
    if (gn < opt.tol && polish++ >= opt.polish_iter && last_step < 1e-2 * opt.merge_radius) {
      break;
    }
    const auto H = obj.hessian(as_mat(x, rows, cols));
    if (!H || !H->allFinite()) break;
    const Vector dx = H->completeOrthogonalDecomposition().solve(-*g);
    if (!dx.allFinite()) break;
    bool accepted = false;
    double t = 1.0;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      const Vector xn = x + t * dx;
      const auto gnew = grad_at(xn);
      if (gnew && gnew->norm() < gn) {
        last_step = t * dx.norm();
        x = xn;
        g = gnew;
        gn = gnew->norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return NewtonResult{std::move(x), gn};
}

std::vector<Matrix> grid_seeds(const Objective& obj, const ScanGrid& grid,
                               std::size_t cap) {
  const std::size_t n = grid.resolution;
  const Eigen::Index dims = grid.dims();
  std::vector<double> gn(grid.point_count());
  for (std::size_t i = 0; i < gn.size(); ++i) gn[i] = grad_norm_or_inf(obj, grid.point(i));

  std::vector<std::size_t> minima;
  if (dims == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(gn[i])) continue;
      const double left = i > 0 ? gn[i - 1] : kInf;
      const double right = i + 1 < n ? gn[i + 1] : kInf;
      if (gn[i] <= left && gn[i] <= right) minima.push_back(i);
    }
  } else {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const std::size_t idx = a * n + b;
        if (!std::isfinite(gn[idx])) continue;
        bool is_min = true;
        for (int da = -1; da <= 1 && is_min; ++da) {
          for (int db = -1; db <= 1 && is_min; ++db) {
            if (da == 0 && db == 0) continue;
            const long na = static_cast<long>(a) + da, nb = static_cast<long>(b) + db;
            if (na < 0 || nb < 0 || na >= static_cast<long>(n) || nb >= static_cast<long>(n)) {
              continue;
            }
            is_min = gn[idx] <= gn[static_cast<std::size_t>(na) * n + static_cast<std::size_t>(nb)];
          }
        }
        if (is_min) minima.push_back(idx);
      }
    }
  }
  // Flat stretches can make every grid point a minimum; thin them evenly.
  if (minima.size() > cap) {
    std::vector<std::size_t> thinned;
    for (std::size_t j = 0; j < cap; ++j) thinned.push_back(minima[j * minima.size() / cap]);
    minima.swap(thinned);
  }
  std::vector<Matrix> seeds;
  seeds.reserve(minima.size());
  for (std::size_t i : minima) seeds.push_back(grid.point(i));
  return seeds;
}

bool vec_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// Objectives

std::optional<Matrix> fd_hessian(
    const std::function<std::optional<Matrix>(const Matrix&)>& gradient, const Matrix& w,
    double step) {
  const Eigen::Index n = w.size();
  const Vector x = as_vec(w);
  Matrix H(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector plus = x, minus = x;
    plus(j) += step;
    minus(j) -= step;
    const auto gp = gradient(as_mat(plus, w.rows(), w.cols()));
    const auto gm = gradient(as_mat(minus, w.rows(), w.cols()));
    if (!gp || !gm) return std::nullopt;
    H.col(j) = as_vec(*gp - *gm) / (2.0 * step);
  }
  return Matrix(0.5 * (H + H.transpose()));
}

Objective plain_cost_objective(const LqrTask& task) {
  Objective obj;
  obj.rows = task.input_dim();
  obj.cols = task.state_dim();
  obj.value = [task](const Matrix& w) -> std::optional<double> {
    const CostEval ev = eval_cost(task, Policy(w));
    if (!ev.stable) return std::nullopt;
    return ev.value;
  };
  obj.gradient = [task](const Matrix& w) {
    return guarded([&] { return cost_gradient(task, Policy(w)); });
  };
  obj.hessian = [task](const Matrix& w) {
    return guarded([&] { return cost_hessian(task, Policy(w)); });
  };
  return obj;
}

Objective average_cost_objective(const TaskSet& ts) {
  Objective obj;
  obj.rows = ts.input_dim();
  obj.cols = ts.state_dim();
  obj.value = [ts](const Matrix& w) -> std::optional<double> {
    double total = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const CostEval ev = eval_cost(ts.tasks()[i], Policy(w));
      if (!ev.stable) return std::nullopt;
      total += ts.weights()[i] * ev.value;
    }
    return total;
  };
  obj.gradient = [ts](const Matrix& w) {
    return guarded([&] {
      Matrix g = Matrix::Zero(w.rows(), w.cols());
      for (std::size_t i = 0; i < ts.size(); ++i) {
        g += ts.weights()[i] * cost_gradient(ts.tasks()[i], Policy(w));
      }
      return g;
    });
  };
  obj.hessian = [ts](const Matrix& w) {
    return guarded([&] {
      Matrix H = Matrix::Zero(w.size(), w.size());
      for (std::size_t i = 0; i < ts.size(); ++i) {
        H += ts.weights()[i] * cost_hessian(ts.tasks()[i], Policy(w));
      }
      return H;
    });
  };
  return obj;
}

Objective maml_objective(const TaskSet& ts, const MamlConfig& cfg) {
  cfg.validate();
  Objective obj;
  obj.rows = ts.input_dim();
  obj.cols = ts.state_dim();
  obj.value = [ts, cfg](const Matrix& w) -> std::optional<double> {
    const MamlEval ev = maml_value(ts, Policy(w), cfg);
    if (!ev.defined) return std::nullopt;
    return ev.value;
  };
  obj.gradient = [ts, cfg](const Matrix& w) {
    return guarded([&] { return maml_gradient(ts, Policy(w), cfg); });
  };
  // The normalized gradient is itself a difference quotient, so its Hessian
  // needs a wider stencil to stay above the noise.
  const double step = cfg.variant == MamlVariant::vanilla ? 1e-5 : 1e-4;
  obj.hessian = [gradient = obj.gradient, step](const Matrix& w) {
    return fd_hessian(gradient, w, step);
  };
  return obj;
}

// ---------------------------------------------------------------------------
// Grid

ScanGrid ScanGrid::scalar(double lo, double hi, std::size_t resolution) {
  return ScanGrid{Matrix::Constant(1, 1, lo), Matrix::Constant(1, 1, hi), resolution};
}

void ScanGrid::validate() const {
  if (lo.size() == 0 || lo.rows() != hi.rows() || lo.cols() != hi.cols()) {
    throw DimensionError("grid bounds must be nonempty and of equal shape");
  }
  if (!lo.allFinite() || !hi.allFinite() || !(lo.array() < hi.array()).all()) {
    throw DomainError("grid needs lo < hi entrywise");
  }
  if (resolution < 3) throw DomainError("grid resolution must be at least 3");
}

std::size_t ScanGrid::point_count() const {
  std::size_t count = 1;
  for (Eigen::Index i = 0; i < dims(); ++i) count *= resolution;
  return count;
}

Matrix ScanGrid::point(std::size_t index) const {
  Matrix w(lo.rows(), lo.cols());
  const Eigen::Index n = dims();
  const double denom = static_cast<double>(resolution - 1);
  for (Eigen::Index axis = n - 1; axis >= 0; --axis) {
    const std::size_t i = index % resolution;
    index /= resolution;
    w.data()[axis] =
        lo.data()[axis] + (hi.data()[axis] - lo.data()[axis]) * (static_cast<double>(i) / denom);
  }
  return w;
}

bool ScanGrid::contains(const Matrix& w, double slack) const {
  return ((w.array() >= lo.array() - slack) && (w.array() <= hi.array() + slack)).all();
}

bool operator==(const ScanGrid& a, const ScanGrid& b) {
  return a.resolution == b.resolution && a.lo.rows() == b.lo.rows() &&
         a.lo.cols() == b.lo.cols() && a.hi.rows() == b.hi.rows() &&
         a.hi.cols() == b.hi.cols() && a.lo == b.lo && a.hi == b.hi;
}

double ScanTable::masked_fraction() const {
  if (values.empty()) return 0.0;
  const auto masked = std::count_if(values.begin(), values.end(),
                                    [](const auto& v) { return !v.has_value(); });
  return static_cast<double>(masked) / static_cast<double>(values.size());
}

std::optional<std::size_t> ScanTable::argmin() const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] && (!best || *values[i] < *values[*best])) best = i;
  }
  return best;
}

ScanTable grid_scan(const std::function<std::optional<double>(const Matrix&)>& value,
                    const ScanGrid& grid) {
  grid.validate();
  if (grid.dims() > kMaxDenseScanDims) {
    throw DomainError("dense scans are limited to " + std::to_string(kMaxDenseScanDims) +
                      " gain entries");
  }
  ScanTable table;
  const std::size_t count = grid.point_count();
  table.points.reserve(count);
  table.values.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    table.points.push_back(grid.point(i));
    table.values.push_back(value(table.points.back()));
  }
  return table;
}

ScanTable grid_scan(const Objective& objective, const ScanGrid& grid) {
  return grid_scan(objective.value, grid);
}

// ---------------------------------------------------------------------------
// Stationary points

std::string_view to_string(StationaryKind k) {
  switch (k) {
    case StationaryKind::local_min: return "local_min";
    case StationaryKind::local_max: return "local_max";
    case StationaryKind::saddle: return "saddle";
    case StationaryKind::degenerate: return "degenerate";
  }
  return "unknown";
}

StationaryKind classify_hessian(const Vector& eig, double degeneracy_tol) {
  const double max_abs = eig.cwiseAbs().maxCoeff();
  if (eig.cwiseAbs().minCoeff() < degeneracy_tol * std::max(1.0, max_abs)) {
    return StationaryKind::degenerate;
  }
  if ((eig.array() > 0).all()) return StationaryKind::local_min;
  if ((eig.array() < 0).all()) return StationaryKind::local_max;
  return StationaryKind::saddle;
}

std::vector<StationaryPoint> find_stationary_points(const Objective& objective,
                                                    const ScanGrid& grid,
                                                    const SearchOptions& options) {
  grid.validate();
  if (grid.lo.rows() != objective.rows || grid.lo.cols() != objective.cols) {
    throw DimensionError("grid shape does not match the objective");
  }

  std::vector<Matrix> seeds;
  if (grid.dims() <= kMaxDenseScanDims) {
    seeds = grid_seeds(objective, grid, options.max_grid_seeds);
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < options.uniform_seeds; ++s) {
    Matrix w(grid.lo.rows(), grid.lo.cols());
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      w.data()[j] = grid.lo.data()[j] + (grid.hi.data()[j] - grid.lo.data()[j]) * unit(rng);
    }
    seeds.push_back(std::move(w));
  }

  struct Candidate {
    Vector x;
    double grad_norm;
  };
  std::vector<Candidate> found;
  for (const Matrix& seed : seeds) {
    const auto res = newton(objective, as_vec(seed), options);
    if (!res || !(res->grad_norm < options.accept_grad_norm)) continue;
    const Matrix w = as_mat(res->x, objective.rows, objective.cols);
    if (!grid.contains(w, 1e-12)) continue;
    if (!clear_of_boundary(objective, w, options.boundary_clearance)) continue;
    found.push_back({res->x, res->grad_norm});
  }

  // Merge duplicates, keeping the representative with the smaller gradient.
  std::sort(found.begin(), found.end(),
            [](const Candidate& a, const Candidate& b) { return vec_less(a.x, b.x); });
  std::vector<Candidate> merged;
  for (const Candidate& c : found) {
    auto near = std::find_if(merged.begin(), merged.end(), [&](const Candidate& m) {
      return (m.x - c.x).norm() < options.merge_radius;
    });
    if (near == merged.end()) {
      merged.push_back(c);
    } else if (c.grad_norm < near->grad_norm) {
      *near = c;
    }
  }

  std::vector<StationaryPoint> points;
  for (const Candidate& c : merged) {
    const Matrix w = as_mat(c.x, objective.rows, objective.cols);
    const auto H = objective.hessian(w);
    const auto v = objective.value(w);
    if (!H || !v) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(*H, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) continue;
    StationaryPoint p;
    p.w = Policy(w);
    p.value = *v;
    p.grad_norm = c.grad_norm;
    p.hessian_eigs.assign(eig.eigenvalues().data(),
                          eig.eigenvalues().data() + eig.eigenvalues().size());
    p.kind = classify_hessian(eig.eigenvalues(), options.degeneracy_tol);
    points.push_back(std::move(p));
  }
  return points;
}

EpsilonGlobality epsilon_globality(const std::vector<StationaryPoint>& points,
                                   std::optional<double> reference_min) {
  double best = kInf, worst = -kInf;
  for (const StationaryPoint& p : points) {
    if (p.kind != StationaryKind::local_min) continue;
    best = std::min(best, p.value);
    worst = std::max(worst, p.value);
  }
  if (!std::isfinite(best)) {
    throw NumericalError("no local minima found; the scan is insufficient");
  }
  EpsilonGlobality out;
  out.global_min_value = reference_min ? std::min(best, *reference_min) : best;
  out.epsilon_gap = std::max(0.0, worst - out.global_min_value);
  out.is_global = out.epsilon_gap < 1e-6 * std::max(1.0, std::abs(out.global_min_value));
  return out;
}

std::size_t LandscapeReport::local_min_count() const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [](const auto& p) {
    return p.kind == StationaryKind::local_min;
  }));
}

LandscapeReport analyze_landscape(const Objective& objective, const ScanGrid& grid,
                                  const SearchOptions& options) {
  LandscapeReport report;
  report.box = grid;
  std::optional<double> scan_min;
  Matrix scan_argmin;
  if (grid.dims() <= kMaxDenseScanDims) {
    const ScanTable table = grid_scan(objective, grid);
    report.masked_fraction = table.masked_fraction();
    if (const auto best = table.argmin()) {
      scan_min = *table.values[*best];
      scan_argmin = table.points[*best];
    }
  }
  report.points = find_stationary_points(objective, grid, options);
  const EpsilonGlobality eg = epsilon_globality(report.points, scan_min);
  report.global_min_value = eg.global_min_value;
  report.epsilon_gap = eg.epsilon_gap;
  report.is_global = eg.is_global;
  report.assumption1_ok = std::none_of(report.points.begin(), report.points.end(),
                                       [](const auto& p) {
                                         return p.kind == StationaryKind::degenerate;
                                       });
  const StationaryPoint* best_min = nullptr;
  for (const StationaryPoint& p : report.points) {
    if (p.kind == StationaryKind::local_min && (!best_min || p.value < best_min->value)) {
      best_min = &p;
    }
  }
  report.global_minimizer = (scan_min && *scan_min < best_min->value)
                                ? Policy(scan_argmin)
                                : best_min->w;
  return report;
}

Assumption1Check check_assumption1(const Objective& objective, const ScanGrid& grid,
                                   const SearchOptions& options) {
  Assumption1Check out;
  out.points = find_stationary_points(objective, grid, options);
  out.min_abs_hessian_det = kInf;
  for (const StationaryPoint& p : out.points) {
    double det = 1.0;
    for (double e : p.hessian_eigs) det *= e;
    out.min_abs_hessian_det = std::min(out.min_abs_hessian_det, std::abs(det));
  }
  out.ok = std::none_of(out.points.begin(), out.points.end(), [](const auto& p) {
    return p.kind == StationaryKind::degenerate;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Task-set generators

TaskSet make_scaled_taskset(const LqrTask& base, const std::vector<double>& scales,
                            std::vector<double> weights) {
  if (scales.empty()) throw DomainError("need at least one scale");
  std::vector<LqrTask> tasks;
  tasks.reserve(scales.size());
  for (double c : scales) {
    if (!(c > 0.0)) throw DomainError("scales must be positive");
    tasks.push_back(base.with_scaled_cost(c));
  }
  if (weights.empty()) return TaskSet::uniform(std::move(tasks));
  return TaskSet(std::move(tasks), std::move(weights));
}

double perturbation_halfwidth(double delta, Eigen::Index rows, Eigen::Index cols) {
  return delta / (8.0 * std::sqrt(static_cast<double>(rows * cols)));
}

LqrTask perturb_task(const LqrTask& base, double delta, std::mt19937_64& rng) {
  if (!(delta >= 0.0)) throw DomainError("delta must be nonnegative");
  if (delta == 0.0) return base;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto shifted = [&](const Matrix& m) {
    const double c = perturbation_halfwidth(delta, m.rows(), m.cols());
    Matrix out = m;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) += c * unit(rng);
    }
    return out;
  };
  auto shifted_symmetric = [&](const Matrix& m) {
    const double c = perturbation_halfwidth(delta, m.rows(), m.cols());
    Matrix out = m;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        out(i, j) += c * unit(rng);
        out(j, i) = out(i, j);
      }
    }
    return out;
  };
  for (std::size_t attempt = 0; attempt < kRejectionBudget; ++attempt) {
    Matrix A = shifted(base.A());
    Matrix B = shifted(base.B());
    Matrix Q = shifted_symmetric(base.Q());
    Matrix R = shifted_symmetric(base.R());
    try {
      return LqrTask(std::move(A), std::move(B), std::move(Q), std::move(R), base.Sigma0());
    } catch (const DomainError&) {
    } catch (const NumericalError&) {
    }
  }
  throw DomainError("perturbation rejection budget exhausted");
}

std::vector<LandscapeReport> perturb_sweep(const LqrTask& base, const SweepSpec& spec,
                                           const MamlConfig& cfg, const ScanGrid& grid,
                                           const SearchOptions& options) {
  if (!(spec.delta >= 0.0)) throw DomainError("delta must be nonnegative");
  if (spec.k == 0 || spec.trials == 0) throw DomainError("k and trials must be positive");
  std::vector<LandscapeReport> reports;
  reports.reserve(spec.trials);
  for (std::size_t trial = 0; trial < spec.trials; ++trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    std::vector<LqrTask> tasks;
    tasks.reserve(spec.k);
    for (std::size_t i = 0; i < spec.k; ++i) tasks.push_back(perturb_task(base, spec.delta, rng));
    const TaskSet ts = TaskSet::uniform(std::move(tasks));
    reports.push_back(analyze_landscape(maml_objective(ts, cfg), grid, options));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Argmins

Policy average_cost_argmin(const TaskSet& ts, const ScanGrid& grid,
                           const SearchOptions& options) {
  grid.validate();
  const Objective obj = average_cost_objective(ts);
  Matrix start;
  if (grid.dims() <= kMaxDenseScanDims) {
    const ScanTable table = grid_scan(obj, grid);
    const auto best = table.argmin();
    if (!best) throw DomainError("no stabilizing gain on the grid");
    start = table.points[*best];
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double best = kInf;
    for (std::size_t s = 0; s < std::max<std::size_t>(options.uniform_seeds, 1); ++s) {
      Matrix w(grid.lo.rows(), grid.lo.cols());
      for (Eigen::Index j = 0; j < w.size(); ++j) {
        w.data()[j] = grid.lo.data()[j] + (grid.hi.data()[j] - grid.lo.data()[j]) * unit(rng);
      }
      if (const auto v = obj.value(w); v && *v < best) {
        best = *v;
        start = w;
      }
    }
    if (!std::isfinite(best)) throw DomainError("no stabilizing gain among the seeds");
  }
  const auto res = newton(obj, as_vec(start), options);
  if (!res) return Policy(start);
  return Policy(as_mat(res->x, obj.rows, obj.cols));
}

ArgminComparison compare_argmins(const TaskSet& ts, const MamlConfig& cfg,
                                 const ScanGrid& grid, const SearchOptions& options) {
  const LandscapeReport report = analyze_landscape(maml_objective(ts, cfg), grid, options);
  ArgminComparison out;
  out.maml_argmin = report.global_minimizer;
  out.maml_min_value = report.global_min_value;
  out.average_argmin = average_cost_argmin(ts, grid, options);
  out.distance = (out.maml_argmin.gain() - out.average_argmin.gain()).norm();
  Matrix mean = Matrix::Zero(ts.input_dim(), ts.state_dim());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out.task_grad_norms.push_back(cost_gradient(ts.tasks()[i], out.maml_argmin).norm());
    mean += ts.weights()[i] * ts.tasks()[i].riccati().w_star.gain();
  }
  out.mean_optimal_policy = Policy(std::move(mean));
  return out;
}

}  // namespace maml_lqr
