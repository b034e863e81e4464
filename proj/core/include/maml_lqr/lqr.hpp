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

#include <Eigen/Dense>
#include <cstddef>
#include <limits>

namespace maml_lqr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Stability margin on the closed-loop spectral radius.
inline constexpr double kStabilityMargin = 1e-10;

/// Absolute tolerance used when checking symmetry of cost and moment matrices.
inline constexpr double kSymmetryTolerance = 1e-12;

/// Linear state feedback a = -W s. The gain is r x d.
///
/// vec() flattens column-major; every Hessian and Jacobian in the library is
/// expressed over this ordering.
class Policy {
 public:
  Policy() = default;
  explicit Policy(Matrix gain);

  static Policy scalar(double w);
  static Policy from_vec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

  const Matrix& gain() const { return gain_; }
  Eigen::Index rows() const { return gain_.rows(); }
  Eigen::Index cols() const { return gain_.cols(); }
  Vector vec() const;

  friend bool operator==(const Policy& a, const Policy& b) {
    return a.gain_.rows() == b.gain_.rows() &&
           a.gain_.cols() == b.gain_.cols() && a.gain_ == b.gain_;
  }

 private:
  Matrix gain_;
};

struct RiccatiSolution {
  Matrix P;
  Policy w_star;
  std::size_t iterations = 0;
};

/// One deterministic discrete-time LQR instance:
///   s_{t+1} = A s_t + B a_t,  cost sum_t s_t' Q s_t + a_t' R a_t,
/// with E[s_0 s_0'] = Sigma0.
///
/// Construction validates shapes, symmetry, definiteness, and that the Riccati
/// iteration reaches a stabilizing gain. The Riccati solution is kept with the
/// task since every consumer needs W* sooner or later.
class LqrTask {
 public:
  LqrTask(Matrix A, Matrix B, Matrix Q, Matrix R, Matrix Sigma0);

  /// The 1-D task (a, b, q, r, s0 s0').
  static LqrTask scalar(double a, double b, double q, double r, double sigma0);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Matrix& Q() const { return Q_; }
  const Matrix& R() const { return R_; }
  const Matrix& Sigma0() const { return Sigma0_; }
  Eigen::Index state_dim() const { return A_.rows(); }
  Eigen::Index input_dim() const { return B_.cols(); }

  const RiccatiSolution& riccati() const { return riccati_; }

  /// Same dynamics and Sigma0, cost matrices multiplied by `alpha` > 0.
  LqrTask with_scaled_cost(double alpha) const;

  friend bool operator==(const LqrTask& a, const LqrTask& b);

 private:
  Matrix A_, B_, Q_, R_, Sigma0_;
  RiccatiSolution riccati_;
};

/// Result of evaluating C(W). When `stable` is false the value is +inf and the
/// matrices are empty; callers branch on `stable`, never on the value.
struct CostEval {
  double value = std::numeric_limits<double>::infinity();
  Matrix P;
  Matrix sigma_w;
  bool stable = false;
};

double spectral_radius(const Matrix& M);

bool is_stabilizing(const LqrTask& task, const Policy& policy);

/// Solves X = C + M' X M. Dense Kronecker solve up to d = 20, squared Smith
/// iteration beyond. Throws NumericalError when the system is singular or the
/// iteration does not settle.
Matrix solve_discrete_lyapunov(const Matrix& M, const Matrix& C);

CostEval eval_cost(const LqrTask& task, const Policy& policy);

/// grad C(W) = 2((R + B'PB)W - B'PA) Sigma_W.
Matrix cost_gradient(const LqrTask& task, const Policy& policy);

/// Hessian of C over vec(W), by central differences of cost_gradient and then
/// symmetrized. If a stencil point is not stabilizing the step is shrunk by 10
/// once before giving up with DomainError.
Matrix cost_hessian(const LqrTask& task, const Policy& policy,
                    double step = 1e-5);

/// Value iteration P <- Q + A'PA - A'PB(B'PB + R)^{-1}B'PA from P = Q.
RiccatiSolution solve_riccati(const LqrTask& task);

}  // namespace maml_lqr
