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

#include "maml_lqr/lqr.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <unsupported/Eigen/KroneckerProduct>

#include "maml_lqr/errors.hpp"

namespace maml_lqr {

namespace {

constexpr Eigen::Index kDirectLyapunovMaxDim = 20;
constexpr double kRiccatiTolerance = 1e-12;
constexpr std::size_t kRiccatiMaxIterations = 100000;
constexpr double kRiccatiBlowup = 1e15;

void require_finite(const Matrix& M, const char* name) {
  if (!M.allFinite()) {
    throw DomainError(std::string(name) + " has non-finite entries");
  }
}

void require_symmetric(const Matrix& M, const char* name) {
  if (M.rows() != M.cols()) {
    throw DimensionError(std::string(name) + " must be square");
  }
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw DomainError(std::string(name) + " must be symmetric");
  }
}

// PSD up to roundoff relative to the matrix scale.
void require_psd(const Matrix& M, const char* name) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw DomainError(std::string(name) + " must be positive semidefinite");
  }
}

void require_pd(const Matrix& M, const char* name) {
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) {
    throw DomainError(std::string(name) + " must be positive definite");
  }
}

void check_policy_shape(const LqrTask& task, const Policy& policy) {
  if (policy.rows() != task.input_dim() || policy.cols() != task.state_dim()) {
    throw DimensionError("policy gain is " + std::to_string(policy.rows()) + "x" +
                         std::to_string(policy.cols()) + ", task expects " +
                         std::to_string(task.input_dim()) + "x" +
                         std::to_string(task.state_dim()));
  }
}

RiccatiSolution riccati_iteration(const Matrix& A, const Matrix& B, const Matrix& Q,
                                  const Matrix& R) {
  Matrix P = Q;
  for (std::size_t k = 1; k <= kRiccatiMaxIterations; ++k) {
    const Matrix BtP = B.transpose() * P;
    const Matrix gain = (BtP * B + R).ldlt().solve(BtP * A);
    Matrix next = Q + A.transpose() * P * A - A.transpose() * BtP.transpose() * gain;
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kRiccatiBlowup) {
      throw NumericalError("no stabilizing solution: Riccati iteration diverged");
    }
    const double delta = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    if (delta < kRiccatiTolerance) {
      const Matrix BtPf = B.transpose() * P;
      Matrix w = (BtPf * B + R).ldlt().solve(BtPf * A);
      return RiccatiSolution{P, Policy(std::move(w)), k};
    }
  }
  throw NumericalError("no stabilizing solution: Riccati iteration did not converge");
}

}  // namespace

// ---------------------------------------------------------------------------
// Policy

Policy::Policy(Matrix gain) : gain_(std::move(gain)) {
  require_finite(gain_, "policy gain");
}

Policy Policy::scalar(double w) { return Policy(Matrix::Constant(1, 1, w)); }

Policy Policy::from_vec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw DimensionError("vec length does not match gain shape");
  }
  return Policy(Eigen::Map<const Matrix>(v.data(), rows, cols));
}

Vector Policy::vec() const {
  return Eigen::Map<const Vector>(gain_.data(), gain_.size());
}

// ---------------------------------------------------------------------------
// LqrTask

LqrTask::LqrTask(Matrix A, Matrix B, Matrix Q, Matrix R, Matrix Sigma0)
    : A_(std::move(A)), B_(std::move(B)), Q_(std::move(Q)), R_(std::move(R)),
      Sigma0_(std::move(Sigma0)) {
  const Eigen::Index d = A_.rows();
  const Eigen::Index r = B_.cols();
  if (d == 0 || r == 0) throw DimensionError("task dimensions must be positive");
  if (A_.cols() != d) throw DimensionError("A must be square");
  if (B_.rows() != d) throw DimensionError("B must have as many rows as A");
  if (Q_.rows() != d || Q_.cols() != d) throw DimensionError("Q must be d x d");
  if (R_.rows() != r || R_.cols() != r) throw DimensionError("R must be r x r");
  if (Sigma0_.rows() != d || Sigma0_.cols() != d) {
    throw DimensionError("Sigma0 must be d x d");
  }
  require_finite(A_, "A");
  require_finite(B_, "B");
  require_finite(Q_, "Q");
  require_finite(R_, "R");
  require_finite(Sigma0_, "Sigma0");
  require_symmetric(Q_, "Q");
  require_symmetric(R_, "R");
  require_symmetric(Sigma0_, "Sigma0");
  require_psd(Q_, "Q");
  require_pd(R_, "R");
  require_psd(Sigma0_, "Sigma0");

  riccati_ = riccati_iteration(A_, B_, Q_, R_);
  if (spectral_radius(A_ - B_ * riccati_.w_star.gain()) >= 1.0 - kStabilityMargin) {
    throw NumericalError("no stabilizing solution: Riccati gain is not stabilizing");
  }
}

LqrTask LqrTask::scalar(double a, double b, double q, double r, double sigma0) {
  auto c = [](double x) { return Matrix::Constant(1, 1, x); };
  return LqrTask(c(a), c(b), c(q), c(r), c(sigma0));
}

LqrTask LqrTask::with_scaled_cost(double alpha) const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("cost scale must be positive and finite");
  }
  return LqrTask(A_, B_, alpha * Q_, alpha * R_, Sigma0_);
}

bool operator==(const LqrTask& a, const LqrTask& b) {
  auto same = [](const Matrix& x, const Matrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  return same(a.A_, b.A_) && same(a.B_, b.B_) && same(a.Q_, b.Q_) &&
         same(a.R_, b.R_) && same(a.Sigma0_, b.Sigma0_);
}

// ---------------------------------------------------------------------------
// Evaluation

double spectral_radius(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("spectral_radius needs a square matrix");
  if (!M.allFinite()) throw DomainError("spectral_radius of a non-finite matrix");
  if (M.size() == 0) return 0.0;
  if (M.rows() == 1) return std::abs(M(0, 0));
  Eigen::EigenSolver<Matrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalue solver did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stabilizing(const LqrTask& task, const Policy& policy) {
  check_policy_shape(task, policy);
  const Matrix closed = task.A() - task.B() * policy.gain();
  return spectral_radius(closed) < 1.0 - kStabilityMargin;
}

Matrix solve_discrete_lyapunov(const Matrix& M, const Matrix& C) {
  const Eigen::Index n = M.rows();
  if (M.cols() != n || C.rows() != n || C.cols() != n) {
    throw DimensionError("Lyapunov operands must be square and of equal size");
  }
  if (n == 1) {
    const double denom = 1.0 - M(0, 0) * M(0, 0);
    if (!(denom > 0.0)) throw NumericalError("Lyapunov system is singular");
    return Matrix::Constant(1, 1, C(0, 0) / denom);
  }
  Matrix X;
  if (n <= kDirectLyapunovMaxDim) {
    // vec(M' X M) = (M' (x) M') vec(X)
    const Matrix Mt = M.transpose();
    Matrix lhs = -Eigen::kroneckerProduct(Mt, Mt).eval();
    lhs.diagonal().array() += 1.0;
    const Vector rhs = Eigen::Map<const Vector>(C.data(), C.size());
    Eigen::PartialPivLU<Matrix> lu(lhs);
    const Vector x = lu.solve(rhs);
    X = Eigen::Map<const Matrix>(x.data(), n, n);
  } else {
    // Squared Smith: X_{k+1} = X_k + S_k' X_k S_k, S_{k+1} = S_k^2.
    X = C;
    Matrix S = M;
    bool settled = false;
    for (int k = 0; k < 100; ++k) {
      const Matrix increment = S.transpose() * X * S;
      X += increment;
      S = S * S;
      if (!X.allFinite()) break;
      if (increment.cwiseAbs().maxCoeff() <=
          1e-16 * std::max(1.0, X.cwiseAbs().maxCoeff())) {
        settled = true;
        break;
      }
    }
    if (!settled) throw NumericalError("Lyapunov fixed-point iteration did not settle");
  }
  const Matrix residual = X - C - M.transpose() * X * M;
  if (!X.allFinite() ||
      residual.cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, X.cwiseAbs().maxCoeff())) {
    throw NumericalError("Lyapunov system is singular");
  }
  return 0.5 * (X + X.transpose());
}

CostEval eval_cost(const LqrTask& task, const Policy& policy) {
  check_policy_shape(task, policy);
  const Matrix& W = policy.gain();
  const Matrix closed = task.A() - task.B() * W;
  if (spectral_radius(closed) >= 1.0 - kStabilityMargin) return CostEval{};

  CostEval out;
  out.stable = true;
  const Matrix q_eff = task.Q() + W.transpose() * task.R() * W;
  out.P = solve_discrete_lyapunov(closed, q_eff);
  out.sigma_w = solve_discrete_lyapunov(closed.transpose(), task.Sigma0());
  out.value = (out.P * task.Sigma0()).trace();
  return out;
}

Matrix cost_gradient(const LqrTask& task, const Policy& policy) {
  const CostEval ev = eval_cost(task, policy);
  if (!ev.stable) throw DomainError("gradient undefined: policy is not stabilizing");
  const Matrix& A = task.A();
  const Matrix& B = task.B();
  const Matrix BtP = B.transpose() * ev.P;
  return 2.0 * ((task.R() + BtP * B) * policy.gain() - BtP * A) * ev.sigma_w;
}

Matrix cost_hessian(const LqrTask& task, const Policy& policy, double step) {
  check_policy_shape(task, policy);
  const Eigen::Index rows = policy.rows();
  const Eigen::Index cols = policy.cols();
  const Eigen::Index n = rows * cols;
  const Vector w = policy.vec();

  auto attempt = [&](double h, Matrix& H) {
    H.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector plus = w, minus = w;
      plus(j) += h;
      minus(j) -= h;
      const Policy wp = Policy::from_vec(plus, rows, cols);
      const Policy wm = Policy::from_vec(minus, rows, cols);
      if (!is_stabilizing(task, wp) || !is_stabilizing(task, wm)) return false;
      const Matrix diff = cost_gradient(task, wp) - cost_gradient(task, wm);
      H.col(j) = Eigen::Map<const Vector>(diff.data(), n) / (2.0 * h);
    }
    return true;
  };

  if (!is_stabilizing(task, policy)) {
    throw DomainError("Hessian undefined: policy is not stabilizing");
  }
  Matrix H;
  if (!attempt(step, H) && !attempt(0.1 * step, H)) {
    throw DomainError("Hessian stencil leaves the stabilizing set");
  }
  return 0.5 * (H + H.transpose());
}

RiccatiSolution solve_riccati(const LqrTask& task) {
  RiccatiSolution sol = riccati_iteration(task.A(), task.B(), task.Q(), task.R());
  if (!is_stabilizing(task, sol.w_star)) {
    throw NumericalError("no stabilizing solution: Riccati gain is not stabilizing");
  }
  return sol;
}

}  // namespace maml_lqr
