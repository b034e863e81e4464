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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "maml_lqr/errors.hpp"
#include "maml_lqr/lqr.hpp"
#include "support/random_tasks.hpp"
#include "support/scalar_oracle.hpp"

namespace maml_lqr {
namespace {

using testing::ScalarTask;

const double kSqrt5 = std::sqrt(5.0);

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

TEST(Policy, VecIsColumnMajor) {
  const Policy p(mat({{1, 2, 3}, {4, 5, 6}}));
  Vector expected(6);
  expected << 1, 4, 2, 5, 3, 6;
  EXPECT_EQ(p.vec(), expected);
  EXPECT_EQ(Policy::from_vec(expected, 2, 3), p);
}

TEST(Policy, RejectsNonFinite) {
  EXPECT_THROW(Policy(mat({{std::nan("")}})), DomainError);
}

TEST(LqrTask, ValidatesShapes) {
  const Matrix I2 = Matrix::Identity(2, 2);
  EXPECT_THROW(LqrTask(I2, Matrix::Ones(3, 1), I2, Matrix::Ones(1, 1), I2), DimensionError);
  EXPECT_THROW(LqrTask(Matrix::Ones(2, 3), Matrix::Ones(2, 1), I2, Matrix::Ones(1, 1), I2),
               DimensionError);
  EXPECT_THROW(LqrTask(I2, Matrix::Ones(2, 1), I2, I2, I2), DimensionError);
}

TEST(LqrTask, ValidatesDefiniteness) {
  EXPECT_THROW(LqrTask::scalar(1, 1, -1, 1, 1), DomainError);
  EXPECT_THROW(LqrTask::scalar(1, 1, 1, 0, 1), DomainError);
  EXPECT_THROW(LqrTask::scalar(1, 1, 1, 1, -0.5), DomainError);
  const Matrix asym = mat({{1, 0.5}, {0, 1}});
  EXPECT_THROW(LqrTask(Matrix::Identity(2, 2), Matrix::Identity(2, 2), asym,
                       Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
               DomainError);
}

TEST(LqrTask, RejectsUnstabilizable) {
  EXPECT_THROW(LqrTask::scalar(2, 0, 1, 1, 1), std::exception);
}

TEST(LqrTask, ScaledCostScalesMatrices) {
  const LqrTask t = LqrTask::scalar(1, 1, 2, 2, 1);
  const LqrTask s = t.with_scaled_cost(3.0);
  EXPECT_DOUBLE_EQ(s.Q()(0, 0), 6.0);
  EXPECT_DOUBLE_EQ(s.R()(0, 0), 6.0);
  EXPECT_DOUBLE_EQ(s.A()(0, 0), 1.0);
  EXPECT_THROW(t.with_scaled_cost(0.0), DomainError);
}

TEST(SpectralRadius, MatchesKnownValues) {
  EXPECT_DOUBLE_EQ(spectral_radius(mat({{-0.7}})), 0.7);
  EXPECT_NEAR(spectral_radius(mat({{0, 1}, {-1, 0}})), 1.0, 1e-14);
  EXPECT_NEAR(spectral_radius(mat({{0.5, 10}, {0, 0.2}})), 0.5, 1e-14);
}

TEST(Lyapunov, ScalarClosedForm) {
  const Matrix X = solve_discrete_lyapunov(mat({{0.6}}), mat({{2.0}}));
  EXPECT_NEAR(X(0, 0), 2.0 / (1 - 0.36), 1e-15);
}

TEST(Lyapunov, KroneckerAndSmithResidual) {
  std::mt19937_64 rng(7);
  for (Eigen::Index d : {3, 12, 20, 24, 30}) {
    Matrix M = testing::random_matrix(rng, d, d);
    M *= 0.9 / spectral_radius(M);
    const Matrix C = testing::random_spd(rng, d, 1.0);
    const Matrix X = solve_discrete_lyapunov(M, C);
    const Matrix residual = X - C - M.transpose() * X * M;
    EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-9 * X.cwiseAbs().maxCoeff()) << "d=" << d;
  }
}

TEST(Lyapunov, ThrowsOnUnitCircle) {
  EXPECT_THROW(solve_discrete_lyapunov(mat({{1.0}}), mat({{1.0}})), NumericalError);
}

TEST(EvalCost, FrozenScalarValues) {
  const LqrTask t = LqrTask::scalar(1, 1, 2, 2, 1);
  EXPECT_NEAR(eval_cost(t, Policy::scalar(0.96)).value, 3.8493589743589743590, 1e-13);
  const CostEval at_star = eval_cost(t, Policy::scalar((kSqrt5 - 1) / 2));
  EXPECT_NEAR(at_star.value, 3.2360679774997894, 1e-13);
  EXPECT_NEAR(at_star.P(0, 0), 1 + kSqrt5, 1e-12);
}

TEST(EvalCost, UnstableIsSentinel) {
  const LqrTask t = LqrTask::scalar(1, 1, 2, 2, 1);
  for (double w : {0.0, 2.0, -1.0, 5.0}) {
    const CostEval ev = eval_cost(t, Policy::scalar(w));
    EXPECT_FALSE(ev.stable);
    EXPECT_TRUE(std::isinf(ev.value));
    EXPECT_EQ(ev.P.size(), 0);
  }
}

TEST(EvalCost, MatchesClosedFormOnScalarGrid) {
  const ScalarTask ref{0.9, 1.3, 0.7, 0.4, 1.5};
  const LqrTask t = LqrTask::scalar(ref.a, ref.b, ref.q, ref.r, ref.s0);
  for (double w = -0.05; w < 1.45; w += 0.0137) {
    const double expected = testing::scalar_cost(ref, w);
    const CostEval ev = eval_cost(t, Policy::scalar(w));
    ASSERT_EQ(ev.stable, std::isfinite(expected)) << w;
    if (ev.stable) {
      EXPECT_NEAR(ev.value, expected, 1e-11 * expected);
    }
  }
}

TEST(EvalCost, SigmaSolvesStateLyapunov) {
  std::mt19937_64 rng(11);
  const auto [task, w] = testing::random_stable_pair(rng, 3, 2);
  const CostEval ev = eval_cost(task, w);
  const Matrix M = task.A() - task.B() * w.gain();
  EXPECT_LT((ev.sigma_w - task.Sigma0() - M * ev.sigma_w * M.transpose()).norm(), 1e-10);
  EXPECT_NEAR(ev.value, (ev.P * task.Sigma0()).trace(), 1e-10 * ev.value);
  EXPECT_NEAR(ev.value,
              ((task.Q() + w.gain().transpose() * task.R() * w.gain()) * ev.sigma_w).trace(),
              1e-9 * ev.value);
}

TEST(CostGradient, FrozenScalarValues) {
  const LqrTask t = LqrTask::scalar(1, 1, 2, 2, 1);
  EXPECT_NEAR(cost_gradient(t, Policy::scalar(1.0))(0, 0), 4.0, 1e-12);
  EXPECT_NEAR(cost_gradient(t, Policy::scalar(0.96))(0, 0), 3.5377116206443129520, 1e-12);
  EXPECT_NEAR(cost_gradient(LqrTask::scalar(1, 1, 0.1, 0.1, 1), Policy::scalar(1.0))(0, 0),
              0.2, 1e-14);
}

TEST(CostGradient, UnstableThrows) {
  EXPECT_THROW(cost_gradient(LqrTask::scalar(1, 1, 2, 2, 1), Policy::scalar(0.0)),
               DomainError);
}

TEST(CostGradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> dim(1, 3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto [task, w] = testing::random_stable_pair(rng, dim(rng), dim(rng));
    const Matrix g = cost_gradient(task, w);
    const double h = 1e-6 * std::max(1.0, w.gain().norm());
    Matrix fd(w.rows(), w.cols());
    for (Eigen::Index k = 0; k < w.gain().size(); ++k) {
      Matrix plus = w.gain(), minus = w.gain();
      plus.data()[k] += h;
      minus.data()[k] -= h;
      fd.data()[k] = (eval_cost(task, Policy(plus)).value -
                      eval_cost(task, Policy(minus)).value) / (2 * h);
    }
    EXPECT_LT((g - fd).norm() / std::max(1.0, g.norm()), 1e-6) << "trial " << trial;
  }
}

TEST(CostHessian, FrozenScalarValues) {
  const LqrTask t = LqrTask::scalar(1, 1, 2, 2, 1);
  EXPECT_NEAR(cost_hessian(t, Policy::scalar(1.0))(0, 0), 12.0, 1e-6);
  EXPECT_NEAR(cost_hessian(t, Policy::scalar((kSqrt5 - 1) / 2))(0, 0),
              12.260990336999411150, 1e-6);
  EXPECT_NEAR(cost_hessian(LqrTask::scalar(0, 1, 1, 1, 1), Policy::scalar(0.0))(0, 0), 4.0,
              1e-6);
}

TEST(CostHessian, MatchesClosedFormSecondDerivative) {
  const ScalarTask ref{1.1, 0.8, 1.5, 0.3, 2.0};
  const LqrTask t = LqrTask::scalar(ref.a, ref.b, ref.q, ref.r, ref.s0);
  for (double w : {0.3, 0.9, 1.5, 2.2}) {
    const double expected = testing::scalar_d2cost(ref, w);
    EXPECT_NEAR(cost_hessian(t, Policy::scalar(w))(0, 0), expected, 1e-6 * std::abs(expected));
  }
}

TEST(CostHessian, SymmetricOverColumnMajorVec) {
  std::mt19937_64 rng(5);
  const auto [task, w] = testing::random_stable_pair(rng, 3, 2);
  const Matrix H = cost_hessian(task, w);
  ASSERT_EQ(H.rows(), 6);
  EXPECT_EQ(H, H.transpose());
  // Column k of H is d(vec grad)/d(vec W)_k.
  const double h = 1e-6;
  Matrix plus = w.gain(), minus = w.gain();
  plus(1, 0) += h;
  minus(1, 0) -= h;
  const Matrix dg = (cost_gradient(task, Policy(plus)) - cost_gradient(task, Policy(minus))) / (2 * h);
  const Eigen::Map<const Vector> dgv(dg.data(), dg.size());
  EXPECT_LT((H.col(1) - dgv).norm(), 1e-5 * H.norm());
}

TEST(CostHessian, ShrinksStepNearBoundary) {
  const LqrTask t = LqrTask::scalar(1, 1, 2, 2, 1);
  EXPECT_NO_THROW(cost_hessian(t, Policy::scalar(6e-6)));
  EXPECT_THROW(cost_hessian(t, Policy::scalar(1e-8)), DomainError);
}

TEST(Riccati, ScalarOracle) {
  const LqrTask t = LqrTask::scalar(1, 1, 2, 2, 1);
  const RiccatiSolution sol = solve_riccati(t);
  EXPECT_NEAR(sol.P(0, 0), 1 + kSqrt5, 1e-10);
  EXPECT_NEAR(sol.w_star.gain()(0, 0), (1 + kSqrt5) / (3 + kSqrt5), 1e-10);
  EXPECT_LT(cost_gradient(t, sol.w_star).norm(), 1e-8);
}

TEST(Riccati, MatchesQuadraticRoot) {
  for (const ScalarTask& ref : {ScalarTask{1.2, 0.5, 1, 3, 1}, ScalarTask{0.3, 2, 0.1, 0.1, 1},
                                ScalarTask{-1.5, 1, 4, 1, 2}}) {
    const LqrTask t = LqrTask::scalar(ref.a, ref.b, ref.q, ref.r, ref.s0);
    EXPECT_NEAR(t.riccati().P(0, 0), testing::scalar_riccati_p(ref), 1e-10);
    EXPECT_NEAR(t.riccati().w_star.gain()(0, 0), testing::scalar_wstar(ref), 1e-10);
  }
}

TEST(Riccati, OptimalGainIsStationaryAndMinimal) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const LqrTask task = testing::random_task(rng, 3, 2);
    const Policy& ws = task.riccati().w_star;
    EXPECT_LT(cost_gradient(task, ws).norm(), 1e-8);
    const Matrix P = task.riccati().P;
    EXPECT_LT((P - eval_cost(task, ws).P).norm(), 1e-8 * P.norm());
    const double best = eval_cost(task, ws).value;
    for (int k = 0; k < 5; ++k) {
      const Policy other(ws.gain() + testing::random_matrix(rng, 2, 3, 0.05));
      const CostEval ev = eval_cost(task, other);
      if (ev.stable) EXPECT_GE(ev.value, best - 1e-12);
    }
  }
}

TEST(SpectralRadius, ReferenceCases) {
  EXPECT_EQ(spectral_radius(Matrix::Zero(3, 3)), 0.0);
  EXPECT_NEAR(spectral_radius(Matrix::Identity(2, 2)), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(spectral_radius(mat({{0.382}})), 0.382);
}

TEST(IsStabilizing, ScalarCases) {
  const LqrTask t = LqrTask::scalar(1, 1, 2, 2, 1);
  EXPECT_TRUE(is_stabilizing(t, Policy::scalar(1.0)));
  EXPECT_FALSE(is_stabilizing(t, Policy::scalar(0.0)));
  EXPECT_FALSE(is_stabilizing(t, Policy::scalar(2.5)));
  EXPECT_NEAR(eval_cost(t, Policy::scalar(1.0)).value, 4.0, 1e-15);
}

TEST(Riccati, DegenerateAndGoldenCases) {
  const RiccatiSolution zero = solve_riccati(LqrTask::scalar(0, 1, 1, 1, 1));
  EXPECT_NEAR(zero.P(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(zero.w_star.gain()(0, 0), 0.0, 1e-12);
  const double phi = (1 + kSqrt5) / 2;
  const RiccatiSolution golden = solve_riccati(LqrTask::scalar(1, 1, 1, 1, 1));
  EXPECT_NEAR(golden.P(0, 0), phi, 1e-10);
  EXPECT_NEAR(golden.w_star.gain()(0, 0), phi / (phi + 1), 1e-10);
}

TEST(ScalingLaw, CostGradientHessianScaleAndOptimumIsShared) {
  std::mt19937_64 rng(41);
  for (double alpha : {0.05, 3.0, 17.5}) {
    const auto [task, w] = testing::random_stable_pair(rng, 2, 2);
    const LqrTask scaled = task.with_scaled_cost(alpha);
    const double c = eval_cost(task, w).value;
    EXPECT_NEAR(eval_cost(scaled, w).value, alpha * c, 1e-10 * alpha * c);
    const Matrix g = cost_gradient(task, w);
    EXPECT_LT((cost_gradient(scaled, w) - alpha * g).norm(), 1e-10 * alpha * g.norm());
    const Matrix H = cost_hessian(task, w);
    // Finite-difference Hessians carry their own truncation noise.
    EXPECT_LT((cost_hessian(scaled, w) - alpha * H).norm(), 1e-8 * alpha * H.norm());
    EXPECT_LT((scaled.riccati().w_star.gain() - task.riccati().w_star.gain()).norm(), 1e-10);
  }
}

}  // namespace
}  // namespace maml_lqr
