// Copyright 2026 The PWCF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <gtest/gtest.h>

#include "pwcf/common.h"
#include "pwcf/graph.h"
#include "pwcf/optimizer.h"
#include "pwcf/synthetic.h"
#include "test_util.h"

namespace pwcf {
namespace {

using testing::random_labels;
using testing::random_matrix;
using testing::random_signs;

Eigen::MatrixXd random_orthonormal(int d, int r, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(d, r, rng));
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, r);
}

struct Instance {
  TrainingProblem problem;
  ModelState state;
};

Instance random_instance(int d, int r, int n, std::mt19937_64& rng) {
  Instance in;
  TrainingProblem& p = in.problem;
  const int c = 3;
  p.xt = random_matrix(d, n, rng);
  p.xs = random_matrix(d, n, rng);
  const std::vector<int> ls = random_labels(n, c, rng);
  const std::vector<int> lt = random_labels(n, c, rng);
  p.ys = LabelVector(ls, c).one_hot();
  p.triplets = triplet_differences(mine_triplets(DomainView{p.xt, lt}, DomainView{p.xs, ls}),
                                   p.xt, p.xs);
  p.xt_gram = p.xt * p.xt.transpose();
  p.xs_gram = p.xs * p.xs.transpose();
  const LaplacianGraph g = build_affinity(p.xt, p.xs, p.xt, p.xs, 3);
  Eigen::MatrixXd x(d, 2 * n);
  x << p.xt, p.xs;
  p.manifold_gram = x * (g.laplacian * x.transpose());
  in.state.w = random_orthonormal(d, r, rng);
  in.state.c = random_matrix(r, c, rng);
  in.state.bt = random_signs(r, n, rng);
  in.state.bs = random_signs(r, n, rng);
  return in;
}

TEST(PcaInit, DiagonalCovarianceSpansTopAxes) {
  std::mt19937_64 rng(1);
  Eigen::MatrixXd x = random_matrix(3, 400, rng);
  x.row(0) *= 3.0;
  x.row(1) *= 2.0;
  const PcaInit init = pca_init(x, 2);
  EXPECT_LE(orthonormality_error(init.w), 1e-10);
  EXPECT_NEAR(std::abs(init.w(0, 0)), 1.0, 0.05);
  EXPECT_NEAR(std::abs(init.w(1, 1)), 1.0, 0.05);
  EXPECT_NEAR(init.w.row(2).norm(), 0.0, 0.1);
}

TEST(PcaInit, MatchesDenseEigensolverOracle) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 5; ++rep) {
    const Eigen::MatrixXd x = random_matrix(7, 30, rng) * random_matrix(30, 30, rng);
    const PcaInit init = pca_init(x, 4);
    EXPECT_LE(orthonormality_error(init.w), 1e-10);
    const Eigen::MatrixXd scatter = x * x.transpose();
    Eigen::EigenSolver<Eigen::MatrixXd> oracle(scatter);
    std::vector<double> values;
    for (int i = 0; i < 7; ++i) values.push_back(oracle.eigenvalues()(i).real());
    std::sort(values.rbegin(), values.rend());
    double previous = 1e300;
    for (int j = 0; j < 4; ++j) {
      const double variance = init.w.col(j).dot(scatter * init.w.col(j));
      EXPECT_NEAR(variance, values[static_cast<std::size_t>(j)], 1e-8 * values[0]);
      EXPECT_LE(variance, previous * (1 + 1e-12));
      previous = variance;
      for (int i = 0; i < 7; ++i) {
        if (std::abs(init.w(i, j)) > 1e-12) {
          EXPECT_GT(init.w(i, j), 0.0);
          break;
        }
      }
    }
  }
}

TEST(PcaInit, RankDeficientIsPadded) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd x = random_matrix(6, 2, rng) * random_matrix(2, 40, rng);
  const PcaInit init = pca_init(x, 4, 9);
  EXPECT_EQ(init.padded_columns, 2);
  EXPECT_LE(orthonormality_error(init.w), 1e-10);
  EXPECT_EQ(pca_init(x, 4, 9).w, init.w);
}

TEST(PcaInit, TooManyBitsRejected) {
  EXPECT_THROW(pca_init(Eigen::MatrixXd::Ones(3, 5), 4), Error);
}

TEST(FullGradient, ZeroWhenNothingIsActive) {
  std::mt19937_64 rng(4);
  Instance in = random_instance(5, 2, 8, rng);
  in.problem.triplets = TripletDifferences{Eigen::MatrixXd(5, 0), Eigen::MatrixXd(5, 0)};
  RunConfig cfg;
  cfg.theta = 0.0;
  cfg.lambda3 = 0.0;
  EXPECT_EQ(full_gradient(in.state, in.problem, cfg).norm(), 0.0);
}

TEST(FullGradient, ManifoldTermMatchesFiniteDifference) {
  std::mt19937_64 rng(5);
  const Instance in = random_instance(6, 3, 10, rng);
  RunConfig cfg;
  cfg.theta = 0.0;
  cfg.ablation.disable_triplet = true;
  const Eigen::MatrixXd analytic = full_gradient(in.state, in.problem, cfg);
  Eigen::MatrixXd numeric(6, 3);
  const double h = 1e-5;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 3; ++j) {
      Eigen::MatrixXd p = in.state.w;
      Eigen::MatrixXd m = in.state.w;
      p(i, j) += h;
      m(i, j) -= h;
      const double fp = cfg.lambda3 * (p.transpose() * in.problem.manifold_gram * p).trace();
      const double fm = cfg.lambda3 * (m.transpose() * in.problem.manifold_gram * m).trace();
      numeric(i, j) = (fp - fm) / (2 * h);
    }
  }
  EXPECT_LE((analytic - numeric).norm(), 1e-5 * analytic.norm());
}

TEST(FullGradient, QuantizationTermReevaluated) {
  std::mt19937_64 rng(6);
  Instance in = random_instance(5, 3, 9, rng);
  in.state.bt = sign_matrix(in.state.w.transpose() * in.problem.xt);
  in.state.bs = sign_matrix(in.state.w.transpose() * in.problem.xs);
  RunConfig cfg;
  cfg.lambda3 = 0.0;
  cfg.ablation.disable_triplet = true;
  Eigen::MatrixXd x(5, 18);
  x << in.problem.xt, in.problem.xs;
  const Eigen::MatrixXd expect =
      2.0 * cfg.theta * (x * x.transpose() * in.state.w - x * sign_matrix(in.state.w.transpose() * x).transpose());
  EXPECT_LE((full_gradient(in.state, in.problem, cfg) - expect).norm(), 1e-10 * expect.norm());
}

TEST(Cayley, ZeroGradientIsIdentity) {
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd w = random_orthonormal(5, 2, rng);
  EXPECT_EQ(cayley_step(w, Eigen::MatrixXd::Zero(5, 2), 0.1), w);
}

TEST(Cayley, PreservesOrthonormality) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd w = random_orthonormal(8, 3, rng);
    const Eigen::MatrixXd g = random_matrix(8, 3, rng) * std::pow(10.0, rep % 7);
    EXPECT_LE(orthonormality_error(cayley_step(w, g, 0.1)), 1e-10);
  }
}

TEST(Cayley, TwoByTwoHandSolve) {
  Eigen::MatrixXd w(2, 1);
  w << 1.0, 0.0;
  Eigen::MatrixXd g(2, 1);
  g << 0.0, 1.0;
  // A = G W^T - W G^T = [[0, -1], [1, 0]]; solve (I + t/2 A) w' = (I - t/2 A) w.
  const double t = 0.1;
  const double a = t / 2.0;
  // (I + aA) = [[1, -a], [a, 1]], rhs = (1, -a).
  const double det = 1.0 + a * a;
  const double x0 = (1.0 * 1.0 + a * (-a)) / det;
  const double x1 = (1.0 * (-a) - a * 1.0) / det;
  const Eigen::MatrixXd out = cayley_step(w, g, t);
  EXPECT_NEAR(out(0, 0), x0, 1e-12);
  EXPECT_NEAR(out(1, 0), x1, 1e-12);
}

TEST(Cayley, LowRankPathMatchesDenseSolve) {
  std::mt19937_64 rng(9);
  const int d = 600;
  const Eigen::MatrixXd w = random_orthonormal(d, 4, rng);
  const Eigen::MatrixXd g = random_matrix(d, 4, rng);
  const double t = 0.05;
  const Eigen::MatrixXd a = g * w.transpose() - w * g.transpose();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd expect = (eye + 0.5 * t * a).lu().solve((eye - 0.5 * t * a) * w);
  const Eigen::MatrixXd got = cayley_step(w, g, t);
  EXPECT_LE((got - expect).norm(), 1e-10);
  EXPECT_LE(orthonormality_error(got), 1e-10);
}

TEST(WStep, ZeroGradientLeavesW) {
  std::mt19937_64 rng(10);
  Instance in = random_instance(5, 2, 8, rng);
  in.problem.triplets = TripletDifferences{Eigen::MatrixXd(5, 0), Eigen::MatrixXd(5, 0)};
  RunConfig cfg;
  cfg.theta = 0.0;
  cfg.lambda3 = 0.0;
  const WStepResult r = w_step(in.state, in.problem, cfg, 5);
  EXPECT_EQ(r.w, in.state.w);
  EXPECT_EQ(r.accepted_steps, 0);
}

TEST(WStep, QuadraticOnlyObjectiveDecreases) {
  std::mt19937_64 rng(11);
  const Instance in = random_instance(8, 3, 20, rng);
  RunConfig cfg;
  cfg.lambda3 = 0.0;
  cfg.ablation.disable_triplet = true;
  ModelState state = in.state;
  double previous = w_objective(state.w, state, in.problem, cfg);
  for (int step = 0; step < 5; ++step) {
    const WStepResult r = w_step(state, in.problem, cfg, 1);
    ASSERT_EQ(r.accepted_steps, 1);
    const double now = w_objective(r.w, state, in.problem, cfg);
    EXPECT_LT(now, previous);
    EXPECT_LE(orthonormality_error(r.w), 1e-10);
    previous = now;
    state.w = r.w;
  }
}

TEST(WStep, NeverIncreasesAndKeepsOrthonormality) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 5; ++rep) {
    const Instance in = random_instance(8, 3, 20, rng);
    const RunConfig cfg;
    const WStepResult r = w_step(in.state, in.problem, cfg, 5);
    EXPECT_LE(r.objective_after, r.objective_before);
    EXPECT_DOUBLE_EQ(r.objective_after, w_objective(r.w, in.state, in.problem, cfg));
    for (double e : r.orthonormality) EXPECT_LE(e, 1e-10);
  }
}

TEST(CStep, LambdaOneZeroGivesZero) {
  std::mt19937_64 rng(13);
  const Eigen::MatrixXd c =
      c_step(random_signs(4, 10, rng), LabelVector(random_labels(10, 3, rng), 3).one_hot(), 0.0, 5.0);
  EXPECT_EQ(c.norm(), 0.0);
}

TEST(CStep, ShrinkageBound) {
  std::mt19937_64 rng(14);
  const Eigen::MatrixXd bs = random_signs(4, 20, rng);
  const Eigen::MatrixXd ys = LabelVector(random_labels(20, 3, rng), 3).one_hot();
  const double lambda2 = 1e6;
  const Eigen::MatrixXd c = c_step(bs, ys, 1.0, lambda2);
  const double bound = (bs * ys.transpose()).norm() / lambda2;
  EXPECT_LE(c.norm(), bound);
}

TEST(CStep, MatchesRidgeOracleAndIsStationary) {
  std::mt19937_64 rng(15);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd bs = random_signs(4, 20, rng);
    const Eigen::MatrixXd ys = LabelVector(random_labels(20, 3, rng), 3).one_hot();
    const double l1 = 0.5 + rep;
    const double l2 = 0.1 * (rep + 1);
    const Eigen::MatrixXd c = c_step(bs, ys, l1, l2);
    // Ridge regression of Y^T on B^T, one output column at a time.
    const Eigen::MatrixXd lhs = l1 * bs * bs.transpose() + l2 * Eigen::MatrixXd::Identity(4, 4);
    for (int k = 0; k < 3; ++k) {
      const Eigen::VectorXd col = lhs.householderQr().solve(l1 * bs * ys.row(k).transpose());
      EXPECT_LE((c.col(k) - col).norm(), 1e-10);
    }
    const Eigen::MatrixXd grad = -2.0 * l1 * bs * (ys - c.transpose() * bs).transpose() + 2.0 * l2 * c;
    EXPECT_LE(grad.norm(), 1e-8 * (1.0 + c.norm()));
  }
}

TEST(CStep, SingularWithoutRidgeRejected) {
  const Eigen::MatrixXd bs = Eigen::MatrixXd::Ones(3, 5);
  const Eigen::MatrixXd ys = LabelVector({0, 1, 0, 1, 0}, 2).one_hot();
  EXPECT_THROW(c_step(bs, ys, 1.0, 0.0), Error);
}

TEST(BtStep, SignConvention) {
  Eigen::MatrixXd proj(2, 2);
  proj << 0.2, -0.1, 0.0, 3.0;
  const Eigen::MatrixXd b = bt_step(Eigen::MatrixXd::Identity(2, 2), proj);
  Eigen::MatrixXd expect(2, 2);
  expect << 1, -1, 1, 1;
  EXPECT_EQ(b, expect);
  EXPECT_EQ(bt_step(Eigen::MatrixXd::Identity(2, 2), -Eigen::MatrixXd::Ones(2, 3)),
            -Eigen::MatrixXd::Ones(2, 3));
}

TEST(BtStep, IdempotentOnCodes) {
  std::mt19937_64 rng(16);
  const Eigen::MatrixXd b = random_signs(5, 7, rng);
  EXPECT_EQ(bt_step(Eigen::MatrixXd::Identity(5, 5), b), b);
}

TEST(BsStep, ReducesToBtStep) {
  std::mt19937_64 rng(17);
  const Eigen::MatrixXd w = random_orthonormal(6, 3, rng);
  const Eigen::MatrixXd xs = random_matrix(6, 10, rng);
  const Eigen::MatrixXd ys = LabelVector(random_labels(10, 3, rng), 3).one_hot();
  const Eigen::MatrixXd c = random_matrix(3, 3, rng);
  EXPECT_EQ(bs_step(w, xs, c, ys, 100.0, 0.0), bt_step(w, xs));
  EXPECT_EQ(bs_step(w, xs, Eigen::MatrixXd::Zero(3, 3), ys, 100.0, 1.0), bt_step(w, xs));
}

TEST(BsStep, MatchesDenseSolveOracle) {
  std::mt19937_64 rng(18);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::MatrixXd w = random_orthonormal(6, 4, rng);
    const Eigen::MatrixXd xs = random_matrix(6, 15, rng);
    const Eigen::MatrixXd ys = LabelVector(random_labels(15, 3, rng), 3).one_hot();
    const Eigen::MatrixXd c = random_matrix(4, 3, rng);
    const double theta = 0.5 + rep;
    const double l1 = 2.0;
    const Eigen::MatrixXd lhs = theta * Eigen::MatrixXd::Identity(4, 4) + l1 * c * c.transpose();
    const Eigen::MatrixXd rhs = theta * w.transpose() * xs + l1 * c * ys;
    const Eigen::MatrixXd relaxed = lhs.fullPivLu().solve(rhs);
    const Eigen::MatrixXd b = bs_step(w, xs, c, ys, theta, l1);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 15; ++j) {
        if (std::abs(relaxed(i, j)) < 1e-9) continue;
        ASSERT_EQ(b(i, j), relaxed(i, j) >= 0.0 ? 1.0 : -1.0);
      }
    }
  }
}

TEST(BsStep, SingularSystemRejected) {
  std::mt19937_64 rng(19);
  const Eigen::MatrixXd w = random_orthonormal(6, 4, rng);
  EXPECT_THROW(bs_step(w, random_matrix(6, 5, rng), Eigen::MatrixXd::Zero(4, 3),
                       LabelVector({0, 1, 2, 0, 1}, 3).one_hot(), 0.0, 1.0),
               Error);
}

DatasetPair small_pair(std::uint64_t seed) {
  SyntheticSpec spec = benchmark_spec(seed);
  spec.dim = 16;
  spec.classes = 4;
  spec.source_count = 80;
  spec.target_count = 60;
  spec.nuisance_rank = 2;
  spec.shift.rotation_planes = 8;
  return generate_synthetic_pair(spec);
}

TEST(Train, ZeroIterationsReturnsInitialization) {
  const DatasetPair pair = small_pair(1);
  RunConfig cfg;
  cfg.r = 8;
  cfg.max_iters = 0;
  const TrainResult r = train(pair.training_view(), cfg);
  ASSERT_EQ(r.model.trace.size(), 1u);
  const PreparedProblem prepared = prepare_problem(pair.training_view(), cfg);
  Eigen::MatrixXd pooled(16, 140);
  pooled << prepared.problem.xt, prepared.problem.xs;
  EXPECT_EQ(r.model.w, pca_init(pooled, 8, cfg.seed).w);
  EXPECT_EQ(r.model.c.norm(), 0.0);
  EXPECT_EQ(r.codes.bt.cwiseAbs().minCoeff(), 1.0);
  EXPECT_EQ(r.codes.bs.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Train, ObjectiveDecreasesAndStaysOrthonormal) {
  const DatasetPair pair = small_pair(2);
  RunConfig cfg;
  cfg.r = 8;
  const TrainResult r = train(pair.training_view(), cfg);
  const auto& trace = r.model.trace;
  ASSERT_GE(trace.size(), 2u);
  EXPECT_LE(trace.size(), 51u);
  EXPECT_LT(trace.back().loss.total, trace.front().loss.total);
  for (const IterationRecord& rec : trace) EXPECT_LE(rec.orthonormality, 1e-6);
  EXPECT_LE(orthonormality_error(r.model.w), 1e-6);
  EXPECT_EQ(r.codes.bt.cwiseAbs().minCoeff(), 1.0);
  EXPECT_EQ(r.codes.bs.cwiseAbs().maxCoeff(), 1.0);
}

TEST(Train, SameSeedIsDeterministic) {
  const DatasetPair pair = small_pair(3);
  RunConfig cfg;
  cfg.r = 8;
  cfg.max_iters = 5;
  const TrainResult a = train(pair.training_view(), cfg);
  const TrainResult b = train(pair.training_view(), cfg);
  EXPECT_EQ(a.model.w, b.model.w);
  EXPECT_EQ(a.codes.bt, b.codes.bt);
  EXPECT_EQ(a.codes.bs, b.codes.bs);
  EXPECT_EQ(format_trace(a.model.trace), format_trace(b.model.trace));
}

TEST(Train, TooFewSamplesRejected) {
  SyntheticSpec spec;
  spec.classes = 2;
  spec.dim = 4;
  spec.source_count = 5;
  spec.target_count = 5;
  RunConfig cfg;
  cfg.r = 2;
  EXPECT_THROW(train(generate_synthetic_pair(spec).training_view(), cfg), Error);
}

TEST(Train, EveryAblationRuns) {
  const DatasetPair pair = small_pair(4);
  for (const std::string& flag : ablation_flag_names()) {
    RunConfig cfg;
    cfg.r = 8;
    cfg.max_iters = 5;
    cfg.ablation.set(flag);
    const TrainResult r = train(pair.training_view(), cfg);
    EXPECT_LE(orthonormality_error(r.model.w), 1e-6) << flag;
    if (flag == "disable_manifold") {
      for (const auto& rec : r.model.trace) EXPECT_EQ(rec.loss.manifold, 0.0);
    }
  }
}

}  // namespace
}  // namespace pwcf
