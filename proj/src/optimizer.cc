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

#include "pwcf/optimizer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "pwcf/common.h"

namespace pwcf {
namespace {

constexpr Eigen::Index kDirectCayleyMaxDim = 512;

// Objective restricted to W with the codes fixed. The quantization term is
// expanded around precomputed X B^T so each evaluation is O(d^2 r) plus the
// triplet pass.
class WObjective {
 public:
  WObjective(const ModelState& state, const TrainingProblem& problem, const RunConfig& config)
      : problem_(problem), weights_(ObjectiveWeights::from_config(config)), margin_(config.m) {
    if (weights_.theta != 0.0) {
      gram_ = problem.xt_gram + problem.xs_gram;
      cross_ = problem.xt * state.bt.transpose() + problem.xs * state.bs.transpose();
      code_norm_ = state.bt.squaredNorm() + state.bs.squaredNorm();
    }
  }

  double value(const Eigen::MatrixXd& w) const {
    double f = 0.0;
    if (weights_.triplet) f += focal_triplet_loss(w, problem_.triplets, margin_, weights_.gamma).value;
    if (weights_.theta != 0.0) {
      const double q = code_norm_ - 2.0 * w.cwiseProduct(cross_).sum() + trace_quadratic(w, gram_);
      f += weights_.theta * std::max(0.0, q);
    }
    if (weights_.lambda3 != 0.0) {
      f += weights_.lambda3 * std::max(0.0, trace_quadratic(w, problem_.manifold_gram));
    }
    return f;
  }

  Eigen::MatrixXd gradient(const Eigen::MatrixXd& w) const {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(w.rows(), w.cols());
    if (weights_.triplet) g += triplet_gradient(w, problem_.triplets, margin_, weights_.gamma);
    if (weights_.theta != 0.0) g += 2.0 * weights_.theta * (gram_ * w - cross_);
    if (weights_.lambda3 != 0.0) g += 2.0 * weights_.lambda3 * (problem_.manifold_gram * w);
    return g;
  }

 private:
  const TrainingProblem& problem_;
  ObjectiveWeights weights_;
  double margin_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd cross_;
  double code_norm_ = 0.0;
};

void make_first_nonzero_positive(Eigen::Ref<Eigen::VectorXd> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

Eigen::MatrixXd random_signs(int rows, int cols, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> bit(0, 1);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = bit(rng) ? 1.0 : -1.0;
  }
  return m;
}

// B_s step when theta = 0: minimum-norm least-squares solution of
// lambda1 C C^T B = lambda1 C Y_s before taking signs.
Eigen::MatrixXd bs_step_without_quantization(const Eigen::MatrixXd& w, const Eigen::MatrixXd& xs,
                                             const Eigen::MatrixXd& c, const Eigen::MatrixXd& ys,
                                             double lambda1) {
  if (lambda1 == 0.0) return bt_step(w, xs);
  const Eigen::MatrixXd lhs = lambda1 * c * c.transpose();
  const Eigen::MatrixXd rhs = lambda1 * c * ys;
  return sign_matrix(lhs.completeOrthogonalDecomposition().solve(rhs));
}

}  // namespace

PcaInit pca_init(const Eigen::MatrixXd& pooled, int r, std::uint64_t seed) {
  const int d = static_cast<int>(pooled.rows());
  if (r < 1 || r > d) {
    throw Error("pca_init: code length " + std::to_string(r) + " must be in [1, d = " +
                std::to_string(d) + "]");
  }
  const Eigen::MatrixXd scatter = pooled * pooled.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scatter);
  if (eig.info() != Eigen::Success) throw Error("pca_init: eigendecomposition failed");
  const Eigen::VectorXd& values = eig.eigenvalues();  // ascending
  const double top = std::max(0.0, values(d - 1));
  const double tol = top * 1e-10 + 1e-300;

  PcaInit out;
  out.w.resize(d, r);
  out.eigenvalues.resize(r);
  int rank_cols = 0;
  for (int j = 0; j < r; ++j) {
    const int src = d - 1 - j;
    out.eigenvalues(j) = values(src);
    if (values(src) > tol) {
      out.w.col(j) = eig.eigenvectors().col(src);
      ++rank_cols;
    }
  }
  if (rank_cols < r) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int j = rank_cols; j < r; ++j) {
      Eigen::VectorXd v(d);
      double norm = 0.0;
      while (norm < 1e-8) {
        for (int i = 0; i < d; ++i) v(i) = normal(rng);
        for (int pass = 0; pass < 2; ++pass) {
          for (int p = 0; p < j; ++p) v -= out.w.col(p).dot(v) * out.w.col(p);
        }
        norm = v.norm();
      }
      out.w.col(j) = v / norm;
    }
    out.padded_columns = r - rank_cols;
  }
  for (int j = 0; j < r; ++j) make_first_nonzero_positive(out.w.col(j));
  return out;
}

Eigen::MatrixXd full_gradient(const ModelState& state, const TrainingProblem& problem,
                              const RunConfig& config) {
  return WObjective(state, problem, config).gradient(state.w);
}

double w_objective(const Eigen::MatrixXd& w, const ModelState& state,
                   const TrainingProblem& problem, const RunConfig& config) {
  return WObjective(state, problem, config).value(w);
}

Eigen::MatrixXd cayley_step(const Eigen::MatrixXd& w, const Eigen::MatrixXd& g, double tau) {
  if (w.rows() != g.rows() || w.cols() != g.cols()) throw Error("cayley_step: shape mismatch");
  const Eigen::Index d = w.rows();
  const Eigen::Index r = w.cols();
  const bool direct = d <= kDirectCayleyMaxDim;
  Eigen::MatrixXd lhs;
  Eigen::MatrixXd rhs;
  Eigen::MatrixXd u;
  if (direct) {
    // (I + tau/2 A) W' = (I - tau/2 A) W. For skew A every singular value of
    // the left side is >= 1.
    const Eigen::MatrixXd a = g * w.transpose() - w * g.transpose();
    lhs = Eigen::MatrixXd::Identity(d, d) + 0.5 * tau * a;
    rhs = w - 0.5 * tau * (a * w);
  } else {
    // A = U V^T with U = [G, W], V = [W, -G]; Sherman-Morrison-Woodbury
    // turns the d x d solve into a 2r x 2r one.
    u.resize(d, 2 * r);
    Eigen::MatrixXd v(d, 2 * r);
    u << g, w;
    v << w, -g;
    lhs = Eigen::MatrixXd::Identity(2 * r, 2 * r) + 0.5 * tau * (v.transpose() * u);
    rhs = v.transpose() * w;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", rcond);
    throw Error(std::string("cayley_step: linear system is singular (rcond ~ ") + buf + ")");
  }
  if (direct) return lu.solve(rhs);
  return w - tau * (u * lu.solve(rhs));
}

WStepResult w_step(const ModelState& state, const TrainingProblem& problem,
                   const RunConfig& config, int inner_iters, const WStepOptions& options) {
  const WObjective objective(state, problem, config);
  WStepResult out;
  out.w = state.w;
  double f = objective.value(out.w);
  out.objective_before = f;
  Eigen::MatrixXd g = objective.gradient(out.w);
  // Step sizes are measured in units of 1 / max(1, |G|) at entry, so tau and
  // the clamp act as rotation sizes whatever the objective scale.
  const double unit = 1.0 / std::max(1.0, g.norm());
  double tau = config.tau * unit;
  for (int it = 0; it < inner_iters; ++it) {
    if (g.squaredNorm() == 0.0) break;
    double step = tau;
    bool accepted = false;
    Eigen::MatrixXd candidate;
    double f_candidate = f;
    for (int b = 0; b <= options.max_backtracks; ++b) {
      candidate = cayley_step(out.w, g, step);
      f_candidate = objective.value(candidate);
      if (f_candidate < f) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const Eigen::MatrixXd g_candidate = objective.gradient(candidate);
    const Eigen::MatrixXd s = candidate - out.w;
    const double sy = s.cwiseProduct(g_candidate - g).sum();
    tau = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, options.tau_min * unit, options.tau_max * unit) : step;
    out.w = candidate;
    g = g_candidate;
    f = f_candidate;
    ++out.accepted_steps;
    out.orthonormality.push_back(orthonormality_error(out.w));
  }
  out.objective_after = f;
  out.tau = tau;
  return out;
}

Eigen::MatrixXd c_step(const Eigen::MatrixXd& bs, const Eigen::MatrixXd& ys, double lambda1,
                       double lambda2) {
  if (bs.cols() != ys.cols()) throw Error("c_step: B_s and Y_s sample counts differ");
  const Eigen::Index r = bs.rows();
  if (lambda1 == 0.0 && lambda2 > 0.0) return Eigen::MatrixXd::Zero(r, ys.rows());
  const Eigen::MatrixXd lhs =
      lambda1 * bs * bs.transpose() + lambda2 * Eigen::MatrixXd::Identity(r, r);
  const Eigen::MatrixXd rhs = lambda1 * bs * ys.transpose();
  if (lambda2 > 0.0) return lhs.llt().solve(rhs);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible()) {
    throw Error("c_step: B_s B_s^T is rank deficient; lambda2 must be > 0");
  }
  return lu.solve(rhs);
}

Eigen::MatrixXd bt_step(const Eigen::MatrixXd& w, const Eigen::MatrixXd& xt) {
  if (w.rows() != xt.rows()) throw Error("bt_step: shape mismatch");
  return sign_matrix(w.transpose() * xt);
}

Eigen::MatrixXd bs_step(const Eigen::MatrixXd& w, const Eigen::MatrixXd& xs,
                        const Eigen::MatrixXd& c, const Eigen::MatrixXd& ys, double theta,
                        double lambda1) {
  if (w.rows() != xs.rows() || c.rows() != w.cols() || c.cols() != ys.rows() ||
      ys.cols() != xs.cols()) {
    throw Error("bs_step: shape mismatch");
  }
  const Eigen::Index r = w.cols();
  const Eigen::MatrixXd lhs =
      theta * Eigen::MatrixXd::Identity(r, r) + lambda1 * c * c.transpose();
  const Eigen::MatrixXd rhs = theta * (w.transpose() * xs) + lambda1 * c * ys;
  if (theta > 0.0) return sign_matrix(lhs.llt().solve(rhs));
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible()) {
    throw Error("bs_step: theta I + lambda1 C C^T is singular");
  }
  return sign_matrix(lu.solve(rhs));
}

StoredModel PwcfModel::stored() const {
  return StoredModel{ModelKind::kPwcf, standardization, w, c, config.to_text()};
}

PreparedProblem prepare_problem(const TrainingData& data, const RunConfig& config) {
  data.validate();
  config.validate();
  const int k = config.k;
  if (data.source.count() < k + 1 || data.target.count() < k + 1) {
    throw Error("train: both domains need at least k + 1 = " + std::to_string(k + 1) +
                " samples (source " + std::to_string(data.source.count()) + ", target " +
                std::to_string(data.target.count()) + ")");
  }
  if (config.r > data.source.dim()) {
    throw Error("train: code length " + std::to_string(config.r) + " exceeds feature dim " +
                std::to_string(data.source.dim()));
  }
  const ObjectiveWeights weights = ObjectiveWeights::from_config(config);
  const AblationFlags& ablation = config.ablation;

  PreparedProblem out;
  out.standardization =
      Standardization::fit(hconcat(data.target.values(), data.source.values()));
  const FeatureMatrix xt(out.standardization.apply(data.target.values()));
  const FeatureMatrix xs(out.standardization.apply(data.source.values()));
  const int c = data.source_labels.num_classes();

  out.pseudo_labels = knn_pseudo_label(xs, data.source_labels, xt, k);

  Eigen::MatrixXd desc_t;
  Eigen::MatrixXd desc_s;
  if (ablation.disable_hfon) {
    desc_t = xt.values();
    desc_s = xs.values();
  } else {
    desc_s = compute_hfon(xs, data.source_labels.labels(), k, c).histograms();
    desc_t = compute_hfon(xt, out.pseudo_labels.labels, k, c).histograms();
  }

  TrainingProblem& p = out.problem;
  p.xt = xt.values();
  p.xs = xs.values();
  p.ys = data.source_labels.one_hot();
  if (weights.triplet) {
    out.triplets = mine_triplets(DomainView{desc_t, out.pseudo_labels.labels},
                                 DomainView{desc_s, data.source_labels.labels()});
  }
  p.triplets = triplet_differences(out.triplets, p.xt, p.xs);
  p.xt_gram = p.xt * p.xt.transpose();
  p.xs_gram = p.xs * p.xs.transpose();
  const Eigen::Index d = p.xt.rows();
  p.manifold_gram = Eigen::MatrixXd::Zero(d, d);
  if (weights.lambda3 != 0.0) {
    const LaplacianGraph graph = build_affinity(p.xt, p.xs, desc_t, desc_s, k);
    out.graph_edges = static_cast<int>(graph.affinity.nonZeros() / 2);
    const Eigen::MatrixXd x = hconcat(p.xt, p.xs);
    const Eigen::MatrixXd xl = (graph.laplacian * x.transpose()).transpose();  // X L (L symmetric)
    p.manifold_gram = xl * x.transpose();
    p.manifold_gram = 0.5 * (p.manifold_gram + p.manifold_gram.transpose()).eval();
  }
  return out;
}

TrainResult train(const TrainingData& data, const RunConfig& config) {
  PreparedProblem prepared = prepare_problem(data, config);
  const TrainingProblem& problem = prepared.problem;
  const ObjectiveWeights weights = ObjectiveWeights::from_config(config);

  TrainResult out;
  TrainingDiagnostics& diag = out.diagnostics;
  diag.skipped_triplets = prepared.triplets.skipped;
  if (diag.skipped_triplets > 0) {
    diag.warnings.push_back(std::to_string(diag.skipped_triplets) +
                            " anchors skipped: no admissible positive or negative");
  }
  double conf = 0.0;
  for (double v : prepared.pseudo_labels.confidence) conf += v;
  diag.pseudo_label_mean_confidence =
      conf / static_cast<double>(prepared.pseudo_labels.confidence.size());

  const PcaInit init = pca_init(hconcat(problem.xt, problem.xs), config.r, config.seed);
  diag.pca_padded_columns = init.padded_columns;
  if (init.padded_columns > 0) {
    diag.warnings.push_back(std::to_string(init.padded_columns) +
                            " projection columns exceed the data rank and were filled with a "
                            "random orthonormal complement");
  }

  std::mt19937_64 rng(config.seed);
  ModelState state;
  state.w = init.w;
  state.bt = random_signs(config.r, static_cast<int>(problem.xt.cols()), rng);
  state.bs = random_signs(config.r, static_cast<int>(problem.xs.cols()), rng);
  state.c = Eigen::MatrixXd::Zero(config.r, problem.num_classes());

  auto record = [&](int iteration, const WStepResult* ws) {
    IterationRecord rec;
    rec.iteration = iteration;
    rec.loss = total_objective(state, problem, config);
    rec.orthonormality = orthonormality_error(state.w);
    const int accepted = ws != nullptr ? ws->accepted_steps : 0;
    if (ws != nullptr) {
      for (double e : ws->orthonormality) rec.orthonormality = std::max(rec.orthonormality, e);
    }
    rec.accepted_w_steps = accepted;
    if (weights.triplet) {
      const FocalTripletLoss tri = focal_triplet_loss(state.w, problem.triplets, config.m, weights.gamma);
      rec.active_triplets = static_cast<int>(
          std::count_if(tri.trace.hinge.begin(), tri.trace.hinge.end(), [](double h) { return h > 0.0; }));
    }
    out.model.trace.push_back(rec);
  };
  record(0, nullptr);

  for (int iter = 1; iter <= config.max_iters; ++iter) {
    const WStepResult ws = w_step(state, problem, config, config.inner_w_iters);
    state.w = ws.w;
    state.c = c_step(state.bs, problem.ys, weights.lambda1, weights.lambda2);
    state.bt = bt_step(state.w, problem.xt);
    state.bs = weights.theta > 0.0
                   ? bs_step(state.w, problem.xs, state.c, problem.ys, weights.theta, weights.lambda1)
                   : bs_step_without_quantization(state.w, problem.xs, state.c, problem.ys,
                                                  weights.lambda1);
    const double previous = out.model.trace.back().loss.total;
    record(iter, &ws);
    const double current = out.model.trace.back().loss.total;
    const double scale = std::max(std::abs(previous), 1e-300);
    if (std::abs(current - previous) / scale < 1e-4) {
      diag.converged = true;
      break;
    }
  }

  out.model.w = state.w;
  out.model.c = state.c;
  out.model.config = config;
  out.model.standardization = prepared.standardization;
  out.codes = CodesPair{state.bt, state.bs};
  return out;
}

std::string format_trace(const std::vector<IterationRecord>& trace) {
  std::string out =
      "iteration\ttriplet\tquantization\tclassification\tregularizer\tmanifold\ttotal\t"
      "orthonormality\tactive_triplets\tw_steps\n";
  char buf[512];
  for (const IterationRecord& r : trace) {
    std::snprintf(buf, sizeof(buf), "%d\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%.3e\t%d\t%d\n",
                  r.iteration, r.loss.triplet, r.loss.quantization, r.loss.classification,
                  r.loss.regularizer, r.loss.manifold, r.loss.total, r.orthonormality,
                  r.active_triplets, r.accepted_w_steps);
    out += buf;
  }
  return out;
}

}  // namespace pwcf
