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

#include "pwcf/objective.h"

#include <cmath>

#include "pwcf/common.h"

namespace pwcf {

TripletDifferences triplet_differences(const TripletSet& triplets,
                                       const Eigen::MatrixXd& target_features,
                                       const Eigen::MatrixXd& source_features) {
  if (target_features.rows() != source_features.rows()) {
    throw Error("triplet_differences: dimension mismatch");
  }
  auto feature = [&](const SampleRef& s) {
    const Eigen::MatrixXd& x = s.domain == Domain::kTarget ? target_features : source_features;
    if (s.index < 0 || s.index >= x.cols()) throw Error("triplet index out of range");
    return x.col(s.index);
  };
  const auto n = static_cast<Eigen::Index>(triplets.entries.size());
  TripletDifferences out{Eigen::MatrixXd(target_features.rows(), n),
                         Eigen::MatrixXd(target_features.rows(), n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Triplet& t = triplets.entries[static_cast<std::size_t>(i)];
    out.to_positive.col(i) = feature(t.anchor) - feature(t.positive);
    out.to_negative.col(i) = feature(t.anchor) - feature(t.negative);
  }
  return out;
}

double focal_weight(double hinge, double gamma) {
  if (gamma == 0.0) return 1.0;
  return std::pow(-std::expm1(-hinge), gamma);
}

FocalTripletLoss focal_triplet_loss(const Eigen::MatrixXd& w, const TripletDifferences& triplets,
                                    double margin, double gamma) {
  if (w.rows() != triplets.to_positive.rows()) throw Error("focal_triplet_loss: shape mismatch");
  FocalTripletLoss out;
  out.trace.orthonormality_warning = orthonormality_error(w) > 1e-6;
  const int n = triplets.count();
  out.trace.hinge.resize(static_cast<std::size_t>(n));
  out.trace.weight.resize(static_cast<std::size_t>(n));
  if (n == 0) return out;
  const Eigen::VectorXd dp = (w.transpose() * triplets.to_positive).colwise().squaredNorm();
  const Eigen::VectorXd dn = (w.transpose() * triplets.to_negative).colwise().squaredNorm();
  for (int i = 0; i < n; ++i) {
    const double hinge = std::max(0.0, dp(i) - dn(i) + margin);
    const double weight = hinge > 0.0 ? focal_weight(hinge, gamma) : (gamma == 0.0 ? 1.0 : 0.0);
    out.trace.hinge[static_cast<std::size_t>(i)] = hinge;
    out.trace.weight[static_cast<std::size_t>(i)] = weight;
    out.value += weight * hinge;
  }
  return out;
}

Eigen::MatrixXd triplet_gradient(const Eigen::MatrixXd& w, const TripletDifferences& triplets,
                                 double margin, double gamma) {
  if (w.rows() != triplets.to_positive.rows()) throw Error("triplet_gradient: shape mismatch");
  const int n = triplets.count();
  if (n == 0) return Eigen::MatrixXd::Zero(w.rows(), w.cols());
  const Eigen::MatrixXd pp = w.transpose() * triplets.to_positive;  // r x n
  const Eigen::MatrixXd pn = w.transpose() * triplets.to_negative;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const double arg = pp.col(i).squaredNorm() - pn.col(i).squaredNorm() + margin;
    if (arg >= 0.0) coef(i) = 2.0 * focal_weight(arg, gamma);
  }
  // sum_i c_i (a-p)(a-p)^T W = D diag(c) (W^T D)^T
  return triplets.to_positive * coef.asDiagonal() * pp.transpose() -
         triplets.to_negative * coef.asDiagonal() * pn.transpose();
}

double quantization_loss(const Eigen::MatrixXd& w, const Eigen::MatrixXd& xt,
                         const Eigen::MatrixXd& xs, const Eigen::MatrixXd& bt,
                         const Eigen::MatrixXd& bs) {
  if (bt.rows() != w.cols() || bs.rows() != w.cols() || bt.cols() != xt.cols() ||
      bs.cols() != xs.cols()) {
    throw Error("quantization_loss: shape mismatch");
  }
  return (bt - w.transpose() * xt).squaredNorm() + (bs - w.transpose() * xs).squaredNorm();
}

double classification_loss(const Eigen::MatrixXd& c, const Eigen::MatrixXd& bs,
                           const Eigen::MatrixXd& ys) {
  if (c.rows() != bs.rows() || c.cols() != ys.rows() || bs.cols() != ys.cols()) {
    throw Error("classification_loss: shape mismatch");
  }
  return (ys - c.transpose() * bs).squaredNorm();
}

ObjectiveWeights ObjectiveWeights::from_config(const RunConfig& config) {
  const AblationFlags& a = config.ablation;
  ObjectiveWeights w;
  w.triplet = !a.disable_triplet;
  w.gamma = a.standard_triplet ? 0.0 : config.gamma;
  w.theta = a.disable_quantization ? 0.0 : config.theta;
  w.lambda1 = a.disable_classifier ? 0.0 : config.lambda1;
  w.lambda2 = config.lambda2;
  w.lambda3 = a.disable_manifold ? 0.0 : config.lambda3;
  return w;
}

double trace_quadratic(const Eigen::MatrixXd& w, const Eigen::MatrixXd& s) {
  return (w.transpose() * s * w).trace();
}

LossBreakdown total_objective(const ModelState& state, const TrainingProblem& problem,
                              const RunConfig& config) {
  const ObjectiveWeights weights = ObjectiveWeights::from_config(config);
  const AblationFlags& a = config.ablation;
  LossBreakdown b;
  if (weights.triplet) {
    b.triplet = focal_triplet_loss(state.w, problem.triplets, config.m, weights.gamma).value;
  }
  if (!a.disable_quantization) {
    b.quantization = quantization_loss(state.w, problem.xt, problem.xs, state.bt, state.bs);
  }
  if (!a.disable_classifier) {
    b.classification = classification_loss(state.c, state.bs, problem.ys);
  }
  b.regularizer = state.c.squaredNorm();
  if (!a.disable_manifold) {
    b.manifold = std::max(0.0, trace_quadratic(state.w, problem.manifold_gram));
  }
  b.total = b.triplet + weights.theta * b.quantization + weights.lambda1 * b.classification +
            weights.lambda2 * b.regularizer + weights.lambda3 * b.manifold;
  return b;
}

}  // namespace pwcf
