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

#ifndef PWCF_OBJECTIVE_H_
#define PWCF_OBJECTIVE_H_

#include <vector>

#include <Eigen/Core>

#include "pwcf/config.h"
#include "pwcf/graph.h"

namespace pwcf {

// Anchor-minus-positive and anchor-minus-negative feature differences, one
// column per triplet. All triplet quantities only ever need these.
struct TripletDifferences {
  Eigen::MatrixXd to_positive;
  Eigen::MatrixXd to_negative;

  int count() const { return static_cast<int>(to_positive.cols()); }
};

TripletDifferences triplet_differences(const TripletSet& triplets,
                                       const Eigen::MatrixXd& target_features,
                                       const Eigen::MatrixXd& source_features);

// (1 - exp(-hinge))^gamma for hinge >= 0.
double focal_weight(double hinge, double gamma);

struct FocalWeightTrace {
  std::vector<double> hinge;   // [|W^T(a-p)|^2 - |W^T(a-n)|^2 + m]_+
  std::vector<double> weight;  // focal weight of each triplet
  bool orthonormality_warning = false;  // |W^T W - I| > 1e-6 on entry
};

struct FocalTripletLoss {
  double value = 0.0;
  FocalWeightTrace trace;
};

FocalTripletLoss focal_triplet_loss(const Eigen::MatrixXd& w, const TripletDifferences& triplets,
                                    double margin, double gamma);

// 2 sum_{hinge arg >= 0} w_i ((a-p)(a-p)^T - (a-n)(a-n)^T) W, focal weights
// held constant.
Eigen::MatrixXd triplet_gradient(const Eigen::MatrixXd& w, const TripletDifferences& triplets,
                                 double margin, double gamma);

// |B_t - W^T X_t|^2 + |B_s - W^T X_s|^2.
double quantization_loss(const Eigen::MatrixXd& w, const Eigen::MatrixXd& xt,
                         const Eigen::MatrixXd& xs, const Eigen::MatrixXd& bt,
                         const Eigen::MatrixXd& bs);

// |Y_s - C^T B_s|^2 with one-hot Y_s (c x n_s).
double classification_loss(const Eigen::MatrixXd& c, const Eigen::MatrixXd& bs,
                           const Eigen::MatrixXd& ys);

// Term weights after ablation switches are applied.
struct ObjectiveWeights {
  bool triplet = true;
  double gamma = 1.0;
  double theta = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;

  static ObjectiveWeights from_config(const RunConfig& config);
};

// Everything about the training set that stays fixed across iterations.
struct TrainingProblem {
  Eigen::MatrixXd xt;  // standardized target features, d x n_t
  Eigen::MatrixXd xs;  // standardized source features, d x n_s
  Eigen::MatrixXd ys;  // one-hot source labels, c x n_s
  TripletDifferences triplets;
  Eigen::MatrixXd xt_gram;        // X_t X_t^T
  Eigen::MatrixXd xs_gram;        // X_s X_s^T
  Eigen::MatrixXd manifold_gram;  // X L X^T (zero when the manifold term is off)

  int dim() const { return static_cast<int>(xt.rows()); }
  int num_classes() const { return static_cast<int>(ys.rows()); }
};

struct ModelState {
  Eigen::MatrixXd w;   // d x r
  Eigen::MatrixXd c;   // r x c
  Eigen::MatrixXd bt;  // r x n_t, entries +-1
  Eigen::MatrixXd bs;  // r x n_s, entries +-1
};

struct LossBreakdown {
  double triplet = 0.0;
  double quantization = 0.0;
  double classification = 0.0;
  double regularizer = 0.0;
  double manifold = 0.0;
  double total = 0.0;
};

// Disabled terms are reported as zero.
LossBreakdown total_objective(const ModelState& state, const TrainingProblem& problem,
                              const RunConfig& config);

// trace(W^T S W) for symmetric S.
double trace_quadratic(const Eigen::MatrixXd& w, const Eigen::MatrixXd& s);

}  // namespace pwcf

#endif  // PWCF_OBJECTIVE_H_
