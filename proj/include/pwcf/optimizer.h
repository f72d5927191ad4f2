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

#ifndef PWCF_OPTIMIZER_H_
#define PWCF_OPTIMIZER_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pwcf/config.h"
#include "pwcf/data.h"
#include "pwcf/encoder.h"
#include "pwcf/graph.h"
#include "pwcf/neighbors.h"
#include "pwcf/objective.h"

namespace pwcf {

struct PcaInit {
  Eigen::MatrixXd w;              // d x r, orthonormal columns
  Eigen::VectorXd eigenvalues;    // top r eigenvalues of X X^T, descending
  int padded_columns = 0;         // columns filled from a seeded complement
};

// Top-r eigenvectors of X X^T, each column's first nonzero entry made
// positive. Columns beyond the numerical rank come from a seeded random
// orthonormal complement.
PcaInit pca_init(const Eigen::MatrixXd& pooled, int r, std::uint64_t seed = 0);

// dF/dW for the W-dependent terms: triplet, 2 theta (X X^T W - X B^T) and
// 2 lambda3 X L X^T W.
Eigen::MatrixXd full_gradient(const ModelState& state, const TrainingProblem& problem,
                              const RunConfig& config);

// W' = (I + tau/2 A)^{-1} (I - tau/2 A) W with A = G W^T - W G^T.
Eigen::MatrixXd cayley_step(const Eigen::MatrixXd& w, const Eigen::MatrixXd& g, double tau);

struct WStepOptions {
  double tau_min = 1e-4;
  double tau_max = 1.0;
  int max_backtracks = 10;
};

struct WStepResult {
  Eigen::MatrixXd w;
  double objective_before = 0.0;
  double objective_after = 0.0;
  int accepted_steps = 0;
  double tau = 0.0;  // step size that would be used next
  std::vector<double> orthonormality;  // |W^T W - I| after each accepted step
};

// Inner loop of Cayley steps with Barzilai-Borwein step sizes and
// halving backtracking. Never returns a W with a larger objective.
WStepResult w_step(const ModelState& state, const TrainingProblem& problem,
                   const RunConfig& config, int inner_iters, const WStepOptions& options = {});

// The part of the objective that depends on W (C and codes held fixed).
double w_objective(const Eigen::MatrixXd& w, const ModelState& state,
                   const TrainingProblem& problem, const RunConfig& config);

// C = (lambda1 B_s B_s^T + lambda2 I)^{-1} lambda1 B_s Y_s^T.
Eigen::MatrixXd c_step(const Eigen::MatrixXd& bs, const Eigen::MatrixXd& ys, double lambda1,
                       double lambda2);

// B_t = sgn(W^T X_t).
Eigen::MatrixXd bt_step(const Eigen::MatrixXd& w, const Eigen::MatrixXd& xt);

// B_s = sgn((theta I + lambda1 C C^T)^{-1} (theta W^T X_s + lambda1 C Y_s)).
Eigen::MatrixXd bs_step(const Eigen::MatrixXd& w, const Eigen::MatrixXd& xs,
                        const Eigen::MatrixXd& c, const Eigen::MatrixXd& ys, double theta,
                        double lambda1);

struct IterationRecord {
  int iteration = 0;
  LossBreakdown loss;
  double orthonormality = 0.0;  // worst |W^T W - I| over this iteration's W steps
  int active_triplets = 0;
  int accepted_w_steps = 0;
};

struct PwcfModel {
  Eigen::MatrixXd w;
  Eigen::MatrixXd c;
  RunConfig config;
  Standardization standardization;
  std::vector<IterationRecord> trace;

  LinearHashEncoder encoder() const { return {standardization, w}; }
  StoredModel stored() const;
};

struct CodesPair {
  Eigen::MatrixXd bt;
  Eigen::MatrixXd bs;
};

struct TrainingDiagnostics {
  int skipped_triplets = 0;
  int pca_padded_columns = 0;
  double pseudo_label_mean_confidence = 0.0;
  bool converged = false;
  std::vector<std::string> warnings;
};

struct TrainResult {
  PwcfModel model;
  CodesPair codes;
  TrainingDiagnostics diagnostics;
};

// Everything computed once before the alternating loop.
struct PreparedProblem {
  TrainingProblem problem;
  Standardization standardization;
  PseudoLabels pseudo_labels;
  TripletSet triplets;
  int graph_edges = 0;
};

PreparedProblem prepare_problem(const TrainingData& data, const RunConfig& config);

// Pseudo-labels, HFON, triplet mining and PCA initialization, then
// alternating W, C, B_t, B_s updates until the relative objective change
// drops below 1e-4 or max_iters is reached.
TrainResult train(const TrainingData& data, const RunConfig& config);

// Tab-separated per-iteration trace with a header row.
std::string format_trace(const std::vector<IterationRecord>& trace);

}  // namespace pwcf

#endif  // PWCF_OPTIMIZER_H_
