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

#ifndef PWCF_GRAPH_H_
#define PWCF_GRAPH_H_

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace pwcf {

enum class Domain { kTarget, kSource };

inline Domain opposite(Domain d) {
  return d == Domain::kTarget ? Domain::kSource : Domain::kTarget;
}

struct SampleRef {
  Domain domain = Domain::kTarget;
  int index = 0;
  bool operator==(const SampleRef&) const = default;
};

struct Triplet {
  SampleRef anchor;
  SampleRef positive;  // same class, opposite domain
  SampleRef negative;  // different class, opposite domain
};

struct TripletSet {
  std::vector<Triplet> entries;
  // Anchors for which the opposite domain has no same-class or no
  // different-class sample.
  int skipped = 0;
};

// Per-domain inputs for cross-domain comparisons: `descriptors` is the
// representation distances are measured in (HFON columns, or raw features
// when HFON is ablated) and `labels` the class of each column (pseudo-labels
// for the target).
struct DomainView {
  const Eigen::MatrixXd& descriptors;
  std::span<const int> labels;
};

// One hard triplet per sample of both domains, target anchors first: the
// positive maximizes and the negative minimizes the descriptor distance to
// the anchor. Distance ties go to the smaller index.
TripletSet mine_triplets(const DomainView& target, const DomainView& source);

// Position of a sample in the pooled ordering X = [X_t, X_s].
inline int pooled_index(const SampleRef& s, int target_count) {
  return s.domain == Domain::kTarget ? s.index : target_count + s.index;
}

struct LaplacianGraph {
  Eigen::SparseMatrix<double> affinity;   // Z, pooled order [target, source]
  Eigen::VectorXd degree;                 // D_ii = sum_j Z_ij
  Eigen::SparseMatrix<double> laplacian;  // L = D - Z
  double sigma_within = 1.0;
  double sigma_cross = 1.0;

  int size() const { return static_cast<int>(affinity.rows()); }
  static LaplacianGraph from_affinity(Eigen::SparseMatrix<double> affinity);
};

// kNN affinity graph over the pooled samples. Within a domain, each sample
// links to its k nearest neighbors by feature distance with weight
// exp(-|x_i - x_j|^2 / sigma_w^2); across domains, to its k nearest
// opposite-domain samples by descriptor distance with weight
// exp(-|h_i - h_j|^2 / sigma_c^2). Edge sets are symmetrized by union.
// sigma^2 is the median nonzero squared distance over the edges of its kind
// (1 when there is none).
LaplacianGraph build_affinity(const Eigen::MatrixXd& target_features,
                              const Eigen::MatrixXd& source_features,
                              const Eigen::MatrixXd& target_descriptors,
                              const Eigen::MatrixXd& source_descriptors, int k);

// Manifold loss trace(W^T X L X^T W) for pooled features X. Equals half the
// sum over ordered pairs of Z_ij |W^T x_i - W^T x_j|^2.
double manifold_quadratic(const Eigen::MatrixXd& w, const Eigen::MatrixXd& pooled,
                          const Eigen::SparseMatrix<double>& laplacian);

}  // namespace pwcf

#endif  // PWCF_GRAPH_H_
