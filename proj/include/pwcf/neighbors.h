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

#ifndef PWCF_NEIGHBORS_H_
#define PWCF_NEIGHBORS_H_

#include <span>
#include <vector>

#include <Eigen/Core>

#include "pwcf/data.h"

namespace pwcf {

// Exact k-nearest-neighbor lists by squared Euclidean distance. Column q of
// the result holds the indices into `base` of the k nearest columns to
// `queries.col(q)`, closest first; equal distances are ordered by smaller
// index. With `exclude_self`, queries and base are the same set and column q
// never contains q.
Eigen::MatrixXi nearest_neighbors(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& base,
                                  int k, bool exclude_self);

struct PseudoLabels {
  std::vector<int> labels;
  std::vector<double> confidence;  // winner votes / k
};

// Majority class among the k nearest source samples; vote ties go to the
// smaller class index.
PseudoLabels knn_pseudo_label(const FeatureMatrix& source, const LabelVector& source_labels,
                              const FeatureMatrix& target, int k);

// Histogram Feature of Neighbors: column i is the class distribution of the
// k nearest same-domain neighbors of sample i (itself excluded). Each entry
// is a multiple of 1/k.
class HfonMatrix {
 public:
  HfonMatrix() = default;
  HfonMatrix(int num_classes, Eigen::MatrixXd histograms);

  int num_classes() const { return num_classes_; }
  int count() const { return static_cast<int>(histograms_.cols()); }
  const Eigen::MatrixXd& histograms() const { return histograms_; }
  auto col(int i) const { return histograms_.col(i); }

 private:
  int num_classes_ = 0;
  Eigen::MatrixXd histograms_;
};

HfonMatrix compute_hfon(const FeatureMatrix& features, std::span<const int> labels, int k,
                        int num_classes);

// Squared Euclidean distance between two histograms.
double hfon_distance(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b);

}  // namespace pwcf

#endif  // PWCF_NEIGHBORS_H_
