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

#include "pwcf/neighbors.h"

#include <algorithm>
#include <string>
#include <utility>

#include "pwcf/common.h"

namespace pwcf {

Eigen::MatrixXi nearest_neighbors(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& base,
                                  int k, bool exclude_self) {
  if (queries.rows() != base.rows()) throw Error("nearest_neighbors: dimension mismatch");
  const int n = static_cast<int>(base.cols());
  const int available = exclude_self ? n - 1 : n;
  if (k < 1 || k > available) {
    throw Error("nearest_neighbors: k = " + std::to_string(k) + " but only " +
                std::to_string(available) + " candidates");
  }
  if (exclude_self && queries.cols() != base.cols()) {
    throw Error("nearest_neighbors: self exclusion needs queries == base");
  }
  Eigen::MatrixXi out(k, queries.cols());
  std::vector<std::pair<double, int>> cand;
  cand.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index q = 0; q < queries.cols(); ++q) {
    cand.clear();
    const auto query = queries.col(q);
    for (int j = 0; j < n; ++j) {
      if (exclude_self && j == q) continue;
      cand.emplace_back((base.col(j) - query).squaredNorm(), j);
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    for (int t = 0; t < k; ++t) out(t, q) = cand[static_cast<std::size_t>(t)].second;
  }
  return out;
}

PseudoLabels knn_pseudo_label(const FeatureMatrix& source, const LabelVector& source_labels,
                              const FeatureMatrix& target, int k) {
  if (source.dim() != target.dim()) throw Error("knn_pseudo_label: dimension mismatch");
  if (source_labels.count() != source.count()) throw Error("knn_pseudo_label: label count");
  if (k > source.count()) {
    throw Error("knn_pseudo_label: k = " + std::to_string(k) + " exceeds " +
                std::to_string(source.count()) + " source samples");
  }
  const Eigen::MatrixXi nn = nearest_neighbors(target.values(), source.values(), k, false);
  PseudoLabels out;
  out.labels.resize(static_cast<std::size_t>(target.count()));
  out.confidence.resize(out.labels.size());
  std::vector<int> votes(static_cast<std::size_t>(source_labels.num_classes()));
  for (int q = 0; q < target.count(); ++q) {
    std::fill(votes.begin(), votes.end(), 0);
    for (int t = 0; t < k; ++t) ++votes[static_cast<std::size_t>(source_labels[nn(t, q)])];
    // max_element returns the first maximum, i.e. the smaller class index.
    const auto best = std::max_element(votes.begin(), votes.end());
    out.labels[static_cast<std::size_t>(q)] = static_cast<int>(best - votes.begin());
    out.confidence[static_cast<std::size_t>(q)] = static_cast<double>(*best) / k;
  }
  return out;
}

HfonMatrix::HfonMatrix(int num_classes, Eigen::MatrixXd histograms)
    : num_classes_(num_classes), histograms_(std::move(histograms)) {
  if (histograms_.rows() != num_classes_) throw Error("HfonMatrix: row count != num_classes");
}

HfonMatrix compute_hfon(const FeatureMatrix& features, std::span<const int> labels, int k,
                        int num_classes) {
  const int n = features.count();
  if (static_cast<int>(labels.size()) != n) throw Error("compute_hfon: label count mismatch");
  if (num_classes < 1) throw Error("compute_hfon: num_classes must be >= 1");
  if (n <= k) {
    throw Error("compute_hfon: need more than k = " + std::to_string(k) + " samples, got " +
                std::to_string(n));
  }
  for (int l : labels) {
    if (l < 0 || l >= num_classes) throw Error("compute_hfon: label out of range");
  }
  const Eigen::MatrixXi nn = nearest_neighbors(features.values(), features.values(), k, true);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(num_classes, n);
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < k; ++t) h(labels[static_cast<std::size_t>(nn(t, i))], i) += 1.0;
  }
  h /= static_cast<double>(k);
  return HfonMatrix(num_classes, std::move(h));
}

double hfon_distance(const Eigen::Ref<const Eigen::VectorXd>& a,
                     const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) throw Error("hfon_distance: length mismatch");
  return (a - b).squaredNorm();
}

}  // namespace pwcf
