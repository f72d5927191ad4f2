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

#ifndef PWCF_DATA_H_
#define PWCF_DATA_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace pwcf {

// A d x n matrix of content features; column j is sample j.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  // Throws pwcf::Error if the matrix is empty or holds a non-finite value.
  explicit FeatureMatrix(Eigen::MatrixXd values);

  int dim() const { return static_cast<int>(values_.rows()); }
  int count() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  auto col(int j) const { return values_.col(j); }

  // Columns at `indices`, in order.
  FeatureMatrix select(std::span<const int> indices) const;

 private:
  Eigen::MatrixXd values_;
};

// Class indices in [0, num_classes) for a set of samples.
class LabelVector {
 public:
  LabelVector() = default;
  LabelVector(std::vector<int> labels, int num_classes);

  int count() const { return static_cast<int>(labels_.size()); }
  int num_classes() const { return num_classes_; }
  const std::vector<int>& labels() const { return labels_; }
  int operator[](int i) const { return labels_[static_cast<std::size_t>(i)]; }

  // c x n matrix with a single 1 per column.
  Eigen::MatrixXd one_hot() const;
  std::vector<int> class_counts() const;
  LabelVector select(std::span<const int> indices) const;

 private:
  std::vector<int> labels_;
  int num_classes_ = 0;
};

// Everything the training entry points may see. Target ground truth is
// deliberately absent.
struct TrainingData {
  FeatureMatrix source;
  LabelVector source_labels;
  FeatureMatrix target;

  void validate() const;
};

struct DatasetPair {
  FeatureMatrix source;
  LabelVector source_labels;
  FeatureMatrix target;
  std::optional<LabelVector> target_truth;

  void validate() const;
  TrainingData training_view() const;
};

// Per-feature affine map x -> (x - mean) / scale.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  // Zero-variance features get scale 1.
  static Standardization fit(const Eigen::MatrixXd& pooled);
  static Standardization identity(int dim);

  int dim() const { return static_cast<int>(mean.size()); }
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

// [a, b] column concatenation.
Eigen::MatrixXd hconcat(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace pwcf

#endif  // PWCF_DATA_H_
