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

#include "pwcf/data.h"

#include <cmath>
#include <string>

#include "pwcf/common.h"

namespace pwcf {

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw Error("feature matrix is empty (" + std::to_string(values_.rows()) +
                " x " + std::to_string(values_.cols()) + ")");
  }
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      if (!std::isfinite(values_(i, j))) {
        throw Error("non-finite feature value at row " + std::to_string(i) +
                    ", column " + std::to_string(j));
      }
    }
  }
}

FeatureMatrix FeatureMatrix::select(std::span<const int> indices) const {
  Eigen::MatrixXd out(values_.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    const int src = indices[j];
    if (src < 0 || src >= count()) throw Error("column index out of range");
    out.col(static_cast<Eigen::Index>(j)) = values_.col(src);
  }
  return FeatureMatrix(std::move(out));
}

LabelVector::LabelVector(std::vector<int> labels, int num_classes)
    : labels_(std::move(labels)), num_classes_(num_classes) {
  if (num_classes_ < 2) {
    throw Error("label vector needs at least 2 classes, got " + std::to_string(num_classes_));
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= num_classes_) {
      throw Error("label " + std::to_string(labels_[i]) + " at position " + std::to_string(i) +
                  " outside [0, " + std::to_string(num_classes_) + ")");
    }
  }
}

Eigen::MatrixXd LabelVector::one_hot() const {
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(num_classes_, count());
  for (int i = 0; i < count(); ++i) y(labels_[static_cast<std::size_t>(i)], i) = 1.0;
  return y;
}

std::vector<int> LabelVector::class_counts() const {
  std::vector<int> counts(static_cast<std::size_t>(num_classes_), 0);
  for (int l : labels_) ++counts[static_cast<std::size_t>(l)];
  return counts;
}

LabelVector LabelVector::select(std::span<const int> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= count()) throw Error("label index out of range");
    out.push_back(labels_[static_cast<std::size_t>(i)]);
  }
  return LabelVector(std::move(out), num_classes_);
}

void TrainingData::validate() const {
  if (source.dim() != target.dim()) {
    throw Error("source dim " + std::to_string(source.dim()) + " != target dim " +
                std::to_string(target.dim()));
  }
  if (source_labels.count() != source.count()) {
    throw Error("source has " + std::to_string(source.count()) + " samples but " +
                std::to_string(source_labels.count()) + " labels");
  }
}

void DatasetPair::validate() const {
  training_view().validate();
  if (target_truth && target_truth->count() != target.count()) {
    throw Error("target has " + std::to_string(target.count()) + " samples but " +
                std::to_string(target_truth->count()) + " truth labels");
  }
}

TrainingData DatasetPair::training_view() const {
  return TrainingData{source, source_labels, target};
}

Standardization Standardization::fit(const Eigen::MatrixXd& pooled) {
  Standardization s;
  const double n = static_cast<double>(pooled.cols());
  s.mean = pooled.rowwise().sum() / n;
  s.scale.resize(pooled.rows());
  for (Eigen::Index i = 0; i < pooled.rows(); ++i) {
    const double var = (pooled.row(i).array() - s.mean(i)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale(i) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Standardization Standardization::identity(int dim) {
  return Standardization{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& x) const {
  if (x.rows() != mean.size()) {
    throw Error("standardization expects dim " + std::to_string(mean.size()) + ", got " +
                std::to_string(x.rows()));
  }
  return (x.colwise() - mean).array().colwise() / scale.array();
}

Eigen::MatrixXd hconcat(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) throw Error("hconcat: row mismatch");
  Eigen::MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace pwcf
