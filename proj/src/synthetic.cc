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

#include "pwcf/synthetic.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/QR>

#include "pwcf/common.h"

namespace pwcf {
namespace {

Eigen::MatrixXd gaussian(int rows, int cols, double sd, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = sd * dist(rng);
  }
  return m;
}

}  // namespace

DatasetPair generate_synthetic_pair(const SyntheticSpec& spec) {
  const int c = spec.classes;
  const int d = spec.dim;
  if (c < 2) throw Error("synthetic: need at least 2 classes");
  if (d < c) throw Error("synthetic: dim " + std::to_string(d) + " < classes " + std::to_string(c));
  if (spec.source_count < c || spec.target_count < c) {
    throw Error("synthetic: source and target counts must be >= number of classes");
  }
  if (spec.nuisance_rank < 0 || spec.nuisance_rank > d) {
    throw Error("synthetic: nuisance rank outside [0, dim]");
  }
  if (spec.shift.rotation_planes < 0 || 2 * spec.shift.rotation_planes > d) {
    throw Error("synthetic: rotation planes exceed dim / 2");
  }

  std::mt19937_64 rng(spec.seed);
  const Eigen::MatrixXd means = gaussian(d, c, spec.class_spread, rng);
  Eigen::MatrixXd nuisance_basis = Eigen::MatrixXd::Zero(d, spec.nuisance_rank);
  if (spec.nuisance_rank > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(d, spec.nuisance_rank, 1.0, rng));
    nuisance_basis = qr.householderQ() * Eigen::MatrixXd::Identity(d, spec.nuisance_rank);
  }
  Eigen::VectorXd offset = gaussian(d, 1, 1.0, rng).col(0);
  offset *= spec.shift.translation / offset.norm();

  Eigen::MatrixXd rotation = Eigen::MatrixXd::Identity(d, d);
  const double angle = spec.shift.rotation_deg * std::numbers::pi / 180.0;
  for (int p = 0; p < spec.shift.rotation_planes; ++p) {
    const int a = 2 * p;
    rotation(a, a) = std::cos(angle);
    rotation(a, a + 1) = -std::sin(angle);
    rotation(a + 1, a) = std::sin(angle);
    rotation(a + 1, a + 1) = std::cos(angle);
  }

  auto draw = [&](int n, double noise_scale, std::vector<int>& labels) {
    Eigen::MatrixXd x(d, n);
    labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const int label = i % c;
      labels[static_cast<std::size_t>(i)] = label;
      x.col(i) = means.col(label) + gaussian(d, 1, spec.noise * noise_scale, rng).col(0);
      if (spec.nuisance_rank > 0) {
        x.col(i) += nuisance_basis *
                    gaussian(spec.nuisance_rank, 1, spec.nuisance_scale, rng).col(0);
      }
    }
    return x;
  };

  std::vector<int> source_labels;
  std::vector<int> target_labels;
  Eigen::MatrixXd xs = draw(spec.source_count, 1.0, source_labels);
  Eigen::MatrixXd xt = draw(spec.target_count, spec.shift.noise_scale, target_labels);
  xt = (rotation * xt).colwise() + offset;

  DatasetPair pair;
  pair.source = FeatureMatrix(std::move(xs));
  pair.source_labels = LabelVector(std::move(source_labels), c);
  pair.target = FeatureMatrix(std::move(xt));
  pair.target_truth = LabelVector(std::move(target_labels), c);
  return pair;
}

SyntheticSpec benchmark_spec(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.class_spread = 0.8;
  spec.nuisance_rank = 8;
  spec.nuisance_scale = 2.0;
  spec.shift.rotation_deg = 30.0;
  spec.shift.rotation_planes = spec.dim / 2;
  spec.shift.translation = 6.0;
  spec.seed = seed;
  return spec;
}

}  // namespace pwcf
