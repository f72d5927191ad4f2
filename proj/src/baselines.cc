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

#include "pwcf/baselines.h"

#include <random>
#include <string>

#include "pwcf/common.h"
#include "pwcf/optimizer.h"

namespace pwcf {

StoredModel BaselineModel::stored() const {
  const ModelKind k = kind == BaselineKind::kLsh ? ModelKind::kLsh : ModelKind::kPcaSign;
  return StoredModel{k, standardization, projection, Eigen::MatrixXd(),
                     std::string("method = ") + model_kind_name(k) + "\nr = " +
                         std::to_string(projection.cols()) + "\n"};
}

BaselineModel fit_baseline(BaselineKind kind, const FeatureMatrix& pooled, int r,
                           std::uint64_t seed) {
  if (r < 1) throw Error("fit_baseline: code length must be >= 1");
  BaselineModel model;
  model.kind = kind;
  model.standardization = Standardization::fit(pooled.values());
  const int d = pooled.dim();
  if (kind == BaselineKind::kLsh) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    model.projection.resize(d, r);
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < d; ++i) model.projection(i, j) = normal(rng);
    }
    return model;
  }
  if (r > d) {
    throw Error("fit_baseline: pca_sign code length " + std::to_string(r) + " exceeds dim " +
                std::to_string(d));
  }
  model.projection = pca_init(model.standardization.apply(pooled.values()), r, seed).w;
  return model;
}

BinaryCodes encode_baseline(const BaselineModel& model, const FeatureMatrix& x) {
  return model.encoder().encode(x);
}

}  // namespace pwcf
