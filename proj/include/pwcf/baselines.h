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

#ifndef PWCF_BASELINES_H_
#define PWCF_BASELINES_H_

#include <cstdint>

#include <Eigen/Core>

#include "pwcf/data.h"
#include "pwcf/encoder.h"
#include "pwcf/hamming.h"

namespace pwcf {

enum class BaselineKind { kLsh, kPcaSign };

struct BaselineModel {
  BaselineKind kind = BaselineKind::kLsh;
  Eigen::MatrixXd projection;  // d x r
  Standardization standardization;

  LinearHashEncoder encoder() const { return {standardization, projection}; }
  StoredModel stored() const;
};

// lsh: standard-normal projection drawn from `seed`. pca_sign: top-r
// principal directions of the standardized pooled data.
BaselineModel fit_baseline(BaselineKind kind, const FeatureMatrix& pooled, int r,
                           std::uint64_t seed);

BinaryCodes encode_baseline(const BaselineModel& model, const FeatureMatrix& x);

}  // namespace pwcf

#endif  // PWCF_BASELINES_H_
