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

#ifndef PWCF_ENCODER_H_
#define PWCF_ENCODER_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "pwcf/data.h"
#include "pwcf/hamming.h"

namespace pwcf {

// b = sgn(P^T standardize(x)), the query path shared by every method.
struct LinearHashEncoder {
  Standardization standardization;
  Eigen::MatrixXd projection;  // d x r

  int dim() const { return static_cast<int>(projection.rows()); }
  int bits() const { return static_cast<int>(projection.cols()); }
  Eigen::MatrixXd project(const FeatureMatrix& x) const;
  BinaryCodes encode(const FeatureMatrix& x) const;
};

enum class ModelKind : std::uint32_t { kPwcf = 0, kLsh = 1, kPcaSign = 2 };

const char* model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

// Contents of a "PWM1" model file: magic, u32 version = 1, u32 kind, u64 d,
// u64 r, u64 c, d f64 means, d f64 scales, d*r f64 projection (column-major),
// r*c f64 classifier (column-major), u64 byte length + UTF-8 config echo.
struct StoredModel {
  ModelKind kind = ModelKind::kPwcf;
  Standardization standardization;
  Eigen::MatrixXd projection;
  Eigen::MatrixXd classifier;  // r x c; empty for baselines
  std::string config_echo;

  LinearHashEncoder encoder() const { return {standardization, projection}; }
};

void write_model(const StoredModel& model, std::ostream& os);
StoredModel read_model(std::istream& is);
void save_model(const StoredModel& model, const std::filesystem::path& path);
StoredModel load_model(const std::filesystem::path& path);

}  // namespace pwcf

#endif  // PWCF_ENCODER_H_
