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

#include "pwcf/encoder.h"

#include <cmath>
#include <fstream>

#include "pwcf/binary_io.h"
#include "pwcf/common.h"

namespace pwcf {
namespace {

constexpr std::string_view kModelMagic = "PWM1";
constexpr std::uint32_t kModelVersion = 1;

void write_matrix_values(std::ostream& os, const Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) binary::write_f64(os, m(i, j));
  }
}

Eigen::MatrixXd read_matrix_values(binary::Reader& in, Eigen::Index rows, Eigen::Index cols,
                                   const char* field) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = in.f64(field);
      if (!std::isfinite(m(i, j))) throw Error(std::string("PWM1: non-finite value in ") + field);
    }
  }
  return m;
}

}  // namespace

Eigen::MatrixXd LinearHashEncoder::project(const FeatureMatrix& x) const {
  if (x.dim() != dim()) {
    throw Error("encoder expects dim " + std::to_string(dim()) + ", data has dim " +
                std::to_string(x.dim()));
  }
  return projection.transpose() * standardization.apply(x.values());
}

BinaryCodes LinearHashEncoder::encode(const FeatureMatrix& x) const {
  return pack(sign_matrix(project(x)));
}

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kPwcf:
      return "pwcf";
    case ModelKind::kLsh:
      return "lsh";
    case ModelKind::kPcaSign:
      return "pca_sign";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "pwcf") return ModelKind::kPwcf;
  if (name == "lsh") return ModelKind::kLsh;
  if (name == "pca_sign") return ModelKind::kPcaSign;
  throw Error("unknown method '" + name + "' (expected pwcf, lsh or pca_sign)");
}

void write_model(const StoredModel& model, std::ostream& os) {
  const Eigen::Index d = model.projection.rows();
  if (model.standardization.dim() != d) throw Error("model: standardization dim mismatch");
  if (model.classifier.size() > 0 && model.classifier.rows() != model.projection.cols()) {
    throw Error("model: classifier rows must equal code length");
  }
  binary::write_magic(os, kModelMagic);
  binary::write_u32(os, kModelVersion);
  binary::write_u32(os, static_cast<std::uint32_t>(model.kind));
  binary::write_u64(os, static_cast<std::uint64_t>(d));
  binary::write_u64(os, static_cast<std::uint64_t>(model.projection.cols()));
  binary::write_u64(os, static_cast<std::uint64_t>(model.classifier.cols()));
  write_matrix_values(os, model.standardization.mean);
  write_matrix_values(os, model.standardization.scale);
  write_matrix_values(os, model.projection);
  write_matrix_values(os, model.classifier);
  binary::write_u64(os, model.config_echo.size());
  os.write(model.config_echo.data(), static_cast<std::streamsize>(model.config_echo.size()));
}

StoredModel read_model(std::istream& is) {
  binary::Reader in(is, "PWM1");
  in.expect_magic(kModelMagic);
  const std::uint32_t version = in.u32("version");
  if (version != kModelVersion) throw Error("PWM1: unsupported version " + std::to_string(version));
  const std::uint32_t kind = in.u32("kind");
  if (kind > static_cast<std::uint32_t>(ModelKind::kPcaSign)) {
    throw Error("PWM1: unknown model kind " + std::to_string(kind));
  }
  const std::uint64_t d = in.u64("d");
  const std::uint64_t r = in.u64("r");
  const std::uint64_t c = in.u64("c");
  if (d == 0 || r == 0 || d > (1u << 24) || r > 65535 || c > (1u << 20)) {
    throw Error("PWM1: implausible dimensions");
  }
  const auto di = static_cast<Eigen::Index>(d);
  const auto ri = static_cast<Eigen::Index>(r);
  StoredModel m;
  m.kind = static_cast<ModelKind>(kind);
  m.standardization.mean = read_matrix_values(in, di, 1, "mean").col(0);
  m.standardization.scale = read_matrix_values(in, di, 1, "scale").col(0);
  m.projection = read_matrix_values(in, di, ri, "projection");
  m.classifier = c == 0 ? Eigen::MatrixXd() : read_matrix_values(in, ri, static_cast<Eigen::Index>(c),
                                                                   "classifier");
  const std::uint64_t len = in.u64("config length");
  if (len > (1u << 20)) throw Error("PWM1: implausible config length");
  m.config_echo = in.bytes(static_cast<std::size_t>(len), "config");
  in.expect_end();
  return m;
}

void save_model(const StoredModel& model, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_model(model, os);
  if (!os) throw Error("write failed: " + path.string());
}

StoredModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string() + " for reading");
  try {
    return read_model(is);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace pwcf
