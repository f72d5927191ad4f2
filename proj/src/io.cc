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

#include "pwcf/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "pwcf/binary_io.h"
#include "pwcf/common.h"

namespace pwcf {
namespace {

constexpr std::string_view kMatrixMagic = "PWF1";
constexpr std::uint32_t kMatrixVersion = 1;

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ifstream is(path, mode);
  if (!is) throw Error("cannot open " + path.string() + " for reading");
  return is;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  return os;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view field, std::size_t row, std::size_t col) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error("csv: cannot parse \"" + std::string(field) + "\" at row " +
                std::to_string(row) + ", column " + std::to_string(col));
  }
  if (!std::isfinite(v)) {
    throw Error("csv: non-finite value at row " + std::to_string(row) + ", column " +
                std::to_string(col));
  }
  return v;
}

}  // namespace

MatrixFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? MatrixFormat::kCsv : MatrixFormat::kBinary;
}

FeatureMatrix read_feature_matrix_binary(std::istream& is) {
  binary::Reader in(is, "PWF1");
  in.expect_magic(kMatrixMagic);
  const std::uint32_t version = in.u32("version");
  if (version != kMatrixVersion) {
    throw Error("PWF1: unsupported version " + std::to_string(version));
  }
  const std::uint64_t rows = in.u64("rows");
  const std::uint64_t cols = in.u64("cols");
  if (rows == 0 || cols == 0) {
    throw Error("PWF1: empty dataset (" + std::to_string(rows) + " x " + std::to_string(cols) +
                ")");
  }
  if (rows > (1u << 24) || cols > (1u << 30)) throw Error("PWF1: implausible dimensions");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double v = in.f64("values");
      if (!std::isfinite(v)) {
        throw Error("PWF1: non-finite value at row " + std::to_string(i) + ", column " +
                    std::to_string(j));
      }
      m(i, j) = v;
    }
  }
  in.expect_end();
  return FeatureMatrix(std::move(m));
}

void write_feature_matrix_binary(const FeatureMatrix& m, std::ostream& os) {
  binary::write_magic(os, kMatrixMagic);
  binary::write_u32(os, kMatrixVersion);
  binary::write_u64(os, static_cast<std::uint64_t>(m.dim()));
  binary::write_u64(os, static_cast<std::uint64_t>(m.count()));
  const Eigen::MatrixXd& v = m.values();
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) binary::write_f64(os, v(i, j));
  }
}

FeatureMatrix read_feature_matrix_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t col = 0;
    while (true) {
      const auto comma = body.find(',', start);
      const auto field = body.substr(start, comma == std::string_view::npos ? body.npos
                                                                            : comma - start);
      row.push_back(parse_double(field, line_no, col));
      ++col;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error("csv: row " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                  " fields, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("csv: empty dataset");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.front().size()),
                    static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < rows[j].size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
    }
  }
  return FeatureMatrix(std::move(m));
}

void write_feature_matrix_csv(const FeatureMatrix& m, std::ostream& os) {
  os << std::setprecision(17);
  const Eigen::MatrixXd& v = m.values();
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (i) os << ',';
      os << v(i, j);
    }
    os << '\n';
  }
}

FeatureMatrix load_feature_matrix(const std::filesystem::path& path, MatrixFormat format) {
  try {
    if (format == MatrixFormat::kBinary) {
      auto is = open_in(path, std::ios::binary);
      return read_feature_matrix_binary(is);
    }
    auto is = open_in(path, std::ios::in);
    return read_feature_matrix_csv(is);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path,
                         MatrixFormat format) {
  auto os = open_out(path, format == MatrixFormat::kBinary ? std::ios::binary : std::ios::out);
  if (format == MatrixFormat::kBinary) {
    write_feature_matrix_binary(m, os);
  } else {
    write_feature_matrix_csv(m, os);
  }
  if (!os) throw Error("write failed: " + path.string());
}

LabelVector load_labels(const std::filesystem::path& path, std::optional<int> num_classes) {
  auto is = open_in(path, std::ios::in);
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  int max_label = -1;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    int v = 0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || ptr != body.data() + body.size() || v < 0) {
      throw Error(path.string() + ": bad label \"" + std::string(body) + "\" on line " +
                  std::to_string(line_no));
    }
    labels.push_back(v);
    max_label = std::max(max_label, v);
  }
  if (labels.empty()) throw Error(path.string() + ": no labels");
  try {
    return LabelVector(std::move(labels), num_classes.value_or(max_label + 1));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void save_labels(const LabelVector& labels, const std::filesystem::path& path) {
  auto os = open_out(path, std::ios::out);
  for (int l : labels.labels()) os << l << '\n';
  if (!os) throw Error("write failed: " + path.string());
}

}  // namespace pwcf
