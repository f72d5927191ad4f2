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

#ifndef PWCF_IO_H_
#define PWCF_IO_H_

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "pwcf/data.h"

namespace pwcf {

enum class MatrixFormat { kBinary, kCsv };

// Picks kCsv for a ".csv" extension and kBinary otherwise.
MatrixFormat format_for_path(const std::filesystem::path& path);

// Binary "PWF1" layout: magic "PWF1", u32 version = 1, u64 rows (d),
// u64 cols (n), then d*n f64 values column-major, all little-endian.
// CSV has one sample per row and is transposed on ingest.
FeatureMatrix load_feature_matrix(const std::filesystem::path& path, MatrixFormat format);
void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path,
                         MatrixFormat format);

FeatureMatrix read_feature_matrix_binary(std::istream& is);
void write_feature_matrix_binary(const FeatureMatrix& m, std::ostream& os);
FeatureMatrix read_feature_matrix_csv(std::istream& is);
void write_feature_matrix_csv(const FeatureMatrix& m, std::ostream& os);

// One decimal integer per line. Without `num_classes`, it is max label + 1.
LabelVector load_labels(const std::filesystem::path& path,
                        std::optional<int> num_classes = std::nullopt);
void save_labels(const LabelVector& labels, const std::filesystem::path& path);

}  // namespace pwcf

#endif  // PWCF_IO_H_
