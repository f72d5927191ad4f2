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

#ifndef PWCF_TESTS_TEST_UTIL_H_
#define PWCF_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Core>

namespace pwcf::testing {

inline Eigen::MatrixXd random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

inline Eigen::MatrixXd random_signs(int rows, int cols, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = coin(rng) ? 1.0 : -1.0;
  }
  return m;
}

// Small integer-valued features make distance ties common.
inline Eigen::MatrixXd random_grid(int rows, int cols, int levels, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, levels - 1);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = pick(rng);
  }
  return m;
}

inline std::vector<int> random_labels(int n, int c, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, c - 1);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int& l : labels) l = pick(rng);
  return labels;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pwcf_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace pwcf::testing

#endif  // PWCF_TESTS_TEST_UTIL_H_
