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

#ifndef PWCF_COMMON_H_
#define PWCF_COMMON_H_

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace pwcf {

// All recoverable failures in the library surface as this exception type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// sgn with sgn(0) = +1.
inline double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

inline Eigen::MatrixXd sign_matrix(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double v) { return sign_of(v); });
}

// Frobenius norm of W^T W - I.
inline double orthonormality_error(const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd gram = w.transpose() * w;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).norm();
}

}  // namespace pwcf

#endif  // PWCF_COMMON_H_
