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

#ifndef PWCF_SYNTHETIC_H_
#define PWCF_SYNTHETIC_H_

#include <cstdint>

#include "pwcf/data.h"

namespace pwcf {

// Transformation that maps the source clusters onto the target domain:
// x_t = R (mu + noise_scale * e) + t, with R a rotation acting on the first
// `rotation_planes` coordinate pairs (0,1), (2,3), ...
struct DomainShift {
  double rotation_deg = 0.0;
  int rotation_planes = 1;
  double translation = 0.0;  // length of t; direction drawn from the seed
  double noise_scale = 1.0;

  static DomainShift identity() { return DomainShift{}; }
};

struct SyntheticSpec {
  int classes = 10;
  int dim = 64;
  int source_count = 1000;
  int target_count = 1000;
  double class_spread = 1.0;  // std dev of class-mean coordinates
  double noise = 1.0;         // within-class isotropic std dev
  // Class-independent variation confined to a random subspace, shared by
  // both domains.
  int nuisance_rank = 0;
  double nuisance_scale = 0.0;
  DomainShift shift;
  std::uint64_t seed = 0;
};

// Balanced labels (sample i has class i mod c); target_truth is filled in.
// Pure function of its argument, seed included.
DatasetPair generate_synthetic_pair(const SyntheticSpec& spec);

// Default two-domain benchmark: 10 classes in 64 dims, 1000 samples per
// domain, 30 degree rotation in every coordinate plane plus a translation of
// length 6, and an 8-dim nuisance subspace.
SyntheticSpec benchmark_spec(std::uint64_t seed = 0);

}  // namespace pwcf

#endif  // PWCF_SYNTHETIC_H_
