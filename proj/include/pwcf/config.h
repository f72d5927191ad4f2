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

#ifndef PWCF_CONFIG_H_
#define PWCF_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pwcf {

// Ordered `key = value` entries. Lines starting with '#' (after optional
// whitespace) are comments, as is anything after an unquoted '#'.
struct KeyValueDocument {
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };
  std::vector<Entry> entries;

  static KeyValueDocument parse(std::string_view text);
  static KeyValueDocument load(const std::filesystem::path& path);

  const Entry* find(std::string_view key) const;
  std::string to_text() const;
};

struct AblationFlags {
  bool disable_triplet = false;       // PWCF-T
  bool standard_triplet = false;      // PWCF-F: focal weight forced to 1
  bool disable_manifold = false;      // PWCF-M
  bool disable_classifier = false;    // PWCF-C
  bool disable_hfon = false;          // PWCF-H: raw features replace HFON
  bool disable_quantization = false;  // PWCF-Q

  // Sets one flag by its config-key name; throws on an unknown name.
  void set(std::string_view name, bool value = true);
  bool any() const;
  std::string to_string() const;
  bool operator==(const AblationFlags&) const = default;
};

struct RunConfig {
  int r = 32;             // code length
  int k = 10;             // neighbor count for KNN, HFON and the affinity graph
  double m = 1.0;         // triplet margin
  double gamma = 1.0;     // focal exponent
  double theta = 1e2;     // quantization weight
  double lambda1 = 1.0;   // classification weight
  double lambda2 = 1e3;   // classifier ridge weight
  double lambda3 = 1e4;   // manifold weight
  double tau = 0.1;       // initial Cayley step size
  int max_iters = 50;     // outer iterations T
  int inner_w_iters = 5;  // Cayley steps per W update
  std::uint64_t seed = 0;
  AblationFlags ablation;

  void validate() const;
  // Every key with its resolved value, one `key = value` per line.
  std::string to_text() const;
  bool operator==(const RunConfig&) const = default;
};

RunConfig config_from_document(const KeyValueDocument& doc);
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

// Known ablation flag names, in canonical order.
const std::vector<std::string>& ablation_flag_names();

}  // namespace pwcf

#endif  // PWCF_CONFIG_H_
