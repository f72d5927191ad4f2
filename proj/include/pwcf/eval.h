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

#ifndef PWCF_EVAL_H_
#define PWCF_EVAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pwcf/config.h"
#include "pwcf/data.h"
#include "pwcf/encoder.h"
#include "pwcf/hamming.h"

namespace pwcf {

// AP over a full ranking: mean of precision@p taken at every relevant
// position p. Zero when nothing is relevant.
double average_precision(std::span<const std::uint8_t> relevant);

struct CurvePoint {
  int k = 0;
  double value = 0.0;
};

struct EvalReport {
  double map = 0.0;
  std::vector<CurvePoint> precision_at;
  std::vector<CurvePoint> recall_at;
  int num_queries = 0;
  int num_database = 0;
  std::vector<double> trials;  // MAP of each trial
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over trials
  std::vector<std::string> warnings;

  double standard_error() const;
};

// MAP over queries plus precision/recall after k retrieved items for each k
// in `k_grid`. Queries with no relevant database item score AP 0 and are
// left out of the recall average.
EvalReport evaluate(const RankedResult& results, std::span<const int> query_labels,
                    std::span<const int> database_labels, std::span<const int> k_grid);

enum class Protocol {
  kCrossDomain,   // target queries against the source database
  kSingleDomain,  // target queries against the remaining target samples
};

enum class Method { kPwcf, kLsh, kPcaSign };

const char* protocol_name(Protocol p);
Protocol parse_protocol(const std::string& name);
const char* method_name(Method m);
Method parse_method(const std::string& name);

struct TrialOptions {
  Protocol protocol = Protocol::kCrossDomain;
  Method method = Method::kPwcf;
  int num_trials = 10;
  int queries_per_trial = 500;
  std::vector<int> k_grid = {10, 20, 50, 100, 200, 500, 1000};
};

// Splits the target into queries and training rest (seeded by config.seed +
// trial index), trains the chosen method on source + rest, encodes and
// scores against the protocol's database with the target ground truth.
EvalReport run_trials(const DatasetPair& pair, const RunConfig& config,
                      const TrialOptions& options);

// Same splits and scoring, but with an already trained encoder.
EvalReport evaluate_encoder(const LinearHashEncoder& encoder, const DatasetPair& pair,
                            const TrialOptions& options, std::uint64_t seed);

// Random query/rest partition of [0, n). Both parts are sorted.
struct QuerySplit {
  std::vector<int> queries;
  std::vector<int> rest;
};
QuerySplit split_queries(int n, int num_queries, std::uint64_t seed);

std::string format_report_table(const EvalReport& report, const std::string& title);
std::string format_report_kv(const EvalReport& report);
std::string format_curve(const std::vector<CurvePoint>& curve);

}  // namespace pwcf

#endif  // PWCF_EVAL_H_
