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

#include "pwcf/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "pwcf/baselines.h"
#include "pwcf/common.h"
#include "pwcf/optimizer.h"

namespace pwcf {
namespace {

struct TrialScores {
  double map = 0.0;
  std::vector<CurvePoint> precision_at;
  std::vector<CurvePoint> recall_at;
  int num_database = 0;
  std::vector<std::string> warnings;
};

EvalReport finish(const std::vector<TrialScores>& trials, int num_queries) {
  EvalReport report;
  report.num_queries = num_queries;
  const auto n = static_cast<double>(trials.size());
  report.precision_at = trials.front().precision_at;
  report.recall_at = trials.front().recall_at;
  report.num_database = trials.front().num_database;
  for (auto& p : report.precision_at) p.value = 0.0;
  for (auto& p : report.recall_at) p.value = 0.0;
  for (const TrialScores& t : trials) {
    report.trials.push_back(t.map);
    for (std::size_t i = 0; i < t.precision_at.size(); ++i) {
      report.precision_at[i].value += t.precision_at[i].value / n;
      report.recall_at[i].value += t.recall_at[i].value / n;
    }
    for (const auto& w : t.warnings) {
      if (std::find(report.warnings.begin(), report.warnings.end(), w) == report.warnings.end()) {
        report.warnings.push_back(w);
      }
    }
  }
  report.mean = std::accumulate(report.trials.begin(), report.trials.end(), 0.0) / n;
  report.map = report.mean;
  if (trials.size() > 1) {
    double ss = 0.0;
    for (double v : report.trials) ss += (v - report.mean) * (v - report.mean);
    report.stddev = std::sqrt(ss / (n - 1.0));
  }
  return report;
}

TrialScores score(const RankedResult& results, std::span<const int> query_labels,
                  std::span<const int> db_labels, std::span<const int> k_grid) {
  const EvalReport r = evaluate(results, query_labels, db_labels, k_grid);
  return TrialScores{r.map, r.precision_at, r.recall_at, r.num_database, r.warnings};
}

void check_trial_options(const DatasetPair& pair, const TrialOptions& options) {
  pair.validate();
  if (!pair.target_truth) throw Error("evaluation requires target ground-truth labels");
  if (options.num_trials < 1) throw Error("number of trials must be >= 1");
  if (options.queries_per_trial < 1 || options.queries_per_trial >= pair.target.count()) {
    throw Error("queries per trial must be in [1, " + std::to_string(pair.target.count() - 1) +
                "], got " + std::to_string(options.queries_per_trial));
  }
}

}  // namespace

double EvalReport::standard_error() const {
  return trials.empty() ? 0.0 : stddev / std::sqrt(static_cast<double>(trials.size()));
}

double average_precision(std::span<const std::uint8_t> relevant) {
  double sum = 0.0;
  int hits = 0;
  for (std::size_t p = 0; p < relevant.size(); ++p) {
    if (!relevant[p]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(p + 1);
  }
  return hits == 0 ? 0.0 : sum / hits;
}

EvalReport evaluate(const RankedResult& results, std::span<const int> query_labels,
                    std::span<const int> database_labels, std::span<const int> k_grid) {
  if (results.queries.size() != query_labels.size()) {
    throw Error("evaluate: " + std::to_string(results.queries.size()) + " ranked queries but " +
                std::to_string(query_labels.size()) + " query labels");
  }
  if (results.queries.empty()) throw Error("evaluate: no queries");
  const std::size_t n_db = database_labels.size();
  if (n_db == 0) throw Error("evaluate: empty database");

  EvalReport report;
  report.num_queries = static_cast<int>(query_labels.size());
  report.num_database = static_cast<int>(n_db);
  std::vector<int> ks;
  for (int k : k_grid) {
    if (k < 1) throw Error("evaluate: k grid values must be >= 1");
    if (static_cast<std::size_t>(k) > n_db) {
      report.warnings.push_back("k = " + std::to_string(k) + " clamped to database size " +
                                std::to_string(n_db));
      k = static_cast<int>(n_db);
    }
    ks.push_back(k);
  }
  std::vector<double> precision(ks.size(), 0.0);
  std::vector<double> recall(ks.size(), 0.0);
  int recall_queries = 0;
  double ap_sum = 0.0;
  std::vector<std::uint8_t> rel(n_db);
  std::vector<int> cumulative(n_db + 1);
  for (std::size_t q = 0; q < results.queries.size(); ++q) {
    const RankedList& list = results.queries[q];
    if (list.indices.size() != n_db) throw Error("evaluate: ranking does not cover the database");
    for (std::size_t p = 0; p < n_db; ++p) {
      rel[p] = database_labels[list.indices[p]] == query_labels[q] ? 1 : 0;
      cumulative[p + 1] = cumulative[p] + rel[p];
    }
    ap_sum += average_precision(rel);
    const int total_relevant = cumulative[n_db];
    for (std::size_t i = 0; i < ks.size(); ++i) {
      precision[i] += static_cast<double>(cumulative[static_cast<std::size_t>(ks[i])]) / ks[i];
      if (total_relevant > 0) {
        recall[i] += static_cast<double>(cumulative[static_cast<std::size_t>(ks[i])]) /
                     total_relevant;
      }
    }
    if (total_relevant > 0) ++recall_queries;
  }
  const auto nq = static_cast<double>(results.queries.size());
  report.map = ap_sum / nq;
  report.mean = report.map;
  report.trials = {report.map};
  for (std::size_t i = 0; i < ks.size(); ++i) {
    report.precision_at.push_back({ks[i], precision[i] / nq});
    report.recall_at.push_back(
        {ks[i], recall_queries > 0 ? recall[i] / static_cast<double>(recall_queries) : 0.0});
  }
  return report;
}

const char* protocol_name(Protocol p) {
  return p == Protocol::kCrossDomain ? "cross" : "single";
}

Protocol parse_protocol(const std::string& name) {
  if (name == "cross") return Protocol::kCrossDomain;
  if (name == "single") return Protocol::kSingleDomain;
  throw Error("unknown protocol '" + name + "' (expected cross or single)");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::kPwcf:
      return "pwcf";
    case Method::kLsh:
      return "lsh";
    case Method::kPcaSign:
      return "pca_sign";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "pwcf") return Method::kPwcf;
  if (name == "lsh") return Method::kLsh;
  if (name == "pca_sign") return Method::kPcaSign;
  throw Error("unknown method '" + name + "' (expected pwcf, lsh or pca_sign)");
}

QuerySplit split_queries(int n, int num_queries, std::uint64_t seed) {
  if (num_queries < 0 || num_queries > n) throw Error("split_queries: bad query count");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  QuerySplit split;
  split.queries.assign(order.begin(), order.begin() + num_queries);
  split.rest.assign(order.begin() + num_queries, order.end());
  std::sort(split.queries.begin(), split.queries.end());
  std::sort(split.rest.begin(), split.rest.end());
  return split;
}

EvalReport run_trials(const DatasetPair& pair, const RunConfig& config,
                      const TrialOptions& options) {
  check_trial_options(pair, options);
  const LabelVector& truth = *pair.target_truth;
  std::vector<TrialScores> trials;
  for (int t = 0; t < options.num_trials; ++t) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(t);
    const QuerySplit split = split_queries(pair.target.count(), options.queries_per_trial, seed);
    const FeatureMatrix queries = pair.target.select(split.queries);
    const FeatureMatrix rest = pair.target.select(split.rest);

    LinearHashEncoder encoder;
    if (options.method == Method::kPwcf) {
      RunConfig trial_config = config;
      trial_config.seed = seed;
      encoder = train(TrainingData{pair.source, pair.source_labels, rest}, trial_config)
                    .model.encoder();
    } else {
      const BaselineKind kind =
          options.method == Method::kLsh ? BaselineKind::kLsh : BaselineKind::kPcaSign;
      const FeatureMatrix pooled(hconcat(rest.values(), pair.source.values()));
      encoder = fit_baseline(kind, pooled, config.r, seed).encoder();
    }

    const BinaryCodes query_codes = encoder.encode(queries);
    const LabelVector query_truth = truth.select(split.queries);
    if (options.protocol == Protocol::kCrossDomain) {
      const BinaryCodes db = encoder.encode(pair.source);
      trials.push_back(score(retrieve(query_codes, db), query_truth.labels(),
                             pair.source_labels.labels(), options.k_grid));
    } else {
      const BinaryCodes db = encoder.encode(rest);
      trials.push_back(score(retrieve(query_codes, db), query_truth.labels(),
                             truth.select(split.rest).labels(), options.k_grid));
    }
  }
  return finish(trials, options.queries_per_trial);
}

EvalReport evaluate_encoder(const LinearHashEncoder& encoder, const DatasetPair& pair,
                            const TrialOptions& options, std::uint64_t seed) {
  check_trial_options(pair, options);
  const LabelVector& truth = *pair.target_truth;
  const BinaryCodes target_codes = encoder.encode(pair.target);
  const BinaryCodes source_codes =
      options.protocol == Protocol::kCrossDomain ? encoder.encode(pair.source) : BinaryCodes();
  std::vector<TrialScores> trials;
  for (int t = 0; t < options.num_trials; ++t) {
    const QuerySplit split = split_queries(pair.target.count(), options.queries_per_trial,
                                           seed + static_cast<std::uint64_t>(t));
    const BinaryCodes query_codes = target_codes.select(split.queries);
    const LabelVector query_truth = truth.select(split.queries);
    if (options.protocol == Protocol::kCrossDomain) {
      trials.push_back(score(retrieve(query_codes, source_codes), query_truth.labels(),
                             pair.source_labels.labels(), options.k_grid));
    } else {
      trials.push_back(score(retrieve(query_codes, target_codes.select(split.rest)),
                             query_truth.labels(), truth.select(split.rest).labels(),
                             options.k_grid));
    }
  }
  return finish(trials, options.queries_per_trial);
}

std::string format_report_table(const EvalReport& report, const std::string& title) {
  std::string out;
  char buf[256];
  out += "# " + title + "\n";
  std::snprintf(buf, sizeof(buf), "queries   %d\ndatabase  %d\ntrials    %zu\n",
                report.num_queries, report.num_database, report.trials.size());
  out += buf;
  out += "\ntrial  map\n";
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-5zu  %.6f\n", i, report.trials[i]);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "\nmean   %.6f\nstd    %.6f\n", report.mean, report.stddev);
  out += buf;
  out += "\nk      precision  recall\n";
  for (std::size_t i = 0; i < report.precision_at.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-5d  %.6f   %.6f\n", report.precision_at[i].k,
                  report.precision_at[i].value, report.recall_at[i].value);
    out += buf;
  }
  for (const auto& w : report.warnings) out += "warning: " + w + "\n";
  return out;
}

std::string format_report_kv(const EvalReport& report) {
  std::string out;
  char buf[256];
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof(buf), "%s=%.17g\n", key, v);
    out += buf;
  };
  put("map", report.map);
  put("mean", report.mean);
  put("std", report.stddev);
  out += "num_queries=" + std::to_string(report.num_queries) + "\n";
  out += "num_database=" + std::to_string(report.num_database) + "\n";
  out += "num_trials=" + std::to_string(report.trials.size()) + "\n";
  for (std::size_t i = 0; i < report.trials.size(); ++i) {
    put(("trial_" + std::to_string(i) + "_map").c_str(), report.trials[i]);
  }
  for (const auto& p : report.precision_at) put(("precision_at_" + std::to_string(p.k)).c_str(), p.value);
  for (const auto& p : report.recall_at) put(("recall_at_" + std::to_string(p.k)).c_str(), p.value);
  return out;
}

std::string format_curve(const std::vector<CurvePoint>& curve) {
  std::string out;
  char buf[64];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof(buf), "%d\t%.17g\n", p.k, p.value);
    out += buf;
  }
  return out;
}

}  // namespace pwcf
