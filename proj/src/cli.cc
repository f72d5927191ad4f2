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

#include "pwcf/cli.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "pwcf/common.h"
#include "pwcf/config.h"
#include "pwcf/encoder.h"
#include "pwcf/eval.h"
#include "pwcf/hamming.h"
#include "pwcf/io.h"
#include "pwcf/optimizer.h"
#include "pwcf/synthetic.h"

namespace pwcf {
namespace {

namespace fs = std::filesystem;

constexpr char kManifestName[] = "manifest.txt";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw Error("empty item in list '" + text + "'");
    parts.push_back(item.substr(b, e - b + 1));
  }
  return parts;
}

std::vector<int> parse_k_grid(const std::string& text) {
  std::vector<int> ks;
  for (const std::string& s : split_commas(text)) {
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || k < 1) throw Error("--k-grid: '" + s + "' is not a positive integer");
    ks.push_back(k);
  }
  if (ks.empty()) throw Error("--k-grid is empty");
  return ks;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::uint64_t env_seed() {
  const char* raw = std::getenv("PWCF_SEED");
  if (raw == nullptr || *raw == '\0') return 0;
  const std::string text(raw);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.front() == '-') {
    throw Error("PWCF_SEED='" + text + "' is not a non-negative integer");
  }
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  os << text;
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error("cannot create directory '" + dir.string() + "'");
  }
}

// Flags shared by every command that trains.
struct RunFlags {
  std::string config_path;
  int bits = 0;
  std::uint64_t seed = 0;
  std::string ablate;
  CLI::Option* bits_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value configuration file");
    bits_opt = cmd->add_option("--bits", bits, "code length r");
    seed_opt = cmd->add_option("--seed", seed, "random seed (fallback: PWCF_SEED)");
    cmd->add_option("--ablate", ablate, "comma-separated ablation flags");
  }

  // --seed wins, then a seed in the config file, then PWCF_SEED.
  RunConfig resolve() const {
    RunConfig config;
    bool seeded = false;
    if (!config_path.empty()) {
      const KeyValueDocument doc = KeyValueDocument::load(config_path);
      config = config_from_document(doc);
      seeded = doc.find("seed") != nullptr;
    }
    if (bits_opt->count() > 0) config.r = bits;
    if (seed_opt->count() > 0) {
      config.seed = seed;
    } else if (!seeded) {
      config.seed = env_seed();
    }
    if (!ablate.empty()) {
      for (const std::string& name : split_commas(ablate)) config.ablation.set(name);
    }
    config.validate();
    return config;
  }
};

struct EvalFlags {
  std::string protocol = "cross";
  int trials = 10;
  int queries = 500;
  std::string k_grid = "10,20,50,100,200,500,1000";

  void attach(CLI::App* cmd) {
    cmd->add_option("--protocol", protocol, "cross or single")
        ->check(CLI::IsMember({"cross", "single"}));
    cmd->add_option("--trials", trials, "number of random query splits");
    cmd->add_option("--queries", queries, "target queries per trial");
    cmd->add_option("--k-grid", k_grid, "retrieved-count cutoffs, e.g. 10,50,100");
  }

  TrialOptions options() const {
    TrialOptions o;
    o.protocol = parse_protocol(protocol);
    o.num_trials = trials;
    o.queries_per_trial = queries;
    o.k_grid = parse_k_grid(k_grid);
    return o;
  }

  std::string to_text() const {
    return "protocol = " + protocol + "\ntrials = " + std::to_string(trials) +
           "\nqueries = " + std::to_string(queries) + "\nk_grid = " + k_grid + "\n";
  }
};

void print_config(std::ostream& out, const RunConfig& config) {
  out << "# resolved configuration\n" << config.to_text();
}

fs::path manifest_path(const fs::path& data) {
  return fs::is_directory(data) ? data / kManifestName : data;
}

bool is_feature_file(const fs::path& p) {
  return p.extension() == ".pwf" || p.extension() == ".csv";
}

void check_dims(const LinearHashEncoder& encoder, int data_dim) {
  if (encoder.dim() != data_dim) {
    throw Error("dimension mismatch: model expects d = " + std::to_string(encoder.dim()) +
                " but the data has d = " + std::to_string(data_dim));
  }
}

// ---- synth ----

struct SynthFlags {
  std::string out;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  SyntheticSpec spec = benchmark_spec();
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
  SyntheticSpec spec = f.spec;
  spec.seed = f.seed_opt->count() > 0 ? f.seed : env_seed();
  const DatasetPair pair = generate_synthetic_pair(spec);
  const fs::path dir(f.out);
  ensure_directory(dir);
  save_feature_matrix(pair.source, dir / "source.pwf", MatrixFormat::kBinary);
  save_labels(pair.source_labels, dir / "source.labels");
  save_feature_matrix(pair.target, dir / "target.pwf", MatrixFormat::kBinary);
  save_labels(*pair.target_truth, dir / "target.labels");

  std::string m;
  m += "source = source.pwf\nsource_labels = source.labels\n";
  m += "target = target.pwf\ntarget_labels = target.labels\n";
  m += "classes = " + std::to_string(spec.classes) + "\n";
  m += "dim = " + std::to_string(spec.dim) + "\n";
  m += "source_count = " + std::to_string(spec.source_count) + "\n";
  m += "target_count = " + std::to_string(spec.target_count) + "\n";
  m += "class_spread = " + fmt(spec.class_spread) + "\n";
  m += "noise = " + fmt(spec.noise) + "\n";
  m += "nuisance_rank = " + std::to_string(spec.nuisance_rank) + "\n";
  m += "nuisance_scale = " + fmt(spec.nuisance_scale) + "\n";
  m += "rotation_deg = " + fmt(spec.shift.rotation_deg) + "\n";
  m += "rotation_planes = " + std::to_string(spec.shift.rotation_planes) + "\n";
  m += "translation = " + fmt(spec.shift.translation) + "\n";
  m += "noise_scale = " + fmt(spec.shift.noise_scale) + "\n";
  m += "seed = " + std::to_string(spec.seed) + "\n";
  m += "source_class_counts = " + join(pair.source_labels.class_counts()) + "\n";
  m += "target_class_counts = " + join(pair.target_truth->class_counts()) + "\n";
  write_text(dir / kManifestName, m);
  out << "# synthetic dataset\n" << m << "wrote " << dir.string() << "\n";
  return 0;
}

// ---- train ----

int cmd_train(const RunFlags& run, const std::string& data, const std::string& out_path,
              std::ostream& out) {
  const RunConfig config = run.resolve();
  print_config(out, config);
  const DatasetPair pair = load_manifest(data);
  const TrainResult result = train(pair.training_view(), config);
  save_model(result.model.stored(), out_path);
  const std::string trace_path = out_path + ".trace.tsv";
  write_text(trace_path, format_trace(result.model.trace));
  const IterationRecord& last = result.model.trace.back();
  out << "iterations = " << last.iteration << "\n";
  out << "converged = " << (result.diagnostics.converged ? "true" : "false") << "\n";
  out << "final_total = " << fmt(last.loss.total) << "\n";
  for (const std::string& w : result.diagnostics.warnings) out << "warning: " << w << "\n";
  out << "wrote " << out_path << " and " << trace_path << "\n";
  return 0;
}

// ---- encode ----

int cmd_encode(const std::string& model_path, const std::string& data, const std::string& domain,
               const std::string& out_path, std::ostream& out) {
  const StoredModel model = load_model(model_path);
  const LinearHashEncoder encoder = model.encoder();
  FeatureMatrix features;
  if (is_feature_file(data)) {
    features = load_feature_matrix(data, format_for_path(data));
  } else {
    const DatasetPair pair = load_manifest(data);
    features = domain == "source" ? pair.source : pair.target;
  }
  check_dims(encoder, features.dim());
  const BinaryCodes codes = encoder.encode(features);
  save_codes(codes, out_path);
  out << "model = " << model_kind_name(model.kind) << "\nbits = " << encoder.bits()
      << "\ncount = " << codes.count() << "\nwrote " << out_path << "\n";
  return 0;
}

// ---- retrieve ----

int cmd_retrieve(const std::string& query_path, const std::string& db_path, int top,
                 const std::string& out_path, std::ostream& out) {
  const BinaryCodes queries = load_codes(query_path);
  const BinaryCodes database = load_codes(db_path);
  if (queries.bits() != database.bits()) {
    throw Error("code length mismatch: queries have " + std::to_string(queries.bits()) +
                " bits, database has " + std::to_string(database.bits()));
  }
  const RankedResult ranked = retrieve(queries, database);
  const std::size_t limit =
      top > 0 ? std::min(static_cast<std::size_t>(top), database.count()) : database.count();
  std::string text = "query\trank\tindex\tdistance\n";
  for (std::size_t q = 0; q < ranked.queries.size(); ++q) {
    const RankedList& list = ranked.queries[q];
    for (std::size_t p = 0; p < limit; ++p) {
      text += std::to_string(q) + "\t" + std::to_string(p) + "\t" +
              std::to_string(list.indices[p]) + "\t" + std::to_string(list.distances[p]) + "\n";
    }
  }
  write_text(out_path, text);
  out << "queries = " << queries.count() << "\ndatabase = " << database.count()
      << "\ntop = " << limit << "\nwrote " << out_path << "\n";
  return 0;
}

// ---- eval ----

void write_report(const fs::path& dir, const EvalReport& report, const std::string& title) {
  ensure_directory(dir);
  write_text(dir / "report.txt", format_report_table(report, title));
  write_text(dir / "report.kv", format_report_kv(report));
  write_text(dir / "precision.tsv", format_curve(report.precision_at));
  write_text(dir / "recall.tsv", format_curve(report.recall_at));
}

int cmd_eval(const RunFlags& run, const EvalFlags& ev, const std::string& data,
             const std::string& model_path, const std::string& method, const std::string& out_dir,
             std::ostream& out) {
  const TrialOptions base = ev.options();
  const DatasetPair pair = load_manifest(data);
  EvalReport report;
  std::string title;
  if (!model_path.empty()) {
    const StoredModel model = load_model(model_path);
    const LinearHashEncoder encoder = model.encoder();
    check_dims(encoder, pair.source.dim());
    if (run.bits_opt->count() > 0 && run.bits != encoder.bits()) {
      throw Error("--bits " + std::to_string(run.bits) + " does not match the model's " +
                  std::to_string(encoder.bits()) + " bits");
    }
    std::uint64_t seed = 0;
    if (run.seed_opt->count() > 0) {
      seed = run.seed;
    } else {
      seed = env_seed();
    }
    out << "# model configuration\n" << model.config_echo;
    out << "# evaluation\n" << ev.to_text() << "seed = " << seed << "\n";
    report = evaluate_encoder(encoder, pair, base, seed);
    title = std::string(model_kind_name(model.kind)) + " model, " +
            protocol_name(base.protocol) + "-domain";
  } else {
    const RunConfig config = run.resolve();
    print_config(out, config);
    TrialOptions o = base;
    o.method = parse_method(method);
    out << "# evaluation\n" << ev.to_text() << "method = " << method << "\n";
    report = run_trials(pair, config, o);
    title = method + ", " + protocol_name(o.protocol) + "-domain, retrained per trial";
  }
  write_report(out_dir, report, title);
  out << "map = " << fmt(report.mean) << "\nstd = " << fmt(report.stddev) << "\n";
  for (const std::string& w : report.warnings) out << "warning: " << w << "\n";
  out << "wrote " << out_dir << "\n";
  return 0;
}

// ---- ablate ----

std::string variant_label(const std::string& flag) {
  if (flag == "disable_triplet") return "PWCF-T";
  if (flag == "standard_triplet") return "PWCF-F";
  if (flag == "disable_manifold") return "PWCF-M";
  if (flag == "disable_classifier") return "PWCF-C";
  if (flag == "disable_hfon") return "PWCF-H";
  if (flag == "disable_quantization") return "PWCF-Q";
  return flag;
}

int cmd_ablate(const RunFlags& run, const EvalFlags& ev, const std::string& data,
               const std::string& out_dir, std::ostream& out) {
  RunFlags base_flags = run;
  base_flags.ablate.clear();
  const RunConfig base = base_flags.resolve();
  const std::vector<std::string> variants =
      run.ablate.empty() ? ablation_flag_names() : split_commas(run.ablate);
  for (const std::string& v : variants) {
    AblationFlags probe;
    probe.set(v);
  }
  print_config(out, base);
  out << "# evaluation\n" << ev.to_text() << "variants = ";
  for (std::size_t i = 0; i < variants.size(); ++i) out << (i ? "," : "") << variants[i];
  out << "\n";

  const DatasetPair pair = load_manifest(data);
  const TrialOptions options = ev.options();
  std::string table = "variant  flag                   map_mean  map_std\n";
  std::string kv;
  auto add = [&](const std::string& label, const std::string& flag, const EvalReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-8s %-22s %.6f  %.6f\n", label.c_str(), flag.c_str(),
                  r.mean, r.stddev);
    table += buf;
    kv += label + "_map=" + fmt(r.mean) + "\n" + label + "_std=" + fmt(r.stddev) + "\n";
    out << buf;
  };
  add("PWCF", "-", run_trials(pair, base, options));
  for (const std::string& v : variants) {
    RunConfig config = base;
    config.ablation.set(v);
    add(variant_label(v), v, run_trials(pair, config, options));
  }
  ensure_directory(out_dir);
  write_text(fs::path(out_dir) / "ablation.txt", table);
  write_text(fs::path(out_dir) / "ablation.kv", kv);
  out << "wrote " << out_dir << "\n";
  return 0;
}

}  // namespace

DatasetPair load_manifest(const fs::path& data) {
  const fs::path path = manifest_path(data);
  const KeyValueDocument doc = KeyValueDocument::load(path);
  const fs::path base = path.parent_path();
  auto require = [&](const char* key) -> fs::path {
    const KeyValueDocument::Entry* e = doc.find(key);
    if (e == nullptr) throw Error(path.string() + ": missing key '" + key + "'");
    return base / e->value;
  };
  std::optional<int> classes;
  if (const auto* e = doc.find("classes")) {
    try {
      classes = std::stoi(e->value);
    } catch (const std::exception&) {
      throw Error(path.string() + ": classes must be an integer");
    }
  }
  const fs::path source = require("source");
  const fs::path target = require("target");
  DatasetPair pair;
  pair.source = load_feature_matrix(source, format_for_path(source));
  pair.source_labels = load_labels(require("source_labels"), classes);
  pair.target = load_feature_matrix(target, format_for_path(target));
  if (doc.find("target_labels") != nullptr) {
    pair.target_truth = load_labels(require("target_labels"), pair.source_labels.num_classes());
  }
  pair.validate();
  return pair;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Cross-domain hashing: train, encode, retrieve and evaluate", "pwcf");
  app.require_subcommand(1);

  SynthFlags synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic two-domain dataset");
  synth_cmd->add_option("--out", synth.out, "output directory")->required();
  synth.seed_opt = synth_cmd->add_option("--seed", synth.seed, "random seed");
  synth_cmd->add_option("--classes", synth.spec.classes);
  synth_cmd->add_option("--dim", synth.spec.dim);
  synth_cmd->add_option("--source-count", synth.spec.source_count);
  synth_cmd->add_option("--target-count", synth.spec.target_count);
  synth_cmd->add_option("--class-spread", synth.spec.class_spread);
  synth_cmd->add_option("--noise", synth.spec.noise);
  synth_cmd->add_option("--nuisance-rank", synth.spec.nuisance_rank);
  synth_cmd->add_option("--nuisance-scale", synth.spec.nuisance_scale);
  synth_cmd->add_option("--rotation", synth.spec.shift.rotation_deg, "degrees");
  synth_cmd->add_option("--rotation-planes", synth.spec.shift.rotation_planes);
  synth_cmd->add_option("--translation", synth.spec.shift.translation);
  synth_cmd->add_option("--noise-scale", synth.spec.shift.noise_scale);

  RunFlags train_run;
  std::string train_data;
  std::string train_out;
  CLI::App* train_cmd = app.add_subcommand("train", "train a model");
  train_cmd->add_option("--data", train_data, "manifest or dataset directory")->required();
  train_cmd->add_option("--out", train_out, "model file")->required();
  train_run.attach(train_cmd);

  std::string enc_model;
  std::string enc_data;
  std::string enc_domain = "target";
  std::string enc_out;
  CLI::App* enc_cmd = app.add_subcommand("encode", "encode features into binary codes");
  enc_cmd->add_option("--model", enc_model, "model file")->required();
  enc_cmd->add_option("--data", enc_data, "manifest, dataset directory or feature file")
      ->required();
  enc_cmd->add_option("--domain", enc_domain, "source or target")
      ->check(CLI::IsMember({"source", "target"}));
  enc_cmd->add_option("--out", enc_out, "codes file")->required();

  std::string ret_query;
  std::string ret_db;
  std::string ret_out;
  int ret_top = 100;
  CLI::App* ret_cmd = app.add_subcommand("retrieve", "rank database codes by Hamming distance");
  ret_cmd->add_option("--query", ret_query, "query codes file")->required();
  ret_cmd->add_option("--database", ret_db, "database codes file")->required();
  ret_cmd->add_option("--top", ret_top, "results per query (0 = all)");
  ret_cmd->add_option("--out", ret_out, "ranking file")->required();

  RunFlags eval_run;
  EvalFlags eval_flags;
  std::string eval_data;
  std::string eval_model;
  std::string eval_method = "pwcf";
  std::string eval_out;
  CLI::App* eval_cmd = app.add_subcommand("eval", "MAP and precision/recall over query splits");
  eval_cmd->add_option("--data", eval_data, "manifest or dataset directory")->required();
  eval_cmd->add_option("--model", eval_model, "fixed model; omit to retrain per trial");
  eval_cmd->add_option("--method", eval_method, "pwcf, lsh or pca_sign when retraining")
      ->check(CLI::IsMember({"pwcf", "lsh", "pca_sign"}));
  eval_cmd->add_option("--out", eval_out, "report directory")->required();
  eval_run.attach(eval_cmd);
  eval_flags.attach(eval_cmd);

  RunFlags abl_run;
  EvalFlags abl_flags;
  std::string abl_data;
  std::string abl_out;
  CLI::App* abl_cmd = app.add_subcommand("ablate", "compare the full model with its variants");
  abl_cmd->add_option("--data", abl_data, "manifest or dataset directory")->required();
  abl_cmd->add_option("--out", abl_out, "report directory")->required();
  abl_run.attach(abl_cmd);
  abl_flags.attach(abl_cmd);

  std::vector<const char*> argv{"pwcf"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "pwcf: error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth, out);
    if (*train_cmd) return cmd_train(train_run, train_data, train_out, out);
    if (*enc_cmd) return cmd_encode(enc_model, enc_data, enc_domain, enc_out, out);
    if (*ret_cmd) return cmd_retrieve(ret_query, ret_db, ret_top, ret_out, out);
    if (*eval_cmd) {
      return cmd_eval(eval_run, eval_flags, eval_data, eval_model, eval_method, eval_out, out);
    }
    if (*abl_cmd) return cmd_ablate(abl_run, abl_flags, abl_data, abl_out, out);
  } catch (const std::exception& e) {
    err << "pwcf: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace pwcf
