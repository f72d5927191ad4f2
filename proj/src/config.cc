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

#include "pwcf/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pwcf/common.h"

namespace pwcf {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const KeyValueDocument::Entry& e, std::string_view expected) {
  throw Error("config: key '" + e.key + "' (line " + std::to_string(e.line) + "): expected " +
              std::string(expected) + ", got \"" + e.value + "\"");
}

double as_double(const KeyValueDocument::Entry& e) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size() || !std::isfinite(v)) {
    bad_value(e, "a finite number");
  }
  return v;
}

long long as_integer(const KeyValueDocument::Entry& e) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size()) bad_value(e, "an integer");
  return v;
}

bool as_bool(const KeyValueDocument::Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off") return false;
  bad_value(e, "a boolean");
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
  KeyValueDocument doc;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error("config: line " + std::to_string(line_no) + ": expected `key = value`");
    }
    Entry e{std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))),
            line_no};
    if (e.key.empty()) throw Error("config: line " + std::to_string(line_no) + ": empty key");
    if (doc.find(e.key) != nullptr) {
      throw Error("config: key '" + e.key + "' repeated on line " + std::to_string(line_no));
    }
    doc.entries.push_back(std::move(e));
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << is.rdbuf();
  try {
    return parse(buf.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

const KeyValueDocument::Entry* KeyValueDocument::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

std::string KeyValueDocument::to_text() const {
  std::string out;
  for (const auto& e : entries) out += e.key + " = " + e.value + "\n";
  return out;
}

const std::vector<std::string>& ablation_flag_names() {
  static const std::vector<std::string> names = {
      "disable_triplet",    "standard_triplet", "disable_manifold",
      "disable_classifier", "disable_hfon",     "disable_quantization"};
  return names;
}

void AblationFlags::set(std::string_view name, bool value) {
  if (name == "disable_triplet") {
    disable_triplet = value;
  } else if (name == "standard_triplet") {
    standard_triplet = value;
  } else if (name == "disable_manifold") {
    disable_manifold = value;
  } else if (name == "disable_classifier") {
    disable_classifier = value;
  } else if (name == "disable_hfon") {
    disable_hfon = value;
  } else if (name == "disable_quantization") {
    disable_quantization = value;
  } else {
    throw Error("unknown ablation flag '" + std::string(name) + "'");
  }
}

bool AblationFlags::any() const {
  return disable_triplet || standard_triplet || disable_manifold || disable_classifier ||
         disable_hfon || disable_quantization;
}

std::string AblationFlags::to_string() const {
  std::string out;
  const bool values[] = {disable_triplet,    standard_triplet, disable_manifold,
                         disable_classifier, disable_hfon,     disable_quantization};
  for (std::size_t i = 0; i < ablation_flag_names().size(); ++i) {
    if (!values[i]) continue;
    if (!out.empty()) out += ',';
    out += ablation_flag_names()[i];
  }
  return out.empty() ? "none" : out;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw Error("config: key '" + key + "': " + why);
  };
  if (r < 1) fail("r", "code length must be >= 1");
  if (k < 1) fail("k", "neighbor count must be >= 1");
  if (!(tau > 0.0)) fail("tau", "step size must be > 0");
  if (gamma < 0.0) fail("gamma", "must be >= 0");
  if (theta < 0.0) fail("theta", "must be >= 0");
  if (lambda1 < 0.0) fail("lambda1", "must be >= 0");
  if (lambda2 < 0.0) fail("lambda2", "must be >= 0");
  if (lambda3 < 0.0) fail("lambda3", "must be >= 0");
  if (m < 0.0) fail("m", "margin must be >= 0");
  if (max_iters < 0) fail("max_iters", "must be >= 0");
  if (inner_w_iters < 0) fail("inner_w_iters", "must be >= 0");
}

std::string RunConfig::to_text() const {
  std::ostringstream os;
  os << "r = " << r << "\n"
     << "k = " << k << "\n"
     << "m = " << format_double(m) << "\n"
     << "gamma = " << format_double(gamma) << "\n"
     << "theta = " << format_double(theta) << "\n"
     << "lambda1 = " << format_double(lambda1) << "\n"
     << "lambda2 = " << format_double(lambda2) << "\n"
     << "lambda3 = " << format_double(lambda3) << "\n"
     << "tau = " << format_double(tau) << "\n"
     << "max_iters = " << max_iters << "\n"
     << "inner_w_iters = " << inner_w_iters << "\n"
     << "seed = " << seed << "\n";
  const bool values[] = {ablation.disable_triplet,    ablation.standard_triplet,
                         ablation.disable_manifold,   ablation.disable_classifier,
                         ablation.disable_hfon,       ablation.disable_quantization};
  for (std::size_t i = 0; i < ablation_flag_names().size(); ++i) {
    os << ablation_flag_names()[i] << " = " << (values[i] ? "true" : "false") << "\n";
  }
  return os.str();
}

RunConfig config_from_document(const KeyValueDocument& doc) {
  RunConfig c;
  for (const auto& e : doc.entries) {
    if (e.key == "r") {
      c.r = static_cast<int>(as_integer(e));
    } else if (e.key == "k") {
      c.k = static_cast<int>(as_integer(e));
    } else if (e.key == "m") {
      c.m = as_double(e);
    } else if (e.key == "gamma") {
      c.gamma = as_double(e);
    } else if (e.key == "theta") {
      c.theta = as_double(e);
    } else if (e.key == "lambda1") {
      c.lambda1 = as_double(e);
    } else if (e.key == "lambda2") {
      c.lambda2 = as_double(e);
    } else if (e.key == "lambda3") {
      c.lambda3 = as_double(e);
    } else if (e.key == "tau") {
      c.tau = as_double(e);
    } else if (e.key == "max_iters") {
      c.max_iters = static_cast<int>(as_integer(e));
    } else if (e.key == "inner_w_iters") {
      c.inner_w_iters = static_cast<int>(as_integer(e));
    } else if (e.key == "seed") {
      const long long s = as_integer(e);
      if (s < 0) bad_value(e, "a non-negative integer");
      c.seed = static_cast<std::uint64_t>(s);
    } else if (std::find(ablation_flag_names().begin(), ablation_flag_names().end(), e.key) !=
               ablation_flag_names().end()) {
      c.ablation.set(e.key, as_bool(e));
    } else {
      throw Error("config: unknown key '" + e.key + "' (line " + std::to_string(e.line) + ")");
    }
  }
  c.validate();
  return c;
}

RunConfig parse_config_text(std::string_view text) {
  return config_from_document(KeyValueDocument::parse(text));
}

RunConfig parse_config(const std::filesystem::path& path) {
  try {
    return config_from_document(KeyValueDocument::load(path));
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw Error(path.string() + ": " + msg);
  }
}

}  // namespace pwcf
