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

#ifndef PWCF_CLI_H_
#define PWCF_CLI_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pwcf/data.h"

namespace pwcf {

// Runs `pwcf <command> [flags]`; args excludes the program name. Returns the
// process exit code. Errors go to `err` prefixed with "pwcf: error: ".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// A manifest is a key/value file naming the feature and label files of a
// dataset pair (paths relative to the manifest). `data` may also be a
// directory holding manifest.txt.
DatasetPair load_manifest(const std::filesystem::path& data);

}  // namespace pwcf

#endif  // PWCF_CLI_H_
