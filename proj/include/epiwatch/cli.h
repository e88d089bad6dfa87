// Copyright 2026 The Epiwatch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EPIWATCH_CLI_H_
#define EPIWATCH_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace epiwatch::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;

// args excludes the program name. Writing subcommands record a run manifest
// (<dir>/<subcommand>.manifest.json, or <file>.manifest.json for single-file
// outputs) before producing their outputs.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace epiwatch::cli

#endif  // EPIWATCH_CLI_H_
