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

#ifndef EPIWATCH_IO_H_
#define EPIWATCH_IO_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace epiwatch {

namespace fs = std::filesystem;

// All functions throw IoError on failure.
std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view content);

// Creates the directory (and parents) if missing.
void ensure_directory(const fs::path& dir);

bool is_nonempty_directory(const fs::path& dir);

// Lowercase hex SHA-256 of the file contents.
std::string sha256_file(const fs::path& path);
std::string sha256_hex(std::string_view data);

}  // namespace epiwatch

#endif  // EPIWATCH_IO_H_
