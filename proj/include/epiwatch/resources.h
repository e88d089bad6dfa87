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

#ifndef EPIWATCH_RESOURCES_H_
#define EPIWATCH_RESOURCES_H_

#include <optional>
#include <string_view>

namespace epiwatch {

// Default data files compiled in from data/ (looked up by file name, e.g.
// "stopwords.txt").
std::optional<std::string_view> find_resource(std::string_view name);

// Like find_resource but throws ConfigError when the name is unknown.
std::string_view resource(std::string_view name);

}  // namespace epiwatch

#endif  // EPIWATCH_RESOURCES_H_
