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

#include "epiwatch/resources.h"

#include <string>

#include "epiwatch/error.h"

namespace epiwatch {

std::string_view resource(std::string_view name) {
  auto found = find_resource(name);
  if (!found) throw ConfigError("missing built-in resource " + std::string(name));
  return *found;
}

}  // namespace epiwatch
