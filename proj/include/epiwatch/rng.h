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
#ifndef EPIWATCH_RNG_H_
#define EPIWATCH_RNG_H_

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace epiwatch {

// Seeded generator whose derived draws are identical on every platform.
// std::mt19937_64 has a standardized output sequence; the distributions built
// on top of it here are written out explicitly because the standard library
// distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  uint64_t uniform_index(uint64_t n);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal (Marsaglia polar method).
  double normal();

  // Gamma(shape, scale) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape, double scale);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace epiwatch

#endif  // EPIWATCH_RNG_H_
