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

#include "epiwatch/special_functions.h"

#include <cmath>
#include <limits>

namespace epiwatch {

namespace {

// Positive root of psi, split so that x - root is exact for x in [1, 2].
constexpr double kRootHi = 1.4616321449683622;
constexpr double kRootLo = 9.549995429965697e-17;

// Bernoulli coefficients B_2n / (2n) of the asymptotic series, n = 1..7.
constexpr double kSeries[] = {1.0 / 12, -1.0 / 120, 1.0 / 252, -1.0 / 240,
                              1.0 / 132, -691.0 / 32760, 1.0 / 12};

constexpr double kAsymptotic = 10.0;

}  // namespace

double digamma(double x) {
  if (std::isnan(x) || x <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x >= 1.0 && x <= 2.0) {
    // psi(x) - psi(root) with every term carrying the factor d = x - root,
    // which keeps full relative accuracy next to the root.
    const double d = (x - kRootHi) - kRootLo;
    double y = x, y0 = kRootHi, shift = 0.0;
    while (y < kAsymptotic) {
      shift += 1.0 / (y * y0);
      y += 1.0;
      y0 += 1.0;
    }
    const double u = 1.0 / y, u0 = 1.0 / y0;
    // u^m - u0^m = (u - u0) * sum_j u^j u0^(m-1-j), and u - u0 = -d u u0.
    double series = 0.0;
    for (int n = 1; n <= 7; ++n) {
      const int m = 2 * n;
      double s = 0.0, up = 1.0;
      for (int j = 0; j < m; ++j) {
        s += up * std::pow(u0, m - 1 - j);
        up *= u;
      }
      series += kSeries[n - 1] * s;
    }
    return d * shift + std::log1p(d * u0) + 0.5 * d * u * u0 + d * u * u0 * series;
  }
  double shift = 0.0;
  while (x < kAsymptotic) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // psi(x) ~ ln x - 1/(2x) - sum B_2n / (2n x^2n)
  const double r = 1.0 / x;
  const double r2 = r * r;
  double series = 0.0;
  for (int n = 6; n >= 0; --n) series = r2 * (kSeries[n] + series);
  return shift + std::log(x) - 0.5 * r - series;
}

}  // namespace epiwatch
