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
#ifndef EPIWATCH_CIVIL_TIME_H_
#define EPIWATCH_CIVIL_TIME_H_

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace epiwatch {

using Days = std::chrono::sys_days;

// UTC calendar day containing the given epoch second (floors negatives).
Days utc_day(int64_t epoch_seconds);

// Parses YYYY-MM-DD; throws ConfigError on malformed or impossible dates.
Days parse_date(std::string_view text);

std::string format_date(Days day);

// Sunday on or before the given day.
Days week_start(Days day);

// First day of the calendar month containing the day.
Days month_start(Days day);

// "YYYY-MM".
std::string month_key(Days day);

// Inclusive calendar-day range.
struct DateRange {
  Days from;
  Days to;

  bool contains(Days day) const { return from <= day && day <= to; }
};

// Month starts from the month of range.from through the month of range.to.
std::vector<Days> months_in(const DateRange& range);

}  // namespace epiwatch

#endif  // EPIWATCH_CIVIL_TIME_H_
