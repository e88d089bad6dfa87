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
#include "epiwatch/civil_time.h"

#include <charconv>
#include <cstdio>

#include "epiwatch/error.h"

namespace epiwatch {

namespace chr = std::chrono;

Days utc_day(int64_t epoch_seconds) {
  return chr::floor<chr::days>(chr::sys_seconds{chr::seconds{epoch_seconds}});
}

Days parse_date(std::string_view text) {
  auto bad = [&] {
    return ConfigError("invalid date '" + std::string(text) +
                       "' (expected YYYY-MM-DD)");
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  int y = 0;
  unsigned m = 0, d = 0;
  auto parse = [&](std::string_view part, auto& value) {
    auto res = std::from_chars(part.data(), part.data() + part.size(), value);
    if (res.ec != std::errc() || res.ptr != part.data() + part.size())
      throw bad();
  };
  parse(text.substr(0, 4), y);
  parse(text.substr(5, 2), m);
  parse(text.substr(8, 2), d);
  chr::year_month_day ymd{chr::year{y}, chr::month{m}, chr::day{d}};
  if (!ymd.ok()) throw bad();
  return Days{ymd};
}

std::string format_date(Days day) {
  chr::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

Days week_start(Days day) {
  chr::weekday wd{day};
  return day - chr::days{wd.c_encoding()};
}

Days month_start(Days day) {
  chr::year_month_day ymd{day};
  return Days{ymd.year() / ymd.month() / chr::day{1}};
}

std::string month_key(Days day) { return format_date(day).substr(0, 7); }

std::vector<Days> months_in(const DateRange& range) {
  std::vector<Days> out;
  if (range.to < range.from) return out;
  chr::year_month cur{chr::year_month_day{range.from}.year(),
                      chr::year_month_day{range.from}.month()};
  chr::year_month last{chr::year_month_day{range.to}.year(),
                       chr::year_month_day{range.to}.month()};
  while (cur <= last) {
    out.push_back(Days{cur / chr::day{1}});
    cur += chr::months{1};
  }
  return out;
}

}  // namespace epiwatch
