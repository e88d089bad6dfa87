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
#ifndef EPIWATCH_TEXT_UTIL_H_
#define EPIWATCH_TEXT_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace epiwatch {

// ASCII-only character classes; bytes >= 0x80 are never letters, digits,
// whitespace or punctuation here.
inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}
inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
inline bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }
inline bool is_ascii_alpha(char c) {
  return is_ascii_upper(c) || is_ascii_lower(c);
}
inline bool is_ascii_alnum(char c) {
  return is_ascii_alpha(c) || is_ascii_digit(c);
}
inline bool is_ascii_punct(char c) {
  return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') ||
         (c >= '[' && c <= '`') || (c >= '{' && c <= '~');
}
inline char to_lower_ascii(char c) {
  return is_ascii_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

// Splits on runs of ASCII whitespace; never yields empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

// Splits on a single delimiter, keeping empty fields.
std::vector<std::string> split(std::string_view s, char delimiter);

// Comma-separated list with each item trimmed and empty items dropped.
std::vector<std::string> split_csv(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Collapses whitespace runs to one space and trims both ends.
std::string collapse_whitespace(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

// Lines of a data file with '#' comment lines and blank lines removed and
// trailing carriage returns stripped.
std::vector<std::string> data_lines(std::string_view text);

// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

// Fixed-point rendering with the given number of decimals.
std::string format_fixed(double value, int decimals);

}  // namespace epiwatch

#endif  // EPIWATCH_TEXT_UTIL_H_
