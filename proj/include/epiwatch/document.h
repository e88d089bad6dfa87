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

#ifndef EPIWATCH_DOCUMENT_H_
#define EPIWATCH_DOCUMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace epiwatch {

// One post plus its full comment thread.
struct Document {
  std::string post_id;
  std::string subreddit;
  int64_t created_utc = 0;
  std::string title;
  std::vector<std::string> comment_bodies;
  std::string raw_text;
  std::string cleaned_text;

  // Filled in by topic assignment.
  std::optional<int> topic;
  std::optional<double> topic_probability;

  // The title followed by each comment body, in order. Empty parts skipped.
  std::vector<std::string> text_parts() const;

  bool operator==(const Document&) const = default;
};

// Title and comment bodies joined by newlines.
std::string build_raw_text(const std::string& title,
                           const std::vector<std::string>& comment_bodies);

// Documents files hold one JSON object per line (UTF-8).
void write_documents(std::ostream& out, const std::vector<Document>& docs);
void write_documents(const std::filesystem::path& path,
                     const std::vector<Document>& docs);
std::vector<Document> read_documents(std::istream& in);
std::vector<Document> read_documents(const std::filesystem::path& path);

}  // namespace epiwatch

#endif  // EPIWATCH_DOCUMENT_H_
