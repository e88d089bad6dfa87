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

#ifndef EPIWATCH_CORPUS_H_
#define EPIWATCH_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "epiwatch/civil_time.h"
#include "epiwatch/document.h"
#include "epiwatch/error.h"

namespace epiwatch::corpus {

enum class RecordKind { kPost, kComment };

struct RedditRecord {
  RecordKind kind = RecordKind::kPost;
  std::string id;
  std::string parent_post_id;  // comments only, without the "t3_" prefix
  std::string subreddit;
  int64_t created_utc = 0;
  std::string title;
  std::string body;
  int64_t num_comments = 0;

  bool operator==(const RedditRecord&) const = default;
};

// "native": {kind, id, parent_post_id|link_id, subreddit, created_utc, title,
//            body, num_comments}
// "pushshift": submissions {id, subreddit, created_utc, title, selftext,
//              num_comments}; comments {id, link_id, subreddit, created_utc, body}
enum class DumpSchema { kNative, kPushshift };

DumpSchema parse_schema(std::string_view id);
std::string_view schema_name(DumpSchema schema);

struct ParseOptions {
  // When false the first malformed line throws DumpParseError; otherwise it is
  // skipped and noted in diagnostics.
  bool skip_malformed = false;
  Diagnostics* diagnostics = nullptr;
};

RedditRecord parse_record(std::string_view line, DumpSchema schema, size_t line_no);
std::vector<RedditRecord> parse_dump(std::istream& in, DumpSchema schema,
                                     const ParseOptions& options = {});
std::vector<RedditRecord> parse_dump(const std::filesystem::path& path,
                                     DumpSchema schema,
                                     const ParseOptions& options = {});

struct FilterSpec {
  std::vector<std::string> keywords;    // case-insensitive substrings
  DateRange dates;                      // inclusive UTC calendar days
  std::vector<std::string> subreddits;  // case-insensitive; empty admits all

  void validate() const;
  bool in_scope(const RedditRecord& r) const;  // subreddit and date only
  bool matches_keyword(const RedditRecord& r) const;
};

// Records in scope whose title or body contains a keyword, first occurrence of
// each (kind, id) kept, input order preserved.
std::vector<RedditRecord> filter_records(const std::vector<RedditRecord>& records,
                                         const FilterSpec& spec);

struct AssembleOptions {
  // When set, threads whose post lies outside these dates or subreddits are
  // dropped (a matching comment may belong to an older post).
  const FilterSpec* post_scope = nullptr;
  Diagnostics* diagnostics = nullptr;
};

// One Document per post that matched or has a matching comment, carrying all
// of that post's comments from all_records sorted by (created_utc, id), minus
// "[removed]"/"[deleted]" bodies. Output sorted by (created_utc, post_id).
std::vector<Document> assemble_documents(const std::vector<RedditRecord>& all_records,
                                         const std::vector<RedditRecord>& matched,
                                         const AssembleOptions& options = {});

bool is_placeholder_body(std::string_view body);

struct SubredditStats {
  uint64_t posts = 0;
  uint64_t comments = 0;
  uint64_t sentences = 0;
  uint64_t wordcount = 0;

  bool operator==(const SubredditStats&) const = default;
};

struct CorpusStats {
  std::map<std::string, SubredditStats> rows;
  SubredditStats totals() const;
};

using SentenceSplitter = std::function<std::vector<std::string>(std::string_view)>;

// Sentences and words are counted over comment bodies after URL removal;
// words are whitespace tokens.
CorpusStats corpus_stats(const std::vector<Document>& documents,
                         const SentenceSplitter& splitter);
CorpusStats corpus_stats(const std::vector<Document>& documents);

// Tab-separated: Subreddit, #Posts, #Comments, #Sentences, Wordcount, then a
// Total row.
std::string format_stats_table(const CorpusStats& stats);

// Exact-match deduplication keeping first occurrences in order.
std::vector<std::string> dedup_sentences(const std::vector<std::string>& sentences);

// Every sentence of every document (title and comments), URL-stripped and
// split, in document order.
std::vector<std::string> document_sentences(const std::vector<Document>& documents);

}  // namespace epiwatch::corpus

#endif  // EPIWATCH_CORPUS_H_
