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

#ifndef EPIWATCH_REPORT_H_
#define EPIWATCH_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "epiwatch/civil_time.h"
#include "epiwatch/document.h"
#include "epiwatch/tagger.h"
#include "epiwatch/topics.h"

namespace epiwatch::report {

// Shares and percentages are rounded half up per row; a column of rounded
// percentages may therefore total 99-101. Exact counts are always included.
uint64_t round_percent(uint64_t count, uint64_t total);

struct WeekBucket {
  Days week_start;  // a Sunday
  uint64_t count = 0;
};

// Posts per Sunday-start week, zero-filled over every week that overlaps the
// range. Documents dated outside the range are ignored.
std::vector<WeekBucket> weekly_post_counts(const std::vector<Document>& docs,
                                           const DateRange& range);

// Per subreddit plus an "all" series, each over the same weeks.
std::map<std::string, std::vector<WeekBucket>> weekly_post_counts_by_subreddit(
    const std::vector<Document>& docs, const DateRange& range);
std::string format_weekly(const std::map<std::string, std::vector<WeekBucket>>& series);

struct EntityRow {
  std::string name;
  uint64_t count = 0;
  uint64_t percent = 0;
};

struct CategoryTable {
  std::string subreddit;
  nerdata::Category category;
  uint64_t total = 0;
  std::vector<EntityRow> rows;  // count descending, then name
};

struct EntityReportOptions {
  bool truncate = true;  // keep the top 3 DIST rows and top 8 of the others
  std::vector<std::string> subreddits;  // always listed, even with no entities
};

// One table per subreddit x category, categories in default order followed by
// any extra ones. Categories with no entities get a table with total 0.
std::vector<CategoryTable> entity_report(const std::vector<tagger::EntityCount>& counts,
                                         const EntityReportOptions& options = {});
std::string format_entity_report(const std::vector<CategoryTable>& tables);

struct MonthlySeries {
  std::string name;
  std::vector<uint64_t> counts;  // one per month of the range
};

// Mention counts per calendar month for the given entity names; with no names
// the `top` most mentioned entities are used (ties by name).
std::vector<MonthlySeries> monthly_entity_trends(const std::vector<tagger::EntityMention>& mentions,
                                                 const DateRange& range,
                                                 std::vector<std::string> names = {},
                                                 size_t top = 5);
std::string format_monthly(const std::vector<MonthlySeries>& series, const DateRange& range);

struct ExportOptions {
  int top_n = 15;
  bool force = false;  // allow writing into a non-empty directory
};

// Writes keywords.txt, wordcloud_topic_<t>.tsv per topic,
// documents_with_topics.jsonl and topic_frequency.tsv into dir. Returns the
// written paths. Throws IoError if dir is non-empty and force is not set.
std::vector<std::filesystem::path> export_topic_artifacts(const topics::TopicModel& model,
                                                          const std::vector<Document>& docs,
                                                          const std::filesystem::path& dir,
                                                          const ExportOptions& options = {});

std::string format_keywords(const topics::TopicModel& model, int top_n);

}  // namespace epiwatch::report

#endif  // EPIWATCH_REPORT_H_
