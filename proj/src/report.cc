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

#include "epiwatch/report.h"

#include <algorithm>
#include <set>
#include <tuple>

#include "epiwatch/error.h"
#include "epiwatch/io.h"
#include "epiwatch/text_util.h"

namespace epiwatch::report {

namespace {

std::vector<Days> weeks_of(const DateRange& range) {
  std::vector<Days> out;
  for (Days w = week_start(range.from); w <= range.to; w += std::chrono::days(7))
    out.push_back(w);
  return out;
}

size_t week_index(const DateRange& range, Days day) {
  return size_t((week_start(day) - week_start(range.from)).count() / 7);
}

}  // namespace

uint64_t round_percent(uint64_t count, uint64_t total) {
  return total == 0 ? 0 : (200 * count + total) / (2 * total);
}

std::vector<WeekBucket> weekly_post_counts(const std::vector<Document>& docs,
                                           const DateRange& range) {
  std::vector<WeekBucket> out;
  for (Days w : weeks_of(range)) out.push_back({w, 0});
  for (const auto& d : docs) {
    const Days day = utc_day(d.created_utc);
    if (range.contains(day)) ++out[week_index(range, day)].count;
  }
  return out;
}

std::map<std::string, std::vector<WeekBucket>> weekly_post_counts_by_subreddit(
    const std::vector<Document>& docs, const DateRange& range) {
  std::map<std::string, std::vector<Document>> groups;
  for (const auto& d : docs) groups[d.subreddit].push_back(d);
  std::map<std::string, std::vector<WeekBucket>> out;
  for (const auto& [sub, group] : groups) out[sub] = weekly_post_counts(group, range);
  out["all"] = weekly_post_counts(docs, range);
  return out;
}

std::string format_weekly(const std::map<std::string, std::vector<WeekBucket>>& series) {
  std::string out = "subreddit\tweek_start\tweek_end\tposts\n";
  for (const auto& [sub, buckets] : series)
    for (const auto& b : buckets)
      out += sub + "\t" + format_date(b.week_start) + "\t" +
             format_date(b.week_start + std::chrono::days(6)) + "\t" + std::to_string(b.count) +
             "\n";
  return out;
}

std::vector<CategoryTable> entity_report(const std::vector<tagger::EntityCount>& counts,
                                         const EntityReportOptions& options) {
  std::set<std::string> subreddits(options.subreddits.begin(), options.subreddits.end());
  std::vector<nerdata::Category> categories = {"DIST", "TEST", "SYM", "DIT", "PPE"};
  for (const auto& c : counts) {
    subreddits.insert(c.subreddit);
    if (std::find(categories.begin(), categories.end(), c.category) == categories.end())
      categories.push_back(c.category);
  }
  std::sort(categories.begin() + 5, categories.end());

  std::vector<CategoryTable> out;
  for (const auto& sub : subreddits) {
    for (const auto& cat : categories) {
      CategoryTable t{sub, cat, 0, {}};
      for (const auto& c : counts)
        if (c.subreddit == sub && c.category == cat) {
          t.total += c.count;
          t.rows.push_back({c.name, c.count, 0});
        }
      for (auto& r : t.rows) r.percent = round_percent(r.count, t.total);
      std::sort(t.rows.begin(), t.rows.end(), [](const EntityRow& a, const EntityRow& b) {
        return a.count > b.count || (a.count == b.count && a.name < b.name);
      });
      const size_t keep = cat == "DIST" ? 3 : 8;
      if (options.truncate && t.rows.size() > keep) t.rows.resize(keep);
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::string format_entity_report(const std::vector<CategoryTable>& tables) {
  std::string out = "subreddit\tcategory\trank\tname\tcount\tpercent\n";
  for (const auto& t : tables) {
    out += t.subreddit + "\t" + t.category + "\ttotal\t\t" + std::to_string(t.total) + "\t" +
           (t.total ? "100" : "0") + "\n";
    for (size_t i = 0; i < t.rows.size(); ++i)
      out += t.subreddit + "\t" + t.category + "\t" + std::to_string(i + 1) + "\t" +
             t.rows[i].name + "\t" + std::to_string(t.rows[i].count) + "\t" +
             std::to_string(t.rows[i].percent) + "\n";
  }
  return out;
}

std::vector<MonthlySeries> monthly_entity_trends(const std::vector<tagger::EntityMention>& mentions,
                                                 const DateRange& range,
                                                 std::vector<std::string> names, size_t top) {
  if (names.empty()) {
    std::map<std::string, uint64_t> totals;
    for (const auto& m : mentions)
      if (range.contains(utc_day(m.created_utc))) ++totals[m.name];
    std::vector<std::pair<std::string, uint64_t>> ranked(totals.begin(), totals.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (size_t i = 0; i < ranked.size() && i < top; ++i) names.push_back(ranked[i].first);
  }
  const auto months = months_in(range);
  std::map<std::string, size_t> month_pos;
  for (size_t i = 0; i < months.size(); ++i) month_pos[month_key(months[i])] = i;

  std::vector<MonthlySeries> out;
  for (const auto& name : names) {
    MonthlySeries s{name, std::vector<uint64_t>(months.size(), 0)};
    for (const auto& m : mentions) {
      const Days day = utc_day(m.created_utc);
      if (m.name == name && range.contains(day)) ++s.counts[month_pos.at(month_key(day))];
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_monthly(const std::vector<MonthlySeries>& series, const DateRange& range) {
  std::string out = "entity";
  for (Days m : months_in(range)) out += "\t" + month_key(m);
  out += "\n";
  for (const auto& s : series) {
    out += s.name;
    for (uint64_t c : s.counts) out += "\t" + std::to_string(c);
    out += "\n";
  }
  return out;
}

std::string format_keywords(const topics::TopicModel& model, int top_n) {
  std::string out = "vocabulary_size\t" + std::to_string(model.num_terms()) + "\n";
  const auto words = topics::top_words(model, top_n);
  for (size_t t = 0; t < words.size(); ++t) {
    out += "\ntopic\t" + std::to_string(t) + "\n";
    for (const auto& w : words[t]) out += w.term + "\t" + format_fixed(w.weight, 6) + "\n";
  }
  return out;
}

std::vector<std::filesystem::path> export_topic_artifacts(const topics::TopicModel& model,
                                                          const std::vector<Document>& docs,
                                                          const std::filesystem::path& dir,
                                                          const ExportOptions& options) {
  if (is_nonempty_directory(dir) && !options.force)
    throw IoError("refusing to write into non-empty directory " + dir.string() +
                  " (use --force)");
  ensure_directory(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    written.push_back(dir / name);
  };
  put("keywords.txt", format_keywords(model, options.top_n));
  const auto words = topics::top_words(model, options.top_n);
  for (size_t t = 0; t < words.size(); ++t) {
    std::string cloud = "term\tweight\n";
    for (const auto& w : words[t]) cloud += w.term + "\t" + format_fixed(w.weight, 6) + "\n";
    put("wordcloud_topic_" + std::to_string(t) + ".tsv", cloud);
  }
  write_documents(dir / "documents_with_topics.jsonl", docs);
  written.push_back(dir / "documents_with_topics.jsonl");
  put("topic_frequency.tsv",
      topics::format_topic_frequency(topics::topic_frequency(docs, model.k())));
  return written;
}

}  // namespace epiwatch::report
