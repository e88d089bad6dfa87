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

#include "epiwatch/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "epiwatch/text_util.h"
#include "epiwatch/textprep.h"
#include "json.hpp"

namespace epiwatch::corpus {

using nlohmann::json;

namespace {

struct LineError {
  std::string what;
};

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string get_string(const json& j, const char* key, bool required) {
  const json* v = find(j, key);
  if (!v) {
    if (required) throw LineError{std::string("missing field '") + key + "'"};
    return "";
  }
  if (!v->is_string()) throw LineError{std::string("field '") + key + "' is not a string"};
  return v->get<std::string>();
}

int64_t get_integer(const json& j, const char* key, bool required) {
  const json* v = find(j, key);
  if (!v) {
    if (required) throw LineError{std::string("missing field '") + key + "'"};
    return 0;
  }
  if (v->is_number_integer()) return v->get<int64_t>();
  if (v->is_number_float()) {
    double d = v->get<double>();
    if (!std::isfinite(d)) throw LineError{std::string("field '") + key + "' is not finite"};
    return static_cast<int64_t>(std::floor(d));
  }
  if (v->is_string()) {
    const std::string s = v->get<std::string>();
    int64_t out = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return out;
  }
  throw LineError{std::string("field '") + key + "' is not an integer"};
}

std::string strip_fullname(std::string id) {
  if (starts_with(id, "t3_")) id.erase(0, 3);
  return id;
}

std::string record_key(const RedditRecord& r) {
  return (r.kind == RecordKind::kPost ? "p:" : "c:") + r.id;
}

bool contains_ci(std::string_view haystack_lower, std::string_view needle_lower) {
  return !needle_lower.empty() &&
         haystack_lower.find(needle_lower) != std::string_view::npos;
}

bool record_order(const RedditRecord& a, const RedditRecord& b) {
  if (a.created_utc != b.created_utc) return a.created_utc < b.created_utc;
  return a.id < b.id;
}

}  // namespace

DumpSchema parse_schema(std::string_view id) {
  if (id == "native") return DumpSchema::kNative;
  if (id == "pushshift") return DumpSchema::kPushshift;
  throw UnknownSchemaError(std::string(id));
}

std::string_view schema_name(DumpSchema schema) {
  return schema == DumpSchema::kNative ? "native" : "pushshift";
}

RedditRecord parse_record(std::string_view line, DumpSchema schema, size_t line_no) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) throw LineError{"record is not a JSON object"};
    RedditRecord r;
    if (schema == DumpSchema::kNative) {
      const std::string kind = get_string(j, "kind", true);
      if (kind == "post") {
        r.kind = RecordKind::kPost;
      } else if (kind == "comment") {
        r.kind = RecordKind::kComment;
      } else {
        throw LineError{"kind must be 'post' or 'comment'"};
      }
      std::string parent = get_string(j, "parent_post_id", false);
      if (parent.empty()) parent = get_string(j, "link_id", false);
      r.parent_post_id = strip_fullname(parent);
      r.body = get_string(j, "body", false);
    } else {
      r.kind = find(j, "link_id") ? RecordKind::kComment : RecordKind::kPost;
      if (r.kind == RecordKind::kComment) {
        r.parent_post_id = strip_fullname(get_string(j, "link_id", true));
        r.body = get_string(j, "body", false);
      } else {
        r.body = get_string(j, "selftext", false);
      }
    }
    r.id = get_string(j, "id", true);
    r.subreddit = get_string(j, "subreddit", true);
    r.created_utc = get_integer(j, "created_utc", true);
    if (r.kind == RecordKind::kPost) {
      r.title = get_string(j, "title", false);
      r.num_comments = get_integer(j, "num_comments", false);
      if (r.num_comments < 0) throw LineError{"num_comments is negative"};
      if (!r.parent_post_id.empty()) throw LineError{"post carries a parent id"};
    } else if (r.parent_post_id.empty()) {
      throw LineError{"comment without parent post id"};
    }
    if (r.id.empty()) throw LineError{"empty id"};
    return r;
  } catch (const json::exception& e) {
    throw DumpParseError(line_no, e.what());
  } catch (const LineError& e) {
    throw DumpParseError(line_no, e.what);
  }
}

std::vector<RedditRecord> parse_dump(std::istream& in, DumpSchema schema,
                                     const ParseOptions& options) {
  std::vector<RedditRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse_record(line, schema, line_no));
    } catch (const DumpParseError& e) {
      if (!options.skip_malformed) throw;
      if (options.diagnostics) options.diagnostics->note(e.what());
    }
  }
  return out;
}

std::vector<RedditRecord> parse_dump(const std::filesystem::path& path,
                                     DumpSchema schema, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dump '" + path.string() + "'");
  return parse_dump(in, schema, options);
}

void FilterSpec::validate() const {
  if (keywords.empty()) throw ConfigError("filter needs at least one keyword");
  if (dates.to < dates.from) throw ConfigError("filter date_from is after date_to");
}

bool FilterSpec::in_scope(const RedditRecord& r) const {
  if (!dates.contains(utc_day(r.created_utc))) return false;
  if (subreddits.empty()) return true;
  const std::string sub = to_lower(r.subreddit);
  return std::any_of(subreddits.begin(), subreddits.end(),
                     [&](const std::string& s) { return to_lower(s) == sub; });
}

bool FilterSpec::matches_keyword(const RedditRecord& r) const {
  const std::string title = to_lower(r.title);
  const std::string body = to_lower(r.body);
  for (const auto& kw : keywords) {
    const std::string k = to_lower(kw);
    if (contains_ci(title, k) || contains_ci(body, k)) return true;
  }
  return false;
}

std::vector<RedditRecord> filter_records(const std::vector<RedditRecord>& records,
                                         const FilterSpec& spec) {
  std::vector<RedditRecord> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (!spec.in_scope(r) || !spec.matches_keyword(r)) continue;
    if (!seen.insert(record_key(r)).second) continue;
    out.push_back(r);
  }
  return out;
}

bool is_placeholder_body(std::string_view body) {
  auto t = trim(body);
  return t == "[removed]" || t == "[deleted]";
}

std::vector<Document> assemble_documents(const std::vector<RedditRecord>& all_records,
                                         const std::vector<RedditRecord>& matched,
                                         const AssembleOptions& options) {
  std::unordered_map<std::string, const RedditRecord*> posts;
  std::unordered_map<std::string, std::vector<const RedditRecord*>> thread;
  std::unordered_set<std::string> seen_comments;
  for (const auto& r : all_records) {
    if (r.kind == RecordKind::kPost) {
      posts.emplace(r.id, &r);
    } else if (seen_comments.insert(r.id).second) {
      thread[r.parent_post_id].push_back(&r);
    }
  }

  auto note = [&](std::string msg) {
    if (options.diagnostics) options.diagnostics->note(std::move(msg));
  };

  std::set<std::string> wanted;
  for (const auto& r : matched) {
    const std::string& post_id = r.kind == RecordKind::kPost ? r.id : r.parent_post_id;
    if (!posts.count(post_id)) {
      if (r.kind == RecordKind::kComment) note("OrphanComment(" + r.id + ")");
      continue;
    }
    wanted.insert(post_id);
  }

  std::vector<Document> docs;
  for (const auto& post_id : wanted) {
    const RedditRecord& post = *posts.at(post_id);
    if (options.post_scope && !options.post_scope->in_scope(post)) {
      note("post " + post_id + " outside the filter scope; thread dropped");
      continue;
    }
    std::vector<const RedditRecord*> comments;
    if (auto it = thread.find(post_id); it != thread.end()) comments = it->second;
    std::sort(comments.begin(), comments.end(),
              [](const RedditRecord* a, const RedditRecord* b) { return record_order(*a, *b); });
    Document doc;
    doc.post_id = post.id;
    doc.subreddit = post.subreddit;
    doc.created_utc = post.created_utc;
    doc.title = post.title;
    for (const auto* c : comments)
      if (!is_placeholder_body(c->body)) doc.comment_bodies.push_back(c->body);
    doc.raw_text = build_raw_text(doc.title, doc.comment_bodies);
    docs.push_back(std::move(doc));
  }
  std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) {
    if (a.created_utc != b.created_utc) return a.created_utc < b.created_utc;
    return a.post_id < b.post_id;
  });
  return docs;
}

SubredditStats CorpusStats::totals() const {
  SubredditStats t;
  for (const auto& [name, row] : rows) {
    t.posts += row.posts;
    t.comments += row.comments;
    t.sentences += row.sentences;
    t.wordcount += row.wordcount;
  }
  return t;
}

CorpusStats corpus_stats(const std::vector<Document>& documents,
                         const SentenceSplitter& splitter) {
  CorpusStats stats;
  for (const auto& doc : documents) {
    SubredditStats& row = stats.rows[doc.subreddit];
    ++row.posts;
    row.comments += doc.comment_bodies.size();
    for (const auto& body : doc.comment_bodies) {
      const std::string text = textprep::strip_urls(body);
      row.sentences += splitter(text).size();
      row.wordcount += split_whitespace(text).size();
    }
  }
  return stats;
}

CorpusStats corpus_stats(const std::vector<Document>& documents) {
  return corpus_stats(documents, [](std::string_view text) {
    return textprep::split_sentences(text);
  });
}

std::string format_stats_table(const CorpusStats& stats) {
  std::string out = "Subreddit\t#Posts\t#Comments\t#Sentences\tWordcount\n";
  auto row = [&](const std::string& name, const SubredditStats& s) {
    out += name + "\t" + std::to_string(s.posts) + "\t" + std::to_string(s.comments) +
           "\t" + std::to_string(s.sentences) + "\t" + std::to_string(s.wordcount) + "\n";
  };
  for (const auto& [name, s] : stats.rows) row(name, s);
  row("Total", stats.totals());
  return out;
}

std::vector<std::string> dedup_sentences(const std::vector<std::string>& sentences) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& s : sentences)
    if (seen.insert(s).second) out.push_back(s);
  return out;
}

std::vector<std::string> document_sentences(const std::vector<Document>& documents) {
  std::vector<std::string> out;
  for (const auto& doc : documents)
    for (const auto& part : doc.text_parts())
      for (auto& s : textprep::split_sentences(textprep::strip_urls(part)))
        out.push_back(std::move(s));
  return out;
}

}  // namespace epiwatch::corpus
