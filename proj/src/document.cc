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

#include "epiwatch/document.h"

#include <fstream>
#include <sstream>

#include "epiwatch/error.h"
#include "epiwatch/io.h"
#include "json.hpp"

namespace epiwatch {

using nlohmann::ordered_json;

std::vector<std::string> Document::text_parts() const {
  std::vector<std::string> parts;
  if (!title.empty()) parts.push_back(title);
  for (const auto& body : comment_bodies)
    if (!body.empty()) parts.push_back(body);
  return parts;
}

std::string build_raw_text(const std::string& title,
                           const std::vector<std::string>& comment_bodies) {
  std::string out = title;
  for (const auto& body : comment_bodies) {
    out.push_back('\n');
    out.append(body);
  }
  return out;
}

namespace {

ordered_json to_json(const Document& doc) {
  ordered_json j;
  j["post_id"] = doc.post_id;
  j["subreddit"] = doc.subreddit;
  j["created_utc"] = doc.created_utc;
  j["title"] = doc.title;
  j["comment_bodies"] = doc.comment_bodies;
  j["raw_text"] = doc.raw_text;
  j["cleaned_text"] = doc.cleaned_text;
  if (doc.topic) j["topic"] = *doc.topic;
  if (doc.topic_probability) j["topic_probability"] = *doc.topic_probability;
  return j;
}

Document from_json(const ordered_json& j) {
  Document doc;
  doc.post_id = j.at("post_id").get<std::string>();
  doc.subreddit = j.at("subreddit").get<std::string>();
  doc.created_utc = j.at("created_utc").get<int64_t>();
  doc.title = j.value("title", "");
  doc.comment_bodies =
      j.value("comment_bodies", std::vector<std::string>{});
  doc.raw_text = j.contains("raw_text")
                     ? j.at("raw_text").get<std::string>()
                     : build_raw_text(doc.title, doc.comment_bodies);
  doc.cleaned_text = j.value("cleaned_text", "");
  if (j.contains("topic")) doc.topic = j.at("topic").get<int>();
  if (j.contains("topic_probability"))
    doc.topic_probability = j.at("topic_probability").get<double>();
  return doc;
}

}  // namespace

void write_documents(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& doc : docs) out << to_json(doc).dump() << '\n';
}

void write_documents(const std::filesystem::path& path,
                     const std::vector<Document>& docs) {
  std::ostringstream buf;
  write_documents(buf, docs);
  write_file(path, buf.str());
}

std::vector<Document> read_documents(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      docs.push_back(from_json(ordered_json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(line_no, std::string("bad document record: ") + e.what());
    }
  }
  return docs;
}

std::vector<Document> read_documents(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_documents(in);
}

}  // namespace epiwatch
