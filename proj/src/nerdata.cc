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

#include "epiwatch/nerdata.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "epiwatch/error.h"
#include "epiwatch/io.h"
#include "epiwatch/resources.h"
#include "epiwatch/rng.h"
#include "epiwatch/text_util.h"
#include "epiwatch/textprep.h"

namespace epiwatch::nerdata {

namespace {

char prefix_char(Prefix p) {
  switch (p) {
    case Prefix::kB: return 'B';
    case Prefix::kI: return 'I';
    case Prefix::kL: return 'L';
    case Prefix::kU: return 'U';
    case Prefix::kO: break;
  }
  return 'O';
}

bool is_word_char(char c) { return is_ascii_alnum(c) || c == '_'; }

// Start offsets of boundary-aligned (or any, in substring mode) occurrences.
std::vector<size_t> occurrences(std::string_view text_lower, std::string_view kw,
                                MatchMode mode) {
  std::vector<size_t> out;
  if (kw.empty()) return out;
  for (size_t p = text_lower.find(kw); p != std::string_view::npos;
       p = text_lower.find(kw, p + 1)) {
    if (mode == MatchMode::kSubstring || p == 0 || !is_word_char(text_lower[p - 1]))
      out.push_back(p);
  }
  return out;
}

}  // namespace

const std::set<Category>& default_categories() {
  static const std::set<Category> kCategories = {"DIST", "DIT", "PPE", "SYM", "TEST"};
  return kCategories;
}

std::string BilouTag::str() const {
  if (prefix == Prefix::kO) return "O";
  return std::string(1, prefix_char(prefix)) + "-" + category;
}

BilouTag BilouTag::parse(std::string_view text, const std::set<Category>* allowed) {
  if (text == "O") return outside();
  if (text.size() < 3 || text[1] != '-')
    throw ConfigError("malformed tag '" + std::string(text) + "'");
  Prefix p;
  switch (text[0]) {
    case 'B': p = Prefix::kB; break;
    case 'I': p = Prefix::kI; break;
    case 'L': p = Prefix::kL; break;
    case 'U': p = Prefix::kU; break;
    default:
      throw ConfigError("unknown tag prefix in '" + std::string(text) + "'");
  }
  Category cat(text.substr(2));
  if (allowed && !allowed->count(cat))
    throw ConfigError("unknown entity category in '" + std::string(text) + "'");
  return make(p, std::move(cat));
}

std::vector<BilouTag> spans_to_bilou(size_t n_tokens, std::vector<Span> spans) {
  std::sort(spans.begin(), spans.end());
  std::vector<BilouTag> tags(n_tokens);
  for (size_t i = 0; i < spans.size(); ++i) {
    const Span& s = spans[i];
    if (s.start >= s.end || s.end > n_tokens) {
      throw SpanOutOfBoundsError("span [" + std::to_string(s.start) + ", " +
                                 std::to_string(s.end) + ") outside a sentence of " +
                                 std::to_string(n_tokens) + " tokens");
    }
    if (i > 0 && s.start < spans[i - 1].end)
      throw OverlappingSpansError("spans overlap at token " + std::to_string(s.start));
    if (s.category.empty()) throw ConfigError("span without category");
    if (s.end - s.start == 1) {
      tags[s.start] = BilouTag::make(Prefix::kU, s.category);
      continue;
    }
    tags[s.start] = BilouTag::make(Prefix::kB, s.category);
    for (size_t k = s.start + 1; k + 1 < s.end; ++k)
      tags[k] = BilouTag::make(Prefix::kI, s.category);
    tags[s.end - 1] = BilouTag::make(Prefix::kL, s.category);
  }
  return tags;
}

std::vector<BilouTag> spans_to_bilou(const std::vector<std::string>& tokens,
                                     const std::vector<Span>& spans) {
  return spans_to_bilou(tokens.size(), spans);
}

std::vector<Span> bilou_to_spans(const std::vector<BilouTag>& tags, bool repair) {
  struct Open {
    size_t start;
    size_t last;
    Category category;
  };
  std::vector<Span> spans;
  std::optional<Open> open;
  auto close = [&] {
    spans.push_back({open->start, open->last + 1, open->category});
    open.reset();
  };
  auto fail = [&](size_t pos, const char* what) {
    if (!repair) throw InvalidBilouError(pos, what);
  };
  for (size_t i = 0; i < tags.size(); ++i) {
    const BilouTag& t = tags[i];
    const bool continues = open && open->category == t.category;
    switch (t.prefix) {
      case Prefix::kO:
        if (open) {
          fail(i, "O inside an open entity");
          close();
        }
        break;
      case Prefix::kB:
        if (open) {
          fail(i, "B inside an open entity");
          close();
        }
        open = Open{i, i, t.category};
        break;
      case Prefix::kI:
      case Prefix::kL:
        if (continues) {
          open->last = i;
          if (t.prefix == Prefix::kL) close();
          break;
        }
        fail(i, t.prefix == Prefix::kI ? "I without a matching B" : "L without a matching B");
        if (open) close();
        spans.push_back({i, i + 1, t.category});
        break;
      case Prefix::kU:
        if (open) {
          fail(i, "U inside an open entity");
          close();
        }
        spans.push_back({i, i + 1, t.category});
        break;
    }
  }
  if (open) {
    fail(tags.size(), "sequence ends inside an entity");
    close();
  }
  return spans;
}

void validate_bilou(const std::vector<BilouTag>& tags) { bilou_to_spans(tags, false); }

bool is_valid_bilou(const std::vector<BilouTag>& tags) {
  try {
    validate_bilou(tags);
    return true;
  } catch (const InvalidBilouError&) {
    return false;
  }
}

std::vector<AnnotatedSentence> read_annotations(std::istream& in,
                                                const std::set<Category>& allowed) {
  std::vector<AnnotatedSentence> out;
  AnnotatedSentence current;
  std::vector<size_t> token_lines;
  size_t line_no = 0;
  auto finish = [&](size_t end_line) {
    if (current.tokens.empty()) return;
    try {
      validate_bilou(current.tags);
    } catch (const InvalidBilouError& e) {
      size_t pos = e.position();
      throw InvalidBilouError(pos < token_lines.size() ? token_lines[pos] : end_line,
                              e.what());
    }
    out.push_back(std::move(current));
    current = {};
    token_lines.clear();
  };
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      finish(line_no);
      continue;
    }
    auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty())
      throw FormatError(line_no, "expected token<TAB>tag");
    try {
      current.tags.push_back(BilouTag::parse(fields[1], allowed.empty() ? nullptr : &allowed));
    } catch (const ConfigError& e) {
      throw FormatError(line_no, e.what());
    }
    current.tokens.push_back(std::move(fields[0]));
    token_lines.push_back(line_no);
  }
  finish(line_no + 1);
  return out;
}

std::vector<AnnotatedSentence> read_annotations(const std::filesystem::path& path,
                                                const std::set<Category>& allowed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open annotations '" + path.string() + "'");
  return read_annotations(in, allowed);
}

void write_annotations(std::ostream& out, const std::vector<AnnotatedSentence>& sentences) {
  for (const auto& s : sentences) {
    if (s.tokens.size() != s.tags.size())
      throw ConfigError("sentence has mismatched token and tag counts");
    if (s.tokens.empty()) continue;
    for (size_t i = 0; i < s.tokens.size(); ++i) {
      const std::string& tok = s.tokens[i];
      if (tok.empty() || std::any_of(tok.begin(), tok.end(), is_ascii_space))
        throw ConfigError("token '" + tok + "' is empty or contains whitespace");
      out << tok << '\t' << s.tags[i].str() << '\n';
    }
    out << '\n';
  }
}

void write_annotations(const std::filesystem::path& path,
                       const std::vector<AnnotatedSentence>& sentences) {
  std::ostringstream buf;
  write_annotations(buf, sentences);
  write_file(path, buf.str());
}

KeywordSpec KeywordSpec::parse(std::string_view text) {
  KeywordSpec spec;
  for (const auto& line : data_lines(text)) {
    auto f = split(line, '\t');
    if (f.size() != 2) throw ConfigError("keyword line needs CATEGORY<TAB>keyword: " + line);
    std::string kw = collapse_whitespace(to_lower(f[1]));
    std::string cat(trim(f[0]));
    if (cat.empty() || kw.empty()) throw ConfigError("empty keyword entry: " + line);
    spec.entries.push_back({cat, kw});
  }
  return spec;
}

KeywordSpec KeywordSpec::defaults() { return parse(resource("ner_keywords.tsv")); }

void KeywordSpec::validate() const {
  if (cap < 1) throw ConfigError("keyword cap must be at least 1");
  if (entries.empty()) throw ConfigError("keyword spec is empty");
  for (const auto& e : entries)
    if (e.keyword != to_lower(e.keyword)) throw ConfigError("keywords must be lowercase");
}

std::set<Category> KeywordSpec::categories() const {
  std::set<Category> out;
  for (const auto& e : entries) out.insert(e.category);
  return out;
}

bool keyword_matches(std::string_view sentence, std::string_view keyword, MatchMode mode) {
  return !occurrences(to_lower(sentence), to_lower(keyword), mode).empty();
}

std::string join_multiword(std::string_view sentence, const KeywordSpec& spec) {
  std::string out(sentence);
  const std::string lower = to_lower(sentence);
  for (const auto& e : spec.entries) {
    if (e.keyword.find(' ') == std::string::npos) continue;
    for (size_t p : occurrences(lower, e.keyword, MatchMode::kTokenPrefix))
      for (size_t k = p; k < p + e.keyword.size(); ++k)
        if (out[k] == ' ') out[k] = '_';
  }
  return out;
}

size_t train_size(size_t n, double ratio) {
  return static_cast<size_t>(std::floor(ratio * static_cast<double>(n) + 0.5));
}

std::vector<Span> keyword_spans(const std::vector<std::string>& tokens,
                                const KeywordSpec& spec) {
  std::vector<std::string> joined;
  for (const auto& e : spec.entries) {
    std::string kw = e.keyword;
    std::replace(kw.begin(), kw.end(), ' ', '_');
    joined.push_back(std::move(kw));
  }
  std::vector<Span> spans;
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string lower = to_lower(tokens[i]);
    for (size_t k = 0; k < joined.size(); ++k) {
      if (starts_with(lower, joined[k])) {
        spans.push_back({i, i + 1, spec.entries[k].category});
        break;
      }
    }
  }
  return spans;
}

NerDataset build_ner_dataset(const std::vector<std::string>& sentences,
                             const KeywordSpec& spec, const BuildOptions& options) {
  spec.validate();
  if (!(options.split_ratio > 0.0 && options.split_ratio < 1.0))
    throw ConfigError("split ratio must lie in (0, 1)");

  std::vector<std::string> unique;
  {
    std::unordered_set<std::string> seen;
    for (const auto& s : sentences)
      if (seen.insert(s).second) unique.push_back(s);
  }
  std::vector<std::string> lowered;
  lowered.reserve(unique.size());
  for (const auto& s : unique) lowered.push_back(to_lower(s));

  std::vector<std::string> selected;
  std::unordered_set<size_t> taken;
  for (const auto& entry : spec.entries) {
    size_t hits = 0;
    for (size_t i = 0; i < unique.size() && hits < spec.cap; ++i) {
      if (occurrences(lowered[i], entry.keyword, spec.mode).empty()) continue;
      ++hits;
      if (taken.insert(i).second) selected.push_back(unique[i]);
    }
  }
  if (selected.empty()) throw EmptyResultError("no sentence matches any keyword");

  std::vector<AnnotatedSentence> all;
  for (const auto& s : selected) {
    AnnotatedSentence a;
    a.tokens = textprep::tokenize(join_multiword(s, spec));
    if (a.tokens.empty()) continue;
    a.tags = options.pre_annotate ? spans_to_bilou(a.tokens, keyword_spans(a.tokens, spec))
                                  : std::vector<BilouTag>(a.tokens.size());
    all.push_back(std::move(a));
  }

  std::vector<size_t> order(all.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(options.seed);
  rng.shuffle(order);
  const size_t n_train = train_size(all.size(), options.split_ratio);
  NerDataset out;
  for (size_t i = 0; i < order.size(); ++i)
    (i < n_train ? out.train : out.eval).push_back(all[order[i]]);
  return out;
}

uint64_t LabelCounts::total() const {
  uint64_t t = outside;
  for (const auto& [cat, n] : entity) t += n;
  return t;
}

LabelCounts count_labels(const std::vector<AnnotatedSentence>& sentences,
                         const std::set<Category>& categories) {
  LabelCounts counts;
  for (const auto& c : categories) counts.entity[c] = 0;
  for (const auto& s : sentences) {
    for (const auto& t : s.tags) {
      if (t.is_outside()) {
        ++counts.outside;
      } else {
        ++counts.entity[t.category];
      }
    }
  }
  return counts;
}

std::string format_label_table(const LabelCounts& train, const LabelCounts& eval) {
  static const std::vector<Category> kPreferred = {"DIST", "TEST", "SYM", "DIT", "PPE"};
  std::vector<Category> order;
  std::set<Category> all;
  for (const auto& [c, n] : train.entity) all.insert(c);
  for (const auto& [c, n] : eval.entity) all.insert(c);
  for (const auto& c : kPreferred)
    if (all.count(c)) order.push_back(c);
  for (const auto& c : all)
    if (std::find(order.begin(), order.end(), c) == order.end()) order.push_back(c);

  auto get = [](const LabelCounts& lc, const Category& c) -> uint64_t {
    auto it = lc.entity.find(c);
    return it == lc.entity.end() ? 0 : it->second;
  };
  std::string out = "Entity Label\tTraining\tEvaluation\n";
  for (const auto& c : order)
    out += c + "\t" + std::to_string(get(train, c)) + "\t" + std::to_string(get(eval, c)) + "\n";
  out += "O\t" + std::to_string(train.outside) + "\t" + std::to_string(eval.outside) + "\n";
  return out;
}

}  // namespace epiwatch::nerdata
