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

#ifndef EPIWATCH_NERDATA_H_
#define EPIWATCH_NERDATA_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace epiwatch::nerdata {

// Entity category name, e.g. "PPE". The shipped set is DIST, DIT, PPE, SYM,
// TEST; other names are accepted wherever a category set is passed in.
using Category = std::string;

const std::set<Category>& default_categories();

enum class Prefix { kO, kB, kI, kL, kU };

struct BilouTag {
  Prefix prefix = Prefix::kO;
  Category category;  // empty for O

  static BilouTag outside() { return {}; }
  static BilouTag make(Prefix p, Category c) { return {p, std::move(c)}; }

  bool is_outside() const { return prefix == Prefix::kO; }
  std::string str() const;

  // Throws ConfigError on malformed text or a category outside `allowed`
  // (when given).
  static BilouTag parse(std::string_view text, const std::set<Category>* allowed = nullptr);

  auto operator<=>(const BilouTag&) const = default;
};

// Tokens [start, end) form one entity.
struct Span {
  size_t start = 0;
  size_t end = 0;
  Category category;

  auto operator<=>(const Span&) const = default;
};

struct AnnotatedSentence {
  std::vector<std::string> tokens;
  std::vector<BilouTag> tags;

  bool operator==(const AnnotatedSentence&) const = default;
};

// Length-1 spans become U, longer spans B I... L, everything else O.
// Throws SpanOutOfBoundsError / OverlappingSpansError.
std::vector<BilouTag> spans_to_bilou(size_t n_tokens, std::vector<Span> spans);
std::vector<BilouTag> spans_to_bilou(const std::vector<std::string>& tokens,
                                     const std::vector<Span>& spans);

// Strict mode throws InvalidBilouError at the first bad position (the tag
// count when a sequence ends inside an entity). Repair mode, left to right:
//   - an entity left open by O, a different category, B, U or the end is
//     closed at its last same-category token;
//   - I or L with no open entity of that category becomes a unit span.
std::vector<Span> bilou_to_spans(const std::vector<BilouTag>& tags, bool repair = false);

// Throws InvalidBilouError on the first violation.
void validate_bilou(const std::vector<BilouTag>& tags);
bool is_valid_bilou(const std::vector<BilouTag>& tags);

// Annotation files: "token<TAB>tag" per line, a blank line after each
// sentence. Reading validates tags strictly; errors carry file line numbers.
// An empty allowed set accepts any category name.
std::vector<AnnotatedSentence> read_annotations(
    std::istream& in, const std::set<Category>& allowed = default_categories());
std::vector<AnnotatedSentence> read_annotations(
    const std::filesystem::path& path,
    const std::set<Category>& allowed = default_categories());
void write_annotations(std::ostream& out, const std::vector<AnnotatedSentence>& sentences);
void write_annotations(const std::filesystem::path& path,
                       const std::vector<AnnotatedSentence>& sentences);

enum class MatchMode {
  kTokenPrefix,  // keyword must start at a token boundary ("mask" ~ "masks")
  kSubstring,
};

struct KeywordEntry {
  Category category;
  std::string keyword;  // lowercase, may contain spaces
};

struct KeywordSpec {
  std::vector<KeywordEntry> entries;
  size_t cap = 250;
  MatchMode mode = MatchMode::kTokenPrefix;

  // "CATEGORY<TAB>keyword" lines.
  static KeywordSpec parse(std::string_view text);
  static KeywordSpec defaults();
  void validate() const;
  std::set<Category> categories() const;
};

bool keyword_matches(std::string_view sentence, std::string_view keyword, MatchMode mode);

// Rewrites every boundary-aligned occurrence of a multi-word keyword with
// underscores ("social distance" -> "social_distance"), keeping case.
std::string join_multiword(std::string_view sentence, const KeywordSpec& spec);

struct BuildOptions {
  double split_ratio = 0.65;
  uint64_t seed = 0;
  // Tag tokens that start with a keyword as unit entities of its category
  // instead of leaving every tag O.
  bool pre_annotate = false;
};

struct NerDataset {
  std::vector<AnnotatedSentence> train;
  std::vector<AnnotatedSentence> eval;
};

// floor(ratio * n + 0.5)
size_t train_size(size_t n, double ratio);

// Per keyword (in file order) up to spec.cap matching sentences in corpus
// order; union deduplicated; multi-word keywords joined; tokenized; tags O;
// seeded Fisher-Yates shuffle, first train_size() go to train.
NerDataset build_ner_dataset(const std::vector<std::string>& sentences,
                             const KeywordSpec& spec, const BuildOptions& options);

// Unit spans for tokens that start with a (joined) keyword.
std::vector<Span> keyword_spans(const std::vector<std::string>& tokens,
                                const KeywordSpec& spec);

struct LabelCounts {
  std::map<Category, uint64_t> entity;  // B/I/L/U tokens per category
  uint64_t outside = 0;

  uint64_t total() const;
};

LabelCounts count_labels(const std::vector<AnnotatedSentence>& sentences,
                         const std::set<Category>& categories = default_categories());

// Two-column table (training, evaluation) with one row per category and O.
std::string format_label_table(const LabelCounts& train, const LabelCounts& eval);

}  // namespace epiwatch::nerdata

#endif  // EPIWATCH_NERDATA_H_
