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

#ifndef EPIWATCH_TEXTPREP_H_
#define EPIWATCH_TEXTPREP_H_

#include <map>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "epiwatch/document.h"

namespace epiwatch::textprep {

enum class Pos { kNoun, kVerb, kAdj, kAdv, kDet, kPron, kAdp, kConj, kNum, kPunct, kOther };

std::string_view pos_name(Pos pos);
// Throws ConfigError for unknown tag names.
Pos parse_pos(std::string_view name);

struct Token {
  std::string surface;
  std::string lower;
  Pos pos = Pos::kOther;
  std::string lemma;

  static Token from_surface(std::string surface);
  // Replaces the surface and keeps lower/lemma consistent with it.
  void set_surface(std::string s);
};

using StopList = std::unordered_set<std::string>;

// Closed-class lexicon plus the verb stems used by the -s verb rule.
struct PosLexicon {
  std::unordered_map<std::string, Pos> words;
  std::unordered_set<std::string> verb_stems;

  static PosLexicon parse(std::string_view lexicon_text,
                          std::string_view verb_stems_text);
};

struct LemmaRule {
  Pos pos;
  std::string suffix;
  std::string replacement;
  size_t min_stem;
};

struct LemmaRules {
  std::map<std::pair<Pos, std::string>, std::string> exceptions;
  std::vector<LemmaRule> rules;

  static LemmaRules parse(std::string_view exceptions_text,
                          std::string_view rules_text);
  size_t longest_replacement() const;
};

// Everything the stages consult. defaults() uses the compiled-in data files.
struct Resources {
  StopList stoplist;
  std::set<std::string> abbreviations;
  std::regex url_pattern;
  PosLexicon lexicon;
  LemmaRules lemma_rules;

  static const Resources& defaults();
};

StopList parse_stoplist(std::string_view text);

enum class Stage {
  kStripUrls,
  kLowercase,
  kSplitSentences,
  kTokenize,
  kRemoveStopwords,
  kRemoveDigits,
  kPosTag,
  kLemmatize,
  kRemoveNonAscii,
  kRemovePunct,
};

std::string_view stage_name(Stage stage);
Stage parse_stage(std::string_view name);

struct PipelineConfig {
  std::vector<Stage> stages;

  // strip_urls, split_sentences, tokenize, remove_stopwords, remove_digits,
  // pos_tag, lemmatize, remove_non_ascii, lowercase, remove_punct.
  static PipelineConfig lda_default();
  static PipelineConfig parse(std::string_view csv);

  // Throws ConfigError when a token-level stage precedes tokenize, when
  // text-level stages follow it, or when lemmatize is not preceded by pos_tag.
  void validate() const;
  std::string to_string() const;
};

// Removes URLs (scheme://... or www.... up to whitespace) and collapses
// whitespace runs to single spaces.
std::string strip_urls(std::string_view text);
std::string strip_urls(std::string_view text, const std::regex& pattern);

// Splits after '.', '!' or '?' runs that are followed by whitespace, unless
// the word ending there is a known abbreviation.
std::vector<std::string> split_sentences(std::string_view text);
std::vector<std::string> split_sentences(
    std::string_view text, const std::set<std::string>& abbreviations);

// Whitespace split, then leading/trailing ASCII punctuation detached one
// character per token. Inner apostrophes, hyphens and underscores stay.
std::vector<std::string> tokenize(std::string_view sentence);

std::vector<Token> remove_stopwords(std::vector<Token> tokens, const StopList& stoplist);
std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                          const StopList& stoplist);

Pos tag_word(std::string_view word, const PosLexicon& lexicon);
void pos_tag(std::vector<Token>& tokens, const PosLexicon& lexicon);
void pos_tag(std::vector<Token>& tokens);

// One application: exception table, else first matching suffix rule, else
// the word itself. Input is expected lowercase.
std::string lemmatize(std::string_view word, Pos pos, const LemmaRules& rules);
std::string lemmatize(std::string_view word, Pos pos);

// Lowercases, then alternates tagging and lemmatization until the word stops
// changing. Used to merge surface variants of entity names.
std::string root_form(std::string_view word, const Resources& res);

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config,
                    const Resources& resources = Resources::defaults());

  // One pass of the configured stages over the text.
  std::string apply(std::string_view text) const;

  // Repeats apply() until the output is a fixed point, so clean(clean(x)) ==
  // clean(x) even when a lemma turns out to be a stopword.
  std::string clean(std::string_view text) const;

  const PipelineConfig& config() const { return config_; }

 private:
  PipelineConfig config_;
  Resources resources_;
};

// Sets document.cleaned_text from document.raw_text.
void preprocess_document(Document& document, const Pipeline& pipeline);

}  // namespace epiwatch::textprep

#endif  // EPIWATCH_TEXTPREP_H_
