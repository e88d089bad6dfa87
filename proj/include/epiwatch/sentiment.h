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

#ifndef EPIWATCH_SENTIMENT_H_
#define EPIWATCH_SENTIMENT_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "epiwatch/document.h"
#include "epiwatch/nerdata.h"
#include "epiwatch/textprep.h"

namespace epiwatch::sentiment {

inline constexpr double kNormalization = 15.0;
inline constexpr double kThreshold = 0.05;
inline constexpr size_t kNegationWindow = 3;

struct Lexicon {
  std::unordered_map<std::string, double> valence;

  // "token<TAB>valence" lines; '#' comments allowed. Valences must be finite
  // and within [-4, 4]. Throws FormatError.
  static Lexicon parse(std::string_view text);
  static const Lexicon& defaults();

  std::optional<double> find(std::string_view token) const;
};

struct Negators {
  std::set<std::string> words;

  // Listed words, plus any token ending in "n't".
  bool contains(std::string_view token) const;

  static Negators parse(std::string_view text);
  static const Negators& defaults();
};

enum class Label { kPos, kNeg, kNeu };
std::string_view label_name(Label label);

// s / sqrt(s^2 + 15), kept strictly inside (-1, 1).
double compound_from_sum(double s);
Label label_for(double compound);

struct SentimentScore {
  double sum = 0.0;
  double compound = 0.0;
  Label label = Label::kNeu;
};

// Tokens are expected lowercase. A token's valence flips sign when a negator
// occurs among the three tokens before it.
SentimentScore score_sentence(const std::vector<std::string>& tokens, const Lexicon& lexicon,
                              const Negators& negators = Negators::defaults());

struct ScoredSentence {
  std::string text;
  SentimentScore score;
};

struct EntitySentimentReport {
  std::string entity;
  uint64_t n_pos = 0;
  uint64_t n_neg = 0;
  uint64_t n_neu = 0;
  double mean_compound = 0.0;
  uint64_t matched = 0;     // sentences mentioning the entity
  uint64_t duplicates = 0;  // dropped as exact repeats
  uint64_t incomplete = 0;  // dropped as too short
  std::vector<ScoredSentence> sentences;

  std::string format_summary() const;
  std::string format_sentences() const;
};

struct AnalyzeOptions {
  size_t min_tokens = 3;  // shorter sentences count as incomplete
  nerdata::MatchMode mode = nerdata::MatchMode::kTokenPrefix;
  const textprep::Resources* resources = nullptr;  // defaults when null
  int threads = 1;
};

// Every sentence mentioning the entity, deduplicated, with incomplete
// sentences removed, scored and tallied.
EntitySentimentReport analyze_entity_sentences(const std::vector<Document>& docs,
                                               std::string_view entity, const Lexicon& lexicon,
                                               const Negators& negators,
                                               const AnalyzeOptions& options = {});

// Theme frequencies from "sentence_id<TAB>theme" lines, most frequent first
// (ties alphabetical). Throws FormatError.
std::vector<std::pair<std::string, uint64_t>> theme_tally(std::string_view text);
std::string format_theme_table(const std::vector<std::pair<std::string, uint64_t>>& tally);

}  // namespace epiwatch::sentiment

#endif  // EPIWATCH_SENTIMENT_H_
