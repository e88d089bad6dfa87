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

#include "epiwatch/sentiment.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include "epiwatch/error.h"
#include "epiwatch/parallel.h"
#include "epiwatch/resources.h"
#include "epiwatch/text_util.h"

namespace epiwatch::sentiment {

Lexicon Lexicon::parse(std::string_view text) {
  Lexicon lex;
  const auto lines = split(text, '\n');
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    double v = 0.0;
    if (fields.size() < 2 || fields[0].empty())
      throw FormatError(i + 1, "expected token<TAB>valence");
    const std::string& num = fields[1];
    auto res = std::from_chars(num.data(), num.data() + num.size(), v);
    if (res.ec != std::errc() || res.ptr != num.data() + num.size() || !std::isfinite(v) ||
        v < -4.0 || v > 4.0)
      throw FormatError(i + 1, "valence must be a number in [-4, 4]");
    lex.valence[to_lower(fields[0])] = v;
  }
  return lex;
}

const Lexicon& Lexicon::defaults() {
  static const Lexicon lex = parse(resource("sentiment_lexicon.tsv"));
  return lex;
}

std::optional<double> Lexicon::find(std::string_view token) const {
  auto it = valence.find(std::string(token));
  if (it == valence.end()) return std::nullopt;
  return it->second;
}

bool Negators::contains(std::string_view token) const {
  return words.count(std::string(token)) > 0 || ends_with(token, "n't");
}

Negators Negators::parse(std::string_view text) {
  Negators n;
  for (const auto& line : data_lines(text)) n.words.insert(to_lower(trim(line)));
  return n;
}

const Negators& Negators::defaults() {
  static const Negators n = parse(resource("negators.txt"));
  return n;
}

std::string_view label_name(Label label) {
  switch (label) {
    case Label::kPos:
      return "pos";
    case Label::kNeg:
      return "neg";
    case Label::kNeu:
      break;
  }
  return "neu";
}

double compound_from_sum(double s) {
  if (s == 0.0) return 0.0;
  // Rewritten to avoid overflowing s*s; for very large |s| the quotient
  // rounds to +-1, so it is pulled back to the nearest double inside.
  const double a = std::abs(s);
  const double c = a > 1e150 ? 1.0 : a / std::sqrt(a * a + kNormalization);
  const double bounded = std::min(c, std::nextafter(1.0, 0.0));
  return s < 0 ? -bounded : bounded;
}

Label label_for(double compound) {
  if (compound >= kThreshold) return Label::kPos;
  if (compound <= -kThreshold) return Label::kNeg;
  return Label::kNeu;
}

SentimentScore score_sentence(const std::vector<std::string>& tokens, const Lexicon& lexicon,
                              const Negators& negators) {
  SentimentScore out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    auto v = lexicon.find(tokens[i]);
    if (!v) continue;
    bool negated = false;
    for (size_t j = i >= kNegationWindow ? i - kNegationWindow : 0; j < i; ++j)
      negated = negated || negators.contains(tokens[j]);
    out.sum += negated ? -*v : *v;
  }
  out.compound = compound_from_sum(out.sum);
  out.label = label_for(out.compound);
  return out;
}

std::string EntitySentimentReport::format_summary() const {
  std::string out = "entity\tmatched\tduplicates\tincomplete\tpositive\tnegative\tneutral\tmean_compound\n";
  out += entity + "\t" + std::to_string(matched) + "\t" + std::to_string(duplicates) + "\t" +
         std::to_string(incomplete) + "\t" + std::to_string(n_pos) + "\t" +
         std::to_string(n_neg) + "\t" + std::to_string(n_neu) + "\t" +
         format_fixed(mean_compound, 4) + "\n";
  return out;
}

std::string EntitySentimentReport::format_sentences() const {
  std::string out = "compound\tlabel\tsentence\n";
  for (const auto& s : sentences)
    out += format_fixed(s.score.compound, 4) + "\t" + std::string(label_name(s.score.label)) +
           "\t" + s.text + "\n";
  return out;
}

EntitySentimentReport analyze_entity_sentences(const std::vector<Document>& docs,
                                               std::string_view entity, const Lexicon& lexicon,
                                               const Negators& negators,
                                               const AnalyzeOptions& options) {
  const textprep::Resources& res =
      options.resources ? *options.resources : textprep::Resources::defaults();
  EntitySentimentReport report;
  report.entity = to_lower(entity);

  std::vector<std::vector<std::string>> per_doc(docs.size());
  parallel_for(docs.size(), options.threads, [&](size_t d) {
    for (const auto& part : docs[d].text_parts())
      for (auto& s : textprep::split_sentences(textprep::strip_urls(part, res.url_pattern),
                                               res.abbreviations))
        if (nerdata::keyword_matches(s, report.entity, options.mode))
          per_doc[d].push_back(std::move(s));
  });

  std::set<std::string> seen;
  for (const auto& sentences : per_doc) {
    for (const auto& s : sentences) {
      ++report.matched;
      if (!seen.insert(s).second) {
        ++report.duplicates;
        continue;
      }
      std::vector<std::string> tokens = textprep::tokenize(s);
      if (tokens.size() < options.min_tokens) {
        ++report.incomplete;
        continue;
      }
      for (auto& t : tokens) t = to_lower(t);
      report.sentences.push_back({s, score_sentence(tokens, lexicon, negators)});
    }
  }

  double total = 0.0;
  for (const auto& s : report.sentences) {
    total += s.score.compound;
    switch (s.score.label) {
      case Label::kPos:
        ++report.n_pos;
        break;
      case Label::kNeg:
        ++report.n_neg;
        break;
      case Label::kNeu:
        ++report.n_neu;
        break;
    }
  }
  if (!report.sentences.empty()) report.mean_compound = total / double(report.sentences.size());
  return report;
}

std::vector<std::pair<std::string, uint64_t>> theme_tally(std::string_view text) {
  std::map<std::string, uint64_t> counts;
  const auto lines = split(text, '\n');
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty())
      throw FormatError(i + 1, "expected sentence_id<TAB>theme");
    if (i == 0 && fields[0] == "sentence_id") continue;
    ++counts[std::string(trim(fields[1]))];
  }
  std::vector<std::pair<std::string, uint64_t>> out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::string format_theme_table(const std::vector<std::pair<std::string, uint64_t>>& tally) {
  std::string out = "Theme\tFrequency\n";
  for (const auto& [theme, n] : tally) out += theme + "\t" + std::to_string(n) + "\n";
  return out;
}

}  // namespace epiwatch::sentiment
