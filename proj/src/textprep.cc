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

#include "epiwatch/textprep.h"

#include <algorithm>
#include <charconv>

#include "epiwatch/error.h"
#include "epiwatch/resources.h"
#include "epiwatch/text_util.h"

namespace epiwatch::textprep {

namespace {

constexpr std::pair<Pos, std::string_view> kPosNames[] = {
    {Pos::kNoun, "NOUN"}, {Pos::kVerb, "VERB"}, {Pos::kAdj, "ADJ"},
    {Pos::kAdv, "ADV"},   {Pos::kDet, "DET"},   {Pos::kPron, "PRON"},
    {Pos::kAdp, "ADP"},   {Pos::kConj, "CONJ"}, {Pos::kNum, "NUM"},
    {Pos::kPunct, "PUNCT"}, {Pos::kOther, "OTHER"},
};

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::kStripUrls, "strip_urls"},
    {Stage::kLowercase, "lowercase"},
    {Stage::kSplitSentences, "split_sentences"},
    {Stage::kTokenize, "tokenize"},
    {Stage::kRemoveStopwords, "remove_stopwords"},
    {Stage::kRemoveDigits, "remove_digits"},
    {Stage::kPosTag, "pos_tag"},
    {Stage::kLemmatize, "lemmatize"},
    {Stage::kRemoveNonAscii, "remove_non_ascii"},
    {Stage::kRemovePunct, "remove_punct"},
};

bool is_text_only(Stage s) {
  return s == Stage::kStripUrls || s == Stage::kSplitSentences;
}

bool is_token_only(Stage s) {
  return s == Stage::kRemoveStopwords || s == Stage::kPosTag ||
         s == Stage::kLemmatize;
}

bool all_punct(std::string_view w) {
  return !w.empty() && std::all_of(w.begin(), w.end(), is_ascii_punct);
}

bool looks_numeric(std::string_view w) {
  bool digit = false;
  for (char c : w) {
    if (is_ascii_digit(c)) {
      digit = true;
    } else if (c != ',' && c != '.' && c != ':' && c != '/' && c != '-' &&
               c != '%') {
      return false;
    }
  }
  return digit;
}

bool has_alnum(std::string_view w) {
  return std::any_of(w.begin(), w.end(), is_ascii_alnum);
}

std::string erase_if_chars(std::string_view s, bool (*pred)(char)) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!pred(c)) out.push_back(c);
  return out;
}

bool is_non_ascii(char c) { return static_cast<unsigned char>(c) >= 0x80; }
bool is_removable_punct(char c) { return c != '_' && is_ascii_punct(c); }

// Repeats one lemmatization with a fixed tag until nothing changes.
std::string lemma_fixpoint(std::string word, Pos pos, const LemmaRules& rules) {
  for (int i = 0; i < 16; ++i) {
    std::string next = lemmatize(word, pos, rules);
    if (next == word) break;
    word = std::move(next);
  }
  return word;
}

std::string field_or_empty(const std::string& f) { return f == "-" ? "" : f; }

}  // namespace

std::string_view pos_name(Pos pos) {
  for (const auto& [p, name] : kPosNames)
    if (p == pos) return name;
  return "OTHER";
}

Pos parse_pos(std::string_view name) {
  for (const auto& [p, n] : kPosNames)
    if (n == name) return p;
  throw ConfigError("unknown POS tag '" + std::string(name) + "'");
}

Token Token::from_surface(std::string surface) {
  Token t;
  t.set_surface(std::move(surface));
  return t;
}

void Token::set_surface(std::string s) {
  surface = std::move(s);
  lower = to_lower(surface);
  lemma = surface;
}

PosLexicon PosLexicon::parse(std::string_view lexicon_text,
                             std::string_view verb_stems_text) {
  PosLexicon lex;
  for (const auto& line : data_lines(lexicon_text)) {
    auto fields = split(line, '\t');
    if (fields.size() != 2)
      throw ConfigError("POS lexicon line needs word<TAB>TAG: " + line);
    lex.words[to_lower(trim(fields[0]))] = parse_pos(trim(fields[1]));
  }
  for (const auto& line : data_lines(verb_stems_text))
    lex.verb_stems.insert(to_lower(trim(line)));
  return lex;
}

LemmaRules LemmaRules::parse(std::string_view exceptions_text,
                             std::string_view rules_text) {
  LemmaRules out;
  for (const auto& line : data_lines(exceptions_text)) {
    auto f = split(line, '\t');
    if (f.size() != 3 || f[1].empty() || f[2].empty())
      throw ConfigError("lemma exception needs POS<TAB>surface<TAB>lemma: " + line);
    out.exceptions[{parse_pos(f[0]), f[1]}] = f[2];
  }
  for (const auto& line : data_lines(rules_text)) {
    auto f = split(line, '\t');
    size_t min_stem = 0;
    if (f.size() != 4 ||
        std::from_chars(f[3].data(), f[3].data() + f[3].size(), min_stem).ec !=
            std::errc() ||
        f[1].empty() || min_stem < 1) {
      throw ConfigError(
          "lemma rule needs POS<TAB>suffix<TAB>replacement<TAB>min-stem>=1: " + line);
    }
    out.rules.push_back(
        {parse_pos(f[0]), f[1], field_or_empty(f[2]), min_stem});
  }
  return out;
}

size_t LemmaRules::longest_replacement() const {
  size_t n = 0;
  for (const auto& r : rules) n = std::max(n, r.replacement.size());
  return n;
}

StopList parse_stoplist(std::string_view text) {
  StopList out;
  for (const auto& line : data_lines(text)) out.insert(to_lower(trim(line)));
  return out;
}

const Resources& Resources::defaults() {
  static const Resources kDefaults = [] {
    Resources r;
    r.stoplist = parse_stoplist(resource("stopwords.txt"));
    for (const auto& line : data_lines(resource("abbreviations.txt")))
      r.abbreviations.insert(to_lower(trim(line)));
    auto url = data_lines(resource("url_pattern.txt"));
    if (url.empty()) throw ConfigError("empty URL pattern resource");
    r.url_pattern = std::regex(std::string(trim(url.front())),
                               std::regex::ECMAScript | std::regex::optimize);
    r.lexicon = PosLexicon::parse(resource("pos_lexicon.txt"),
                                  resource("known_verbs.txt"));
    r.lemma_rules = LemmaRules::parse(resource("lemma_exceptions.txt"),
                                      resource("lemma_rules.txt"));
    return r;
  }();
  return kDefaults;
}

std::string_view stage_name(Stage stage) {
  for (const auto& [s, name] : kStageNames)
    if (s == stage) return name;
  return "?";
}

Stage parse_stage(std::string_view name) {
  for (const auto& [s, n] : kStageNames)
    if (n == name) return s;
  throw ConfigError("unknown preprocessing stage '" + std::string(name) + "'");
}

PipelineConfig PipelineConfig::lda_default() {
  return {{Stage::kStripUrls, Stage::kSplitSentences, Stage::kTokenize,
           Stage::kRemoveStopwords, Stage::kRemoveDigits, Stage::kPosTag,
           Stage::kLemmatize, Stage::kRemoveNonAscii, Stage::kLowercase,
           Stage::kRemovePunct}};
}

PipelineConfig PipelineConfig::parse(std::string_view csv) {
  PipelineConfig config;
  for (const auto& item : split_csv(csv))
    config.stages.push_back(parse_stage(item));
  config.validate();
  return config;
}

void PipelineConfig::validate() const {
  bool tokenized = false;
  bool tagged = false;
  for (Stage s : stages) {
    if (s == Stage::kTokenize) {
      if (tokenized) throw ConfigError("tokenize listed twice");
      tokenized = true;
    } else if (is_text_only(s) && tokenized) {
      throw ConfigError(std::string(stage_name(s)) + " must precede tokenize");
    } else if (is_token_only(s) && !tokenized) {
      throw ConfigError(std::string(stage_name(s)) + " requires tokenize first");
    }
    if (s == Stage::kPosTag) tagged = true;
    if (s == Stage::kLemmatize && !tagged)
      throw ConfigError("lemmatize requires pos_tag first");
  }
}

std::string PipelineConfig::to_string() const {
  std::vector<std::string> names;
  for (Stage s : stages) names.emplace_back(stage_name(s));
  return join(names, ",");
}

std::string strip_urls(std::string_view text) {
  return strip_urls(text, Resources::defaults().url_pattern);
}

std::string strip_urls(std::string_view text, const std::regex& pattern) {
  std::string s(text);
  return collapse_whitespace(std::regex_replace(s, pattern, ""));
}

std::vector<std::string> split_sentences(std::string_view text) {
  return split_sentences(text, Resources::defaults().abbreviations);
}

std::vector<std::string> split_sentences(
    std::string_view text, const std::set<std::string>& abbreviations) {
  std::vector<std::string> out;
  auto emit = [&](size_t b, size_t e) {
    std::string s = collapse_whitespace(text.substr(b, e - b));
    if (!s.empty()) out.push_back(std::move(s));
  };
  auto is_terminator = [](char c) { return c == '.' || c == '!' || c == '?'; };
  size_t start = 0;
  size_t i = 0;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < text.size() && is_terminator(text[j])) ++j;
    if (j == text.size() || is_ascii_space(text[j])) {
      bool abbreviation = false;
      if (j == i + 1 && text[i] == '.') {
        size_t w = i;
        while (w > start && !is_ascii_space(text[w - 1])) --w;
        while (w < i && !is_ascii_alnum(text[w])) ++w;
        abbreviation = abbreviations.count(to_lower(text.substr(w, j - w))) > 0;
      }
      if (!abbreviation) {
        emit(start, j);
        start = j;
      }
    }
    i = j;
  }
  emit(start, text.size());
  return out;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> out;
  for (const auto& chunk : split_whitespace(sentence)) {
    size_t b = 0, e = chunk.size();
    while (b < e && is_ascii_punct(chunk[b])) out.emplace_back(1, chunk[b++]);
    size_t trailing = e;
    while (trailing > b && is_ascii_punct(chunk[trailing - 1])) --trailing;
    if (trailing > b) out.push_back(chunk.substr(b, trailing - b));
    for (size_t k = trailing; k < e; ++k) out.emplace_back(1, chunk[k]);
  }
  return out;
}

std::vector<Token> remove_stopwords(std::vector<Token> tokens,
                                    const StopList& stoplist) {
  std::erase_if(tokens, [&](const Token& t) { return stoplist.count(t.lower) > 0; });
  return tokens;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens,
                                          const StopList& stoplist) {
  std::erase_if(tokens, [&](const std::string& t) {
    return stoplist.count(to_lower(t)) > 0;
  });
  return tokens;
}

Pos tag_word(std::string_view word, const PosLexicon& lexicon) {
  const std::string w = to_lower(word);
  if (auto it = lexicon.words.find(w); it != lexicon.words.end()) return it->second;
  if (all_punct(w)) return Pos::kPunct;
  if (looks_numeric(w)) return Pos::kNum;
  if (!has_alnum(w)) return Pos::kOther;
  auto stem_len = [&](size_t suffix) { return w.size() - suffix; };
  if (ends_with(w, "ing") && stem_len(3) >= 3) return Pos::kVerb;
  if (ends_with(w, "ed") && stem_len(2) >= 3) return Pos::kVerb;
  if (ends_with(w, "ly") && stem_len(2) >= 3) return Pos::kAdv;
  if ((ends_with(w, "ous") || ends_with(w, "ful") || ends_with(w, "ive")) &&
      stem_len(3) >= 2) {
    return Pos::kAdj;
  }
  if (ends_with(w, "s") && w.size() > 1) {
    if (lexicon.verb_stems.count(w.substr(0, w.size() - 1))) return Pos::kVerb;
    if (ends_with(w, "es") && lexicon.verb_stems.count(w.substr(0, w.size() - 2)))
      return Pos::kVerb;
  }
  return Pos::kNoun;
}

void pos_tag(std::vector<Token>& tokens, const PosLexicon& lexicon) {
  for (auto& t : tokens) t.pos = tag_word(t.lower, lexicon);
}

void pos_tag(std::vector<Token>& tokens) {
  pos_tag(tokens, Resources::defaults().lexicon);
}

std::string lemmatize(std::string_view word, Pos pos, const LemmaRules& rules) {
  std::string w(word);
  if (auto it = rules.exceptions.find({pos, w}); it != rules.exceptions.end())
    return it->second;
  for (const auto& rule : rules.rules) {
    if (rule.pos != pos || !ends_with(w, rule.suffix)) continue;
    if (w.size() - rule.suffix.size() < rule.min_stem) continue;
    return w.substr(0, w.size() - rule.suffix.size()) + rule.replacement;
  }
  return w;
}

std::string lemmatize(std::string_view word, Pos pos) {
  return lemmatize(word, pos, Resources::defaults().lemma_rules);
}

std::string root_form(std::string_view word, const Resources& res) {
  std::string cur = to_lower(word);
  for (int i = 0; i < 16; ++i) {
    std::string next = lemmatize(cur, tag_word(cur, res.lexicon), res.lemma_rules);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

Pipeline::Pipeline(PipelineConfig config, const Resources& resources)
    : config_(std::move(config)), resources_(resources) {
  config_.validate();
}

std::string Pipeline::apply(std::string_view text) const {
  std::vector<std::string> segments;
  for (const auto& line : split(text, '\n')) {
    std::string s = collapse_whitespace(line);
    if (!s.empty()) segments.push_back(std::move(s));
  }
  std::vector<std::vector<Token>> sentences;
  bool tokenized = false;

  auto map_chars = [&](auto&& edit) {
    if (!tokenized) {
      std::vector<std::string> next;
      for (auto& seg : segments) {
        std::string s = collapse_whitespace(edit(seg));
        if (!s.empty()) next.push_back(std::move(s));
      }
      segments = std::move(next);
      return;
    }
    for (auto& sentence : sentences) {
      std::vector<Token> kept;
      for (auto& t : sentence) {
        std::string s = edit(t.surface);
        if (s.empty()) continue;
        if (s != t.surface) {
          Pos pos = t.pos;
          t.set_surface(std::move(s));
          t.pos = pos;
        }
        kept.push_back(std::move(t));
      }
      sentence = std::move(kept);
    }
  };

  for (Stage stage : config_.stages) {
    switch (stage) {
      case Stage::kStripUrls:
        map_chars([&](const std::string& s) {
          return strip_urls(s, resources_.url_pattern);
        });
        break;
      case Stage::kSplitSentences: {
        std::vector<std::string> next;
        for (const auto& seg : segments)
          for (auto& s : split_sentences(seg, resources_.abbreviations))
            next.push_back(std::move(s));
        segments = std::move(next);
        break;
      }
      case Stage::kTokenize:
        for (const auto& seg : segments) {
          std::vector<Token> sentence;
          for (auto& surface : tokenize(seg))
            sentence.push_back(Token::from_surface(std::move(surface)));
          if (!sentence.empty()) sentences.push_back(std::move(sentence));
        }
        segments.clear();
        tokenized = true;
        break;
      case Stage::kLowercase:
        map_chars([](const std::string& s) { return to_lower(s); });
        break;
      case Stage::kRemoveDigits:
        map_chars([](const std::string& s) { return erase_if_chars(s, is_ascii_digit); });
        break;
      case Stage::kRemoveNonAscii:
        map_chars([](const std::string& s) { return erase_if_chars(s, is_non_ascii); });
        break;
      case Stage::kRemovePunct:
        map_chars([](const std::string& s) {
          return erase_if_chars(s, is_removable_punct);
        });
        break;
      case Stage::kRemoveStopwords:
        for (auto& sentence : sentences)
          sentence = remove_stopwords(std::move(sentence), resources_.stoplist);
        break;
      case Stage::kPosTag:
        for (auto& sentence : sentences) pos_tag(sentence, resources_.lexicon);
        break;
      case Stage::kLemmatize:
        for (auto& sentence : sentences) {
          for (auto& t : sentence) {
            Pos pos = t.pos;
            std::string lemma = lemma_fixpoint(t.lower, pos, resources_.lemma_rules);
            t.set_surface(lemma);
            t.pos = pos;
          }
        }
        break;
    }
  }

  if (!tokenized) return collapse_whitespace(join(segments, " "));
  std::vector<std::string> words;
  for (const auto& sentence : sentences)
    for (const auto& t : sentence) words.push_back(t.surface);
  return join(words, " ");
}

std::string Pipeline::clean(std::string_view text) const {
  std::string cur = apply(text);
  for (int pass = 0; pass < 16; ++pass) {
    std::string next = apply(cur);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

void preprocess_document(Document& document, const Pipeline& pipeline) {
  document.cleaned_text = pipeline.clean(document.raw_text);
}

}  // namespace epiwatch::textprep
