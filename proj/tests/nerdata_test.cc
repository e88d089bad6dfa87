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

#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "epiwatch/error.h"
#include "epiwatch/nerdata.h"
#include "oracles.h"

using namespace epiwatch;
using namespace epiwatch::nerdata;

namespace {

BilouTag T(std::string_view s) { return BilouTag::parse(s); }

std::vector<BilouTag> tags(std::initializer_list<std::string_view> xs) {
  std::vector<BilouTag> out;
  for (auto x : xs) out.push_back(T(x));
  return out;
}

const std::vector<std::string> kCats = {"DIST", "DIT", "PPE", "SYM", "TEST"};

AnnotatedSentence random_sentence(std::mt19937_64& gen) {
  const size_t n = gen() % 21;
  AnnotatedSentence s;
  for (size_t i = 0; i < n; ++i) s.tokens.push_back("t" + std::to_string(gen() % 50));
  s.tags = spans_to_bilou(n, testing::random_spans(gen, n, kCats));
  return s;
}

}  // namespace

TEST_SUITE("nerdata") {
  TEST_CASE("tag text") {
    CHECK(T("O").str() == "O");
    CHECK(T("U-PPE").str() == "U-PPE");
    CHECK(T("B-SYM") == BilouTag::make(Prefix::kB, "SYM"));
    CHECK_THROWS_AS(T("X-PPE"), ConfigError);
    CHECK_THROWS_AS(T("B-"), ConfigError);
    const std::set<Category> allowed = {"PPE"};
    CHECK_THROWS_AS(BilouTag::parse("U-SYM", &allowed), ConfigError);
  }

  TEST_CASE("spans to tags") {
    const std::vector<std::string> tokens = {"wear", "a", "face", "mask"};
    CHECK(spans_to_bilou(tokens, {{2, 4, "PPE"}}) == tags({"O", "O", "B-PPE", "L-PPE"}));
    CHECK(spans_to_bilou(3, {{0, 1, "TEST"}}) == tags({"U-TEST", "O", "O"}));
    CHECK(spans_to_bilou(3, {{0, 3, "SYM"}}) == tags({"B-SYM", "I-SYM", "L-SYM"}));
    CHECK_THROWS_AS(spans_to_bilou(3, {{0, 2, "SYM"}, {1, 3, "PPE"}}), OverlappingSpansError);
    CHECK_THROWS_AS(spans_to_bilou(3, {{2, 4, "SYM"}}), SpanOutOfBoundsError);
    CHECK_THROWS_AS(spans_to_bilou(3, {{2, 2, "SYM"}}), SpanOutOfBoundsError);
  }

  TEST_CASE("tags to spans") {
    CHECK(bilou_to_spans(tags({"O", "O", "B-PPE", "L-PPE", "O"})) ==
          std::vector<Span>{{2, 4, "PPE"}});
    CHECK(bilou_to_spans(tags({"O", "O", "O"})).empty());
    CHECK(bilou_to_spans({}).empty());
    try {
      bilou_to_spans(tags({"I-PPE"}));
      FAIL("expected InvalidBilouError");
    } catch (const InvalidBilouError& e) {
      CHECK(e.position() == 0);
    }
    CHECK(bilou_to_spans(tags({"I-PPE"}), true) == std::vector<Span>{{0, 1, "PPE"}});
  }

  TEST_CASE("repair rules") {
    // Open entity closed by O keeps what it has.
    CHECK(bilou_to_spans(tags({"B-PPE", "I-PPE", "O"}), true) ==
          std::vector<Span>{{0, 2, "PPE"}});
    // Dangling B at the end becomes a unit span.
    CHECK(bilou_to_spans(tags({"O", "B-SYM"}), true) == std::vector<Span>{{1, 2, "SYM"}});
    // Category switch closes the first entity, the orphan L stands alone.
    CHECK(bilou_to_spans(tags({"B-PPE", "L-SYM"}), true) ==
          std::vector<Span>{{0, 1, "PPE"}, {1, 2, "SYM"}});
    // A new B closes the open entity.
    CHECK(bilou_to_spans(tags({"B-PPE", "B-PPE", "L-PPE"}), true) ==
          std::vector<Span>{{0, 1, "PPE"}, {1, 3, "PPE"}});
    CHECK_THROWS_AS(bilou_to_spans(tags({"B-PPE", "O"})), InvalidBilouError);
    try {
      validate_bilou(tags({"O", "B-PPE", "I-PPE"}));
      FAIL("expected InvalidBilouError");
    } catch (const InvalidBilouError& e) {
      CHECK(e.position() == 3);
    }
  }

  TEST_CASE("repair always yields valid non-overlapping spans") {
    std::mt19937_64 gen(5);
    const std::vector<Prefix> prefixes = {Prefix::kO, Prefix::kB, Prefix::kI, Prefix::kL,
                                          Prefix::kU};
    for (int i = 0; i < 2000; ++i) {
      std::vector<BilouTag> seq;
      const size_t n = gen() % 12;
      for (size_t j = 0; j < n; ++j) {
        const Prefix p = prefixes[gen() % prefixes.size()];
        seq.push_back(p == Prefix::kO ? BilouTag::outside()
                                      : BilouTag::make(p, kCats[gen() % 2]));
      }
      const auto spans = bilou_to_spans(seq, true);
      const auto rebuilt = spans_to_bilou(n, spans);
      CHECK(is_valid_bilou(rebuilt));
      if (is_valid_bilou(seq)) CHECK(spans == bilou_to_spans(seq));
    }
  }

  TEST_CASE("spans and tags are mutual inverses") {
    std::mt19937_64 gen(17);
    for (int i = 0; i < 10000; ++i) {
      const size_t n = gen() % 21;
      const auto spans = testing::random_spans(gen, n, kCats);
      const auto seq = spans_to_bilou(n, spans);
      REQUIRE(is_valid_bilou(seq));
      REQUIRE(bilou_to_spans(seq) == spans);
      REQUIRE(spans_to_bilou(n, bilou_to_spans(seq)) == seq);
    }
  }

  TEST_CASE("annotation format") {
    std::istringstream in("wear\tO\nmask\tU-PPE\n\n");
    const auto s = read_annotations(in);
    REQUIRE(s.size() == 1);
    CHECK(s[0].tokens == std::vector<std::string>{"wear", "mask"});
    CHECK(s[0].tags == tags({"O", "U-PPE"}));

    std::istringstream bad_prefix("wear\tO\nmask\tX-PPE\n\n");
    try {
      read_annotations(bad_prefix);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.line_no() == 2);
    }
    std::istringstream bad_seq("a\tO\nb\tI-PPE\n\n");
    CHECK_THROWS_AS(read_annotations(bad_seq), InvalidBilouError);
    std::istringstream no_tab("mask U-PPE\n\n");
    CHECK_THROWS_AS(read_annotations(no_tab), FormatError);
    std::istringstream odd("a\tU-FOO\n\n");
    CHECK_THROWS_AS(read_annotations(odd), FormatError);
    std::istringstream any("a\tU-FOO\n\n");
    CHECK(read_annotations(any, {}).at(0).tags == tags({"U-FOO"}));
  }

  TEST_CASE("annotation files round-trip") {
    std::mt19937_64 gen(99);
    std::vector<AnnotatedSentence> sentences;
    for (int i = 0; i < 100; ++i) {
      auto s = random_sentence(gen);
      if (!s.tokens.empty()) sentences.push_back(s);
    }
    const auto path = std::filesystem::temp_directory_path() / "epiwatch_nerdata_rt.bilou";
    write_annotations(path, sentences);
    CHECK(read_annotations(path) == sentences);
    std::filesystem::remove(path);
  }

  TEST_CASE("keyword matching") {
    CHECK(keyword_matches("Wear your Masks please", "mask", MatchMode::kTokenPrefix));
    CHECK_FALSE(keyword_matches("unmasked people", "mask", MatchMode::kTokenPrefix));
    CHECK(keyword_matches("unmasked people", "mask", MatchMode::kSubstring));
    CHECK(keyword_matches("we practice Social Distance daily", "social distance",
                          MatchMode::kTokenPrefix));
  }

  TEST_CASE("multi-word keywords are joined") {
    const KeywordSpec spec = KeywordSpec::parse("DIST\tsocial distance\nPPE\tmask\n");
    CHECK(join_multiword("practice social distance daily", spec) ==
          "practice social_distance daily");
    CHECK(join_multiword("Social Distance", spec) == "Social_Distance");
    const auto ds = build_ner_dataset({"practice social distance daily"}, spec, {0.5, 1, false});
    const auto& s = ds.train.empty() ? ds.eval.at(0) : ds.train.at(0);
    CHECK(s.tokens == std::vector<std::string>{"practice", "social_distance", "daily"});
    for (const auto& t : s.tags) CHECK(t.is_outside());
  }

  TEST_CASE("keyword cap") {
    std::vector<std::string> sentences;
    for (int i = 0; i < 600; ++i) sentences.push_back("mask number " + std::to_string(i));
    KeywordSpec spec = KeywordSpec::parse("PPE\tmask\n");
    const auto ds = build_ner_dataset(sentences, spec, {0.65, 3, false});
    CHECK(ds.train.size() + ds.eval.size() == 250);
    CHECK(ds.train.size() == train_size(250, 0.65));
  }

  TEST_CASE("duplicates across keywords appear once") {
    const KeywordSpec spec = KeywordSpec::parse("PPE\tmask\nTEST\ttesting\n");
    const auto ds = build_ner_dataset(
        {"mask and testing today", "mask and testing today", "nothing here"}, spec,
        {0.5, 0, false});
    CHECK(ds.train.size() + ds.eval.size() == 1);
    CHECK_THROWS_AS(build_ner_dataset({"nothing here"}, spec, {0.5, 0, false}),
                    EmptyResultError);
  }

  TEST_CASE("dataset split properties") {
    std::vector<std::string> sentences;
    std::mt19937_64 gen(3);
    const std::vector<std::string> words = {"mask", "fever", "cough", "swab", "the", "a"};
    for (int i = 0; i < 300; ++i) {
      std::string s;
      for (int j = 0; j < 5; ++j) s += words[gen() % words.size()] + " ";
      sentences.push_back(s + std::to_string(i));
    }
    const KeywordSpec spec = KeywordSpec::parse("PPE\tmask\nSYM\tfever\nSYM\tcough\n");
    const auto a = build_ner_dataset(sentences, spec, {0.65, 42, false});
    const auto b = build_ner_dataset(sentences, spec, {0.65, 42, false});
    CHECK(a.train == b.train);
    CHECK(a.eval == b.eval);

    std::set<std::vector<std::string>> train, eval, expected;
    for (const auto& s : a.train) train.insert(s.tokens);
    for (const auto& s : a.eval) eval.insert(s.tokens);
    for (const auto& s : sentences)
      if (keyword_matches(s, "mask", MatchMode::kTokenPrefix) ||
          keyword_matches(s, "fever", MatchMode::kTokenPrefix) ||
          keyword_matches(s, "cough", MatchMode::kTokenPrefix)) {
        std::vector<std::string> toks;
        std::istringstream ss(s);
        for (std::string w; ss >> w;) toks.push_back(w);
        expected.insert(toks);
      }
    std::set<std::vector<std::string>> both;
    for (const auto& t : train) CHECK(eval.count(t) == 0);
    both.insert(train.begin(), train.end());
    both.insert(eval.begin(), eval.end());
    CHECK(both == expected);
    CHECK(a.train.size() == train_size(expected.size(), 0.65));
  }

  TEST_CASE("split rounding") {
    CHECK(train_size(10, 0.65) == 7);  // 6.5 rounds up
    CHECK(train_size(100, 0.65) == 65);
    CHECK(train_size(1, 0.5) == 1);
    CHECK(train_size(3, 0.5) == 2);
    CHECK(train_size(0, 0.65) == 0);
  }

  TEST_CASE("pre-annotation marks keyword tokens") {
    const KeywordSpec spec = KeywordSpec::parse("PPE\tmask\nSYM\tfever\n");
    const auto spans = keyword_spans({"Masks", "and", "fever"}, spec);
    CHECK(spans == std::vector<Span>{{0, 1, "PPE"}, {2, 3, "SYM"}});
  }

  TEST_CASE("label counts") {
    const std::vector<AnnotatedSentence> s = {{{"a", "b", "c"}, tags({"O", "B-PPE", "L-PPE"})}};
    const auto c = count_labels(s);
    CHECK(c.entity.at("PPE") == 2);
    CHECK(c.outside == 1);
    CHECK(c.entity.at("SYM") == 0);
    const auto empty = count_labels({});
    CHECK(empty.total() == 0);
    for (const auto& [cat, n] : empty.entity) CHECK(n == 0);

    std::mt19937_64 gen(8);
    std::vector<AnnotatedSentence> many;
    uint64_t tokens = 0;
    for (int i = 0; i < 200; ++i) {
      many.push_back(random_sentence(gen));
      tokens += many.back().tokens.size();
    }
    CHECK(count_labels(many).total() == tokens);
    CHECK(format_label_table(c, empty).find("PPE") != std::string::npos);
  }
}
