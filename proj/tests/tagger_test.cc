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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "epiwatch/error.h"
#include "epiwatch/tagger.h"
#include "epiwatch/text_util.h"
#include "oracles.h"

using namespace epiwatch;
using namespace epiwatch::tagger;
using nerdata::Prefix;

namespace {

bool has(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

TrainConfig toy_config() {
  TrainConfig c;
  c.iterations = 10;
  c.batch_min = 1;
  c.batch_max = 1;
  c.dropout_start = c.dropout_end = 0.0;
  c.seed = 1;
  return c;
}

TaggerModel toy_model() {
  return train_tagger({{{"mask"}, {BilouTag::make(Prefix::kU, "PPE")}}}, toy_config());
}

TaggerModel planted_model(size_t n, uint64_t seed) {
  auto data = testing::planted_tagging(n, seed);
  TrainConfig c = TrainConfig::model1();
  c.iterations = 5;
  c.seed = seed;
  return train_tagger(data.sentences, c);
}

Document doc(std::string id, std::string sub, std::string text) {
  Document d;
  d.post_id = std::move(id);
  d.subreddit = std::move(sub);
  d.created_utc = 1585000000;
  d.raw_text = text;
  d.title = std::move(text);
  return d;
}

}  // namespace

TEST_SUITE("tagger") {
  TEST_CASE("feature templates") {
    const auto f = extract_features({"Mask"}, 0, "O");
    for (const char* x : {"w=mask", "shape=Xxxx", "suf3=ask", "prev=<s>", "ptag=O", "bias",
                          "next=</s>", "pre1=m"})
      CHECK(has(f, x));
    const auto g = extract_features({"wear", "N95", "masks"}, 2, "U-PPE");
    CHECK(has(g, "next=</s>"));
    CHECK(has(g, "prev=n95"));
    CHECK(has(g, "ptag=U-PPE"));
    CHECK(extract_features({"wear", "N95"}, 1, "O") == extract_features({"wear", "N95"}, 1, "O"));
    CHECK(word_shape("COVID-19") == "XXXXX-dd");
  }

  TEST_CASE("training presets") {
    const auto m3 = TrainConfig::model3();
    CHECK(m3.iterations == 100);
    CHECK_NOTHROW(m3.validate());
    for (int i = 0; i < 100; ++i) CHECK(m3.dropout_at(i) == doctest::Approx(0.6 - 0.25 * i / 99.0).epsilon(1e-12));
    CHECK(m3.dropout_at(0) == 0.6);
    CHECK(m3.dropout_at(99) == doctest::Approx(0.35).epsilon(1e-15));
    CHECK(TrainConfig::model1().dropout_at(7) == 0.5);
    CHECK(TrainConfig::model2().batch_min == 1);
    CHECK(TrainConfig::model2().batch_max == 16);
    TrainConfig bad;
    bad.batch_min = 8;
    bad.batch_max = 4;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = TrainConfig{};
    bad.dropout_start = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("batch schedule compounds and clips") {
    TrainConfig c;
    c.batch_min = 4;
    c.batch_max = 32;
    c.batch_growth = 1.5;
    BatchSchedule s(c);
    std::vector<size_t> got;
    for (int i = 0; i < 8; ++i) got.push_back(s.next());
    // 4, 6, 9, 13.5, 20.25, 30.375, then clipped.
    CHECK(got == std::vector<size_t>{4, 6, 9, 13, 20, 30, 32, 32});
  }

  TEST_CASE("transition constraints") {
    const auto O = BilouTag::outside();
    const auto B = BilouTag::make(Prefix::kB, "PPE");
    const auto I = BilouTag::make(Prefix::kI, "PPE");
    const auto L = BilouTag::make(Prefix::kL, "PPE");
    const auto U = BilouTag::make(Prefix::kU, "PPE");
    const auto Is = BilouTag::make(Prefix::kI, "SYM");
    CHECK(transition_allowed(nullptr, B, false));
    CHECK_FALSE(transition_allowed(nullptr, I, false));
    CHECK_FALSE(transition_allowed(&O, I, false));
    CHECK(transition_allowed(&B, I, false));
    CHECK_FALSE(transition_allowed(&B, Is, false));
    CHECK_FALSE(transition_allowed(&B, O, false));
    CHECK(transition_allowed(&I, L, true));
    CHECK_FALSE(transition_allowed(&I, I, true));
    CHECK_FALSE(transition_allowed(nullptr, B, true));
    CHECK(transition_allowed(&L, U, true));
  }

  TEST_CASE("singleton corpus") {
    const TaggerModel m = toy_model();
    CHECK(m.tag({"mask"}) == std::vector<BilouTag>{BilouTag::make(Prefix::kU, "PPE")});
    CHECK(m.tag({}).empty());
    // Frozen from the trained toy model: every weight it learned is shared by
    // both positions (bias, shared shape and affixes), so "wear" is tagged
    // like "mask".
    CHECK(m.tag({"wear", "mask"}) == std::vector<BilouTag>{BilouTag::make(Prefix::kU, "PPE"),
                                                           BilouTag::make(Prefix::kU, "PPE")});
    CHECK_THROWS_AS(train_tagger({}, toy_config()), EmptyTrainingSetError);
  }

  TEST_CASE("training is deterministic") {
    const auto data = testing::planted_tagging(120, 4);
    TrainConfig c = TrainConfig::model3();
    c.iterations = 4;
    c.seed = 9;
    const auto a = train_tagger(data.sentences, c);
    const auto b = train_tagger(data.sentences, c);
    CHECK(a == b);
    CHECK(a.serialize() == b.serialize());
  }

  TEST_CASE("separable corpus reaches perfect training score") {
    const auto data = testing::planted_tagging(150, 12);
    TrainConfig c = TrainConfig::model1();
    c.dropout_start = c.dropout_end = 0.0;
    c.iterations = 30;
    const auto m = train_tagger(data.sentences, c);
    CHECK(evaluate_tagger(m, data.sentences).micro.f1 == 1.0);
  }

  TEST_CASE("decoded tags are always valid") {
    const TaggerModel m = planted_model(100, 6);
    std::mt19937_64 gen(31);
    const std::vector<std::string> vocab = {"mask", "kit", "w3", "fever", "symptoms", "swab",
                                            "results", "Zz", "", "rules", "9", "apart"};
    for (int i = 0; i < 2000; ++i) {
      std::vector<std::string> tokens;
      const size_t n = gen() % 15;
      for (size_t j = 0; j < n; ++j) tokens.push_back(vocab[gen() % vocab.size()]);
      const auto t = m.tag(tokens);
      REQUIRE(t.size() == n);
      REQUIRE(nerdata::is_valid_bilou(t));
    }
  }

  TEST_CASE("metrics match a brute-force oracle") {
    std::mt19937_64 gen(77);
    const std::vector<std::string> cats = {"DIST", "PPE", "SYM"};
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<std::vector<Span>> gold, pred;
      const size_t n_sent = 1 + gen() % 6;
      for (size_t s = 0; s < n_sent; ++s) {
        const size_t len = gen() % 12;
        gold.push_back(testing::random_spans(gen, len, cats));
        pred.push_back(gen() % 3 == 0 ? gold.back() : testing::random_spans(gen, len, cats));
      }
      const auto report = evaluate_spans(gold, pred, cats);
      const auto oracle = testing::brute_force_counts(gold, pred);
      uint64_t tp = 0, fp = 0, fn = 0;
      for (const auto& c : cats) {
        const auto it = oracle.find(c);
        const testing::Counts o = it == oracle.end() ? testing::Counts{} : it->second;
        const Prf& got = report.per_category.at(c);
        REQUIRE(got.tp == o.tp);
        REQUIRE(got.fp == o.fp);
        REQUIRE(got.fn == o.fn);
        const auto [p, r, f] = testing::prf(double(o.tp), double(o.fp), double(o.fn));
        REQUIRE(got.precision == p);
        REQUIRE(got.recall == r);
        REQUIRE(got.f1 == f);
        tp += got.tp;
        fp += got.fp;
        fn += got.fn;
      }
      REQUIRE(report.micro.tp == tp);
      REQUIRE(report.micro.fp == fp);
      REQUIRE(report.micro.fn == fn);
    }
  }

  TEST_CASE("worked metric example and degenerate cases") {
    const Prf p = Prf::from_counts(9, 1, 3);
    CHECK(format_fixed(p.precision, 3) == "0.900");
    CHECK(format_fixed(p.recall, 3) == "0.750");
    CHECK(format_fixed(p.f1, 4) == "0.8182");
    const Prf z = Prf::from_counts(0, 0, 5);
    CHECK(z.precision == 0.0);
    CHECK(z.recall == 0.0);
    CHECK(z.f1 == 0.0);
    CHECK(Prf::from_counts(0, 0, 0).f1 == 0.0);

    const std::vector<std::vector<Span>> gold = {{{0, 1, "PPE"}, {2, 4, "SYM"}}};
    const auto same = evaluate_spans(gold, gold);
    CHECK(same.micro.f1 == 1.0);
    for (const auto& [c, prf] : same.per_category) {
      CHECK(prf.precision == 1.0);
      CHECK(prf.recall == 1.0);
    }
    const auto none = evaluate_spans(gold, {{}});
    CHECK(none.micro.precision == 0.0);
    CHECK(none.micro.f1 == 0.0);
    CHECK(none.format().find("micro") != std::string::npos);
  }

  TEST_CASE("model serialization round-trips") {
    const TaggerModel m = planted_model(80, 2);
    const TaggerModel back = TaggerModel::deserialize(m.serialize());
    CHECK(back == m);
    CHECK(back.serialize() == m.serialize());
    const auto data = testing::planted_tagging(50, 123);
    for (const auto& s : data.sentences) CHECK(back.tag(s.tokens) == m.tag(s.tokens));
    CHECK_THROWS_AS(TaggerModel::deserialize("not a model"), FormatError);
  }

  TEST_CASE("entity names merge surface variants") {
    const auto& res = textprep::Resources::defaults();
    CHECK(normalize_entity({"masks"}, res) == "mask");
    CHECK(normalize_entity({"Mask"}, res) == "mask");
    CHECK(normalize_entity({"social_distancing"}, res) == "social distance");
    CHECK(normalize_entity({"hand", "Sanitizers"}, res) == "hand sanitizer");

    std::vector<EntityMention> mentions;
    for (const char* s : {"masks", "Mask", "mask"})
      mentions.push_back({"p1", "Charlotte", 0, "PPE", normalize_entity({s}, res), s});
    const auto counts = count_entities(mentions);
    REQUIRE(counts.size() == 1);
    CHECK(counts[0].name == "mask");
    CHECK(counts[0].count == 3);
    CHECK(counts[0].share == 1.0);
    CHECK(count_entities({}).empty());
  }

  TEST_CASE("shares sum to one per subreddit and category") {
    std::mt19937_64 gen(14);
    std::vector<EntityMention> mentions;
    const std::vector<std::string> subs = {"a", "b", "c"}, cats = {"PPE", "SYM"};
    for (int i = 0; i < 500; ++i)
      mentions.push_back({"p", subs[gen() % 3], 0, cats[gen() % 2],
                          "n" + std::to_string(gen() % 17), "x"});
    std::map<std::pair<std::string, std::string>, double> sum;
    for (const auto& c : count_entities(mentions)) sum[{c.subreddit, c.category}] += c.share;
    CHECK(sum.size() == 6);
    for (const auto& [k, v] : sum) CHECK(std::abs(v - 1.0) < 1e-9);
  }

  TEST_CASE("detection over documents") {
    const TaggerModel m = planted_model(300, 8);
    std::vector<Document> docs = {
        doc("p1", "Charlotte", "Wear w1 mask w2 today. The w5 fever symptoms w9 are bad."),
        doc("p2", "raleigh", "w3 swab results w4 https://x.io/swab w7."),
        doc("p3", "raleigh", ""),
    };
    DetectOptions one;
    const auto seq = detect_entities(m, docs, one);
    DetectOptions four;
    four.threads = 4;
    CHECK(detect_entities(m, docs, four) == seq);
    bool saw_fever = false;
    for (const auto& e : seq) {
      CHECK_FALSE(e.name.empty());
      if (e.name == "fever symptom" || e.name == "fever") saw_fever = true;
    }
    CHECK(saw_fever);
    CHECK(parse_mentions(format_mentions(seq)) == seq);
    CHECK(detect_and_count_entities(m, {}).empty());
  }
}
