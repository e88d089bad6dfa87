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
#include <filesystem>
#include <numeric>
#include <random>

#include "doctest.h"
#include "epiwatch/error.h"
#include "epiwatch/topics.h"
#include "oracles.h"

using namespace epiwatch;
using namespace epiwatch::topics;

namespace {

LdaConfig small_config(int k = 2) {
  LdaConfig c;
  c.k = k;
  c.batch_size = 16;
  c.epochs = 5;
  c.seed = 7;
  return c;
}

std::pair<Vocabulary, DocTermMatrix> planted(size_t n_docs, uint64_t seed) {
  return build_vocabulary(testing::planted_topic_texts(n_docs, 40, seed), {0.90, 1});
}

Document with_topic(int topic, double p, std::string id = "") {
  Document d;
  d.post_id = std::move(id);
  d.topic = topic;
  d.topic_probability = p;
  return d;
}

}  // namespace

TEST_SUITE("topics") {
  TEST_CASE("vocabulary thresholds are strict") {
    // "all" in 4/4 docs, "three" in 3/4, "two" in 2/4.
    const auto [vocab, m] = build_vocabulary(
        {"all three two", "all three two", "all three", "all"}, {0.90, 3});
    CHECK(vocab.terms == std::vector<std::string>{"three"});
    CHECK(vocab.df == std::vector<uint32_t>{3});
    CHECK(m.docs[0] == DocCounts{{0, 1}});
    CHECK(m.docs[3].empty());
    CHECK(keep_term(3, 4, {}));
    CHECK_FALSE(keep_term(4, 4, {}));
    CHECK_FALSE(keep_term(2, 4, {}));
    CHECK(keep_term(9, 10, {}));  // exactly 0.90 is kept
    CHECK_THROWS_AS(build_vocabulary({"a", "b"}, {0.9, 3}), EmptyVocabularyError);
  }

  TEST_CASE("vocabulary indices follow first occurrence") {
    const auto [vocab, m] = build_vocabulary({"z y z", "y x", "x z"}, {1.0, 1});
    CHECK(vocab.terms == std::vector<std::string>{"z", "y", "x"});
    CHECK(m.docs[0] == DocCounts{{0, 2}, {1, 1}});
    CHECK(*vocab.find("x") == 2);
    CHECK_FALSE(vocab.find("w").has_value());
    CHECK(count_terms(vocab, "x x unknown z") == DocCounts{{0, 1}, {2, 2}});
  }

  TEST_CASE("learning rate schedule") {
    LdaConfig c;
    CHECK(learning_rate(c, 0) == doctest::Approx(std::exp(-0.7 * std::log(15.0))).epsilon(1e-15));
    CHECK(learning_rate(c, 0) == doctest::Approx(0.1502).epsilon(1e-3));
    CHECK(learning_rate(c, 5) == doctest::Approx(std::pow(20.0, -0.7)));
    LdaConfig bad;
    bad.k = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = LdaConfig{};
    bad.kappa = 0.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }

  TEST_CASE("planted topics are recovered") {
    const auto [vocab, m] = planted(60, 3);
    FitTrace trace;
    const TopicModel model = fit_lda(vocab, m, small_config(), &trace);
    CHECK(trace.perplexity.size() == 5);
    const auto tops = top_words(model, 15);
    for (const auto& topic : tops) {
      size_t b = 0;
      for (const auto& w : topic) b += testing::planted_word_topic(w.term);
      const double purity = double(std::max(b, topic.size() - b)) / double(topic.size());
      CHECK(purity >= 0.95);
    }
    // The two topics own different halves.
    CHECK(testing::planted_word_topic(tops[0][0].term) != testing::planted_word_topic(tops[1][0].term));

    const auto all = infer_all(model, m);
    for (size_t d = 0; d < m.docs.size(); ++d) {
      CHECK(all[d].probability > 0.9);
      CHECK(all[d].assigned == all[d % 2].assigned);
    }
  }

  TEST_CASE("fitting is deterministic and thread independent") {
    const auto [vocab, m] = planted(50, 5);
    LdaConfig c = small_config();
    const TopicModel a = fit_lda(vocab, m, c);
    const TopicModel b = fit_lda(vocab, m, c);
    CHECK(a.lambda() == b.lambda());
    c.threads = 4;
    const TopicModel t = fit_lda(vocab, m, c);
    CHECK(t.lambda() == a.lambda());
    const auto seq = infer_all(a, m, 1);
    const auto par = infer_all(a, m, 4);
    for (size_t d = 0; d < seq.size(); ++d) CHECK(seq[d].gamma == par[d].gamma);
    CHECK(perplexity(a, m, 1) == perplexity(a, m, 3));
  }

  TEST_CASE("normalized rows and gamma are proper") {
    const auto [vocab, m] = planted(40, 9);
    const TopicModel model = fit_lda(vocab, m, small_config(3));
    for (int t = 0; t < model.k(); ++t) {
      const auto row = model.normalized_row(t);
      CHECK(std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) < 1e-9);
    }
    for (double l : model.lambda()) CHECK(l > 0.0);
    for (const auto& dt : infer_all(model, m)) {
      double s = 0;
      for (double g : dt.gamma) {
        CHECK(g > 0.0);
        s += g;
      }
      CHECK(dt.probability > 0.0);
      CHECK(dt.probability <= 1.0);
      CHECK(dt.probability == dt.gamma[dt.assigned] / s);
      for (size_t i = 0; i < size_t(dt.assigned); ++i) CHECK(dt.gamma[i] < dt.gamma[dt.assigned]);
    }
  }

  TEST_CASE("empty document falls back to the prior") {
    const auto [vocab, m] = planted(20, 1);
    const TopicModel model = fit_lda(vocab, m, small_config(4));
    const DocTopics dt = infer_doc_topics(model, {});
    CHECK(dt.gamma == std::vector<double>(4, 0.25));
    CHECK(dt.assigned == 0);
    CHECK(dt.probability == 0.25);
  }

  TEST_CASE("inference depends only on counts") {
    const auto [vocab, m] = planted(30, 2);
    const TopicModel model = fit_lda(vocab, m, small_config());
    const std::string text = "a1 a2 a3 a1 b4";
    const std::string shuffled = "b4 a1 a3 a1 a2";
    const auto x = infer_doc_topics(model, count_terms(vocab, text));
    const auto y = infer_doc_topics(model, count_terms(vocab, shuffled));
    CHECK(x.gamma == y.gamma);
  }

  TEST_CASE("top words ordering") {
    Vocabulary v;
    v.terms = {"p", "q", "r"};
    v.df = {1, 1, 1};
    v.index = {{"p", 0}, {"q", 1}, {"r", 2}};
    v.n_docs = 1;
    LdaConfig c;
    c.k = 2;
    const TopicModel model(v, c, {1.0, 2.0, 2.0, 3.0, 1.0, 3.0});
    const auto tops = top_words(model, 15);
    REQUIRE(tops[0].size() == 3);  // fewer terms than requested
    CHECK(tops[0][0].term == "q");
    CHECK(tops[0][1].term == "r");
    CHECK(tops[0][2].term == "p");
    CHECK(tops[1][0].term == "p");
    CHECK(tops[1][1].term == "r");
    CHECK(tops[0][0].weight == doctest::Approx(0.4));
    CHECK(top_words(model, 1)[1].size() == 1);
  }

  TEST_CASE("single full minibatch reduces to a blended batch step") {
    const auto [vocab, m] = planted(40, 11);
    LdaConfig online = small_config();
    online.batch_size = int(m.docs.size());
    online.epochs = 1;
    LdaConfig batch = online;
    batch.method = LdaMethod::kBatch;
    const auto lam0 = initial_lambda(online, vocab.size());
    const auto on = fit_lda(vocab, m, online).lambda();
    const auto full = fit_lda(vocab, m, batch).lambda();
    const double rho = learning_rate(online, 0);
    REQUIRE(on.size() == full.size());
    double worst = 0.0;
    for (size_t i = 0; i < on.size(); ++i)
      worst = std::max(worst, std::abs(on[i] - ((1 - rho) * lam0[i] + rho * full[i])) /
                                  std::max(1.0, std::abs(on[i])));
    CHECK(worst < 1e-9);
  }

  TEST_CASE("model file round-trips") {
    const auto [vocab, m] = planted(20, 4);
    const TopicModel model = fit_lda(vocab, m, small_config());
    const auto path = std::filesystem::temp_directory_path() / "epiwatch_topics_rt.lda";
    model.save(path);
    const TopicModel back = TopicModel::load(path);
    std::filesystem::remove(path);
    CHECK(back.lambda() == model.lambda());
    CHECK(back.vocab().terms == model.vocab().terms);
    CHECK(back.serialize() == model.serialize());
    CHECK(infer_doc_topics(back, m.docs[0]).gamma == infer_doc_topics(model, m.docs[0]).gamma);
    CHECK_THROWS_AS(TopicModel::deserialize("epiwatch-lda 9\n"), FormatError);
  }

  TEST_CASE("topic frequency keeps empty topics") {
    std::vector<Document> docs = {with_topic(0, 0.9), with_topic(0, 0.8), with_topic(2, 0.7)};
    const auto shares = topic_frequency(docs, 4);
    REQUIRE(shares.size() == 4);
    CHECK(shares[0].count == 2);
    CHECK(shares[1].count == 0);
    CHECK(shares[3].count == 0);
    CHECK(shares[0].percent == 67);
    CHECK(shares[2].percent == 33);
    uint64_t total = 0;
    for (const auto& s : shares) total += s.count;
    CHECK(total == docs.size());
    CHECK(format_topic_frequency(shares).rfind("topic\tdocuments\tpercent", 0) == 0);
  }

  TEST_CASE("representative sample selection") {
    std::vector<Document> docs;
    for (double p : {0.95, 0.92, 0.99, 0.91, 0.97}) docs.push_back(with_topic(1, p));
    docs.push_back(with_topic(0, 0.99));
    const auto a = select_rsd(docs, 1, 0.9, 3, 5);
    CHECK_FALSE(a.fallback);
    CHECK(a.documents.size() == 3);
    CHECK(std::set<size_t>(a.documents.begin(), a.documents.end()).size() == 3);
    for (size_t i : a.documents) CHECK(i < 5);
    CHECK(select_rsd(docs, 1, 0.9, 3, 5).documents == a.documents);

    std::vector<Document> few = {with_topic(1, 0.95), with_topic(1, 0.5), with_topic(1, 0.93),
                                 with_topic(1, 0.7), with_topic(0, 0.99)};
    const auto b = select_rsd(few, 1, 0.9, 3, 1);
    CHECK(b.fallback);
    std::vector<size_t> got = b.documents;
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<size_t>{0, 2, 3});
    CHECK_THROWS_AS(select_rsd(few, 2, 0.9, 3, 1), NoAssignedDocumentsError);
  }

  TEST_CASE("monthly fits skip thin months") {
    std::vector<Document> docs;
    const auto texts = testing::planted_topic_texts(12, 20, 6);
    for (size_t i = 0; i < texts.size(); ++i) {
      Document d;
      d.post_id = "p" + std::to_string(i);
      // Ten documents in March, none in April, two in May.
      d.created_utc = i < 10 ? 1583712000 + int64_t(i) * 86400 : 1589068800;
      d.cleaned_text = texts[i];
      docs.push_back(d);
    }
    Diagnostics diag;
    MonthlyOptions opts;
    opts.vocabulary.min_df = 1;
    const auto months = monthly_side_topics(docs, small_config(), opts, &diag);
    REQUIRE(months.size() == 3);
    CHECK(months[0].month == "2020-03");
    CHECK_FALSE(months[0].skipped);
    CHECK(months[0].topics.size() == 2);
    CHECK(months[1].month == "2020-04");
    CHECK(months[1].skipped);
    CHECK(months[2].skipped);
    CHECK(months[2].n_docs == 2);
    CHECK(diag.messages().size() == 2);
  }
}
