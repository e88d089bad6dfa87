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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epiwatch/civil_time.h"
#include "epiwatch/cli.h"
#include "epiwatch/io.h"
#include "epiwatch/nerdata.h"
#include "epiwatch/sentiment.h"
#include "epiwatch/tagger.h"
#include "epiwatch/text_util.h"
#include "epiwatch/topics.h"
#include "oracles.h"

using namespace epiwatch;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects failure reasons for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

// ---------------------------------------------------------------------------

void bilou_round_trip(Check& c) {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(2020);
  const std::vector<std::string> cats = {"DIST", "DIT", "PPE", "SYM", "TEST"};
  size_t ok = 0;
  for (int i = 0; i < 10000; ++i) {
    const size_t n = gen() % 21;
    const auto spans = testing::random_spans(gen, n, cats);
    const auto tags = nerdata::spans_to_bilou(n, spans);
    if (nerdata::is_valid_bilou(tags) && nerdata::bilou_to_spans(tags) == spans) ++ok;
  }
  const double secs = seconds_since(t0);
  c.expect(ok == 10000, std::to_string(10000 - ok) + " sentences failed the round trip");
  c.expect(secs < 5.0, "took " + format_fixed(secs, 2) + " s");
}

void metric_oracle(Check& c) {
  std::mt19937_64 gen(77);
  const std::vector<std::string> cats = {"DIST", "PPE", "SYM", "TEST"};
  size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    // Random gold sentences, predictions from a perturbed tagging.
    std::vector<nerdata::AnnotatedSentence> eval;
    std::vector<std::vector<nerdata::Span>> gold, pred;
    const size_t n_sent = 1 + gen() % 5;
    for (size_t s = 0; s < n_sent; ++s) {
      const size_t len = 1 + gen() % 15;
      gold.push_back(testing::random_spans(gen, len, cats));
      pred.push_back(gen() % 4 == 0 ? gold.back() : testing::random_spans(gen, len, cats));
    }
    const auto report = tagger::evaluate_spans(gold, pred, cats);
    const auto oracle = testing::brute_force_counts(gold, pred);
    uint64_t tp = 0, fp = 0, fn = 0;
    for (const auto& cat : cats) {
      const auto it = oracle.find(cat);
      const testing::Counts o = it == oracle.end() ? testing::Counts{} : it->second;
      const auto& got = report.per_category.at(cat);
      const auto [p, r, f] = testing::prf(double(o.tp), double(o.fp), double(o.fn));
      if (got.tp != o.tp || got.fp != o.fp || got.fn != o.fn || got.precision != p ||
          got.recall != r || got.f1 != f)
        ++mismatches;
      tp += o.tp;
      fp += o.fp;
      fn += o.fn;
    }
    const auto [p, r, f] = testing::prf(double(tp), double(fp), double(fn));
    if (report.micro.tp != tp || report.micro.fp != fp || report.micro.fn != fn ||
        report.micro.f1 != f)
      ++mismatches;
  }
  c.expect(mismatches == 0, std::to_string(mismatches) + " mismatches against the oracle");
  const auto w = tagger::Prf::from_counts(9, 1, 3);
  c.expect(format_fixed(w.precision, 3) == "0.900", "P = " + format_double(w.precision));
  c.expect(format_fixed(w.recall, 3) == "0.750", "R = " + format_double(w.recall));
  c.expect(format_fixed(w.f1, 4) == "0.8182", "F1 = " + format_double(w.f1));
}

void tagger_learning(Check& c) {
  const auto data = testing::planted_tagging(500, 500);
  const size_t n_train = nerdata::train_size(data.sentences.size(), 0.65);
  const std::vector<nerdata::AnnotatedSentence> train(data.sentences.begin(),
                                                      data.sentences.begin() + n_train);
  const std::vector<nerdata::AnnotatedSentence> held(data.sentences.begin() + n_train,
                                                     data.sentences.end());
  tagger::TrainConfig config = tagger::TrainConfig::model1();
  config.seed = 3;
  const auto t0 = Clock::now();
  const auto model = tagger::train_tagger(train, config);
  const double secs = seconds_since(t0);
  const auto report = tagger::evaluate_tagger(model, held);
  c.expect(report.micro.f1 >= 0.99, "held-out F1 " + format_fixed(report.micro.f1, 4));
  c.expect(secs < 60.0, "training took " + format_fixed(secs, 2) + " s");
  const auto again = tagger::train_tagger(train, config);
  c.expect(again.serialize() == model.serialize(), "second run produced a different model");
  std::cout << "  held-out micro F1 " << format_fixed(report.micro.f1, 4) << ", "
            << format_fixed(secs, 2) << " s\n";
}

void vocabulary_thresholds(Check& c) {
  // Every (df, n) pair over a grid, checked against the two strict rules
  // evaluated in exact integer arithmetic: df >= 3 and 100*df <= 90*n.
  const topics::VocabularyOptions opts;
  size_t wrong = 0;
  for (size_t n = 1; n <= 200; ++n)
    for (uint32_t df = 0; df <= n; ++df) {
      const bool expected = df >= 3 && 100 * uint64_t(df) <= 90 * uint64_t(n);
      if (topics::keep_term(df, n, opts) != expected) ++wrong;
    }
  c.expect(wrong == 0, std::to_string(wrong) + " (df, n) pairs misclassified");

  // The same boundaries through build_vocabulary on a 10-document corpus:
  // term t<j> occurs in exactly j documents.
  std::vector<std::string> texts(10);
  for (size_t j = 1; j <= 10; ++j)
    for (size_t d = 0; d < j; ++d) texts[d] += "t" + std::to_string(j) + " ";
  const auto [vocab, m] = topics::build_vocabulary(texts, opts);
  std::vector<std::string> expected;
  for (size_t j = 10; j >= 1; --j)
    if (j >= 3 && j <= 9) expected.push_back("t" + std::to_string(j));
  std::vector<std::string> got = vocab.terms;
  std::vector<std::string> want = expected;
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  c.expect(got == want, "retained terms: " + join(vocab.terms, ","));
}

void lda_recovery(Check& c) {
  const auto texts = testing::planted_topic_texts(200, 50, 42);
  const auto [vocab, m] = topics::build_vocabulary(texts, {0.90, 3});
  topics::LdaConfig config;
  config.k = 2;
  config.tau0 = 15;
  config.seed = 42;
  const auto t0 = Clock::now();
  topics::FitTrace trace;
  const auto model = topics::fit_lda(vocab, m, config, &trace);
  const double secs = seconds_since(t0);

  for (const auto& topic : topics::top_words(model, 15)) {
    size_t b = 0;
    for (const auto& w : topic) b += testing::planted_word_topic(w.term);
    const double purity = double(std::max(b, topic.size() - b)) / double(topic.size());
    c.expect(purity >= 0.95, "topic purity " + format_fixed(purity, 3));
  }
  // Document-level purity: each planted half lands in its own topic.
  const auto dts = topics::infer_all(model, m);
  size_t agree = 0;
  for (size_t d = 0; d < dts.size(); ++d) agree += dts[d].assigned == dts[d % 2].assigned;
  c.expect(dts[0].assigned != dts[1].assigned, "both halves share a topic");
  c.expect(double(agree) / double(dts.size()) >= 0.95, "document purity too low");

  for (size_t e = 1; e < trace.perplexity.size(); ++e)
    c.expect(trace.perplexity[e] <= trace.perplexity[e - 1] * 1.01,
             "perplexity rose at epoch " + std::to_string(e) + ": " +
                 format_double(trace.perplexity[e - 1]) + " -> " +
                 format_double(trace.perplexity[e]));
  for (int t = 0; t < model.k(); ++t) {
    const auto row = model.normalized_row(t);
    const double s = std::accumulate(row.begin(), row.end(), 0.0);
    c.expect(std::abs(s - 1.0) <= 1e-9, "row sum " + format_double(s));
  }
  const auto again = topics::fit_lda(vocab, m, config);
  c.expect(again.lambda() == model.lambda(), "lambda differs across runs");
  c.expect(secs < 30.0, "fit took " + format_fixed(secs, 2) + " s");
  std::cout << "  perplexity by epoch:";
  for (double p : trace.perplexity) std::cout << " " << format_fixed(p, 2);
  std::cout << "\n";
}

void empty_document(Check& c) {
  const auto texts = testing::planted_topic_texts(40, 20, 6);
  const auto [vocab, m] = topics::build_vocabulary(texts, {0.90, 1});
  for (int k : {2, 3, 5, 7, 10}) {
    topics::LdaConfig config;
    config.k = k;
    config.epochs = 2;
    const auto model = topics::fit_lda(vocab, m, config);
    for (const auto& counts : {topics::DocCounts{}, topics::count_terms(vocab, "zzz qqq")}) {
      const auto dt = topics::infer_doc_topics(model, counts);
      const double alpha = config.doc_topic_prior();
      bool uniform = dt.gamma.size() == size_t(k);
      for (double g : dt.gamma) uniform = uniform && g == alpha;
      c.expect(uniform, "gamma not uniform at k=" + std::to_string(k));
      c.expect(dt.probability == 1.0 / k, "probability " + format_double(dt.probability) +
                                              " at k=" + std::to_string(k));
      c.expect(dt.assigned == 0, "tie not broken to topic 0");
    }
  }
}

void monthly_side_topics(Check& c) {
  // Six months; every month shares one background vocabulary and injects its
  // own 20-word side vocabulary into half of its documents.
  std::mt19937_64 gen(606);
  std::vector<Document> docs;
  std::vector<std::set<std::string>> injected(6);
  const DateRange range{parse_date("2020-03-01"), parse_date("2020-08-31")};
  const auto months = months_in(range);
  for (size_t mi = 0; mi < 6; ++mi) {
    for (int j = 0; j < 20; ++j) injected[mi].insert("side" + std::to_string(mi) + "x" + std::to_string(j));
    const std::vector<std::string> side(injected[mi].begin(), injected[mi].end());
    const int64_t base =
        std::chrono::duration_cast<std::chrono::seconds>(months[mi].time_since_epoch()).count();
    for (int d = 0; d < 40; ++d) {
      std::string text;
      for (int w = 0; w < 30; ++w) {
        if (w) text += ' ';
        text += d % 2 ? side[gen() % side.size()] : "bg" + std::to_string(gen() % 60);
      }
      Document doc;
      doc.post_id = "m" + std::to_string(mi) + "d" + std::to_string(d);
      doc.created_utc = base + int64_t(d % 28) * 86400 + 3600;
      doc.cleaned_text = text;
      docs.push_back(doc);
    }
  }
  topics::LdaConfig base;
  base.seed = 42;
  Diagnostics diag;
  const auto result = topics::monthly_side_topics(docs, base, {}, &diag);
  c.expect(result.size() == 6, std::to_string(result.size()) + " months");
  for (size_t mi = 0; mi < result.size() && mi < 6; ++mi) {
    size_t best = 0;
    for (const auto& topic : result[mi].topics) {
      size_t hits = 0;
      for (const auto& w : topic) hits += injected[mi].count(w.term);
      best = std::max(best, hits);
    }
    c.expect(!result[mi].skipped && best >= 8,
             result[mi].month + ": best topic has " + std::to_string(best) + " injected words");
  }
}

void sentiment_bounds(Check& c) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> val(-4.0, 4.0);
  size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    sentiment::Lexicon lex;
    for (int w = 0; w < 10; ++w) lex.valence["w" + std::to_string(w)] = val(gen);
    std::vector<std::string> tokens;
    const size_t n = gen() % 40;
    for (size_t i = 0; i < n; ++i)
      tokens.push_back(gen() % 5 == 0 ? "not" : "w" + std::to_string(gen() % 14));
    const auto score = sentiment::score_sentence(tokens, lex);
    if (!(score.compound > -1.0 && score.compound < 1.0)) ++bad;
    // Adding a positive-valence token in a fresh clause raises the compound.
    std::vector<std::string> more = tokens;
    for (const char* pad : {"pad", "pad", "pad"}) more.push_back(pad);
    lex.valence["up"] = 1.0 + std::abs(val(gen)) / 4.0;
    more.push_back("up");
    const auto higher = sentiment::score_sentence(more, lex);
    if (!(higher.sum > score.sum && higher.compound > score.compound)) ++bad;
    const long double ref = testing::compound_reference(score.sum);
    if (std::abs(double(ref) - score.compound) > 1e-12) ++bad;
  }
  c.expect(bad == 0, std::to_string(bad) + " bound/monotonicity violations");

  sentiment::Lexicon toy;
  toy.valence["good"] = 1.9;
  const double ref = 1.9 / std::sqrt(1.9 * 1.9 + 15.0);
  const auto good = sentiment::score_sentence({"good"}, toy);
  c.expect(std::abs(good.compound - 0.440) <= 0.001 && std::abs(good.compound - ref) < 1e-15,
           "compound(good) = " + format_double(good.compound));

  using sentiment::Label;
  c.expect(sentiment::label_for(0.05) == Label::kPos, "+0.05 not positive");
  c.expect(sentiment::label_for(-0.05) == Label::kNeg, "-0.05 not negative");
  c.expect(sentiment::label_for(std::nextafter(0.05, 0.0)) == Label::kNeu, "below +0.05");
  c.expect(sentiment::label_for(std::nextafter(-0.05, 0.0)) == Label::kNeu, "above -0.05");
}

void week_bucketing(Check& c) {
  const Days first = parse_date("2020-03-01"), last = parse_date("2020-08-31");
  size_t wrong = 0;
  for (Days d = first; d <= last; d += std::chrono::days(1)) {
    const Days w = week_start(d);
    if (std::chrono::weekday(w) != std::chrono::Sunday || w > d || d - w > std::chrono::days(6))
      ++wrong;
  }
  c.expect(wrong == 0, std::to_string(wrong) + " dates mis-bucketed");
  c.expect(format_date(week_start(parse_date("2020-03-21"))) == "2020-03-15",
           "2020-03-21 -> " + format_date(week_start(parse_date("2020-03-21"))));
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  return files;
}

// Runs one command in dir with relative paths; returns the exit code.
int run_in(const fs::path& dir, const std::vector<std::string>& args, std::string* err_text) {
  const fs::path previous = fs::current_path();
  fs::current_path(dir);
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  fs::current_path(previous);
  if (code != cli::kOk && err_text) *err_text += join(args, " ") + ": " + err.str();
  return code;
}

std::vector<std::vector<std::string>> pipeline(const std::string& dump) {
  return {
      {"ingest", "--dump", dump, "--out", "corpus"},
      {"stats", "--docs", "corpus/documents.jsonl", "--out", "corpus/table1.tsv"},
      {"preprocess", "--in", "corpus/documents.jsonl", "--out", "corpus/cleaned.jsonl"},
      {"ner-build", "--docs", "corpus/documents.jsonl", "--pre-annotate", "--seed", "7", "--out",
       "ner"},
      {"ner-train", "--train", "ner/train.bilou", "--preset", "model1", "--seed", "11", "--model",
       "ner/model.txt"},
      {"ner-eval", "--model", "ner/model.txt", "--eval", "ner/eval.bilou", "--out",
       "ner/eval.tsv"},
      {"ner-tag", "--model", "ner/model.txt", "--docs", "corpus/documents.jsonl", "--threads", "2",
       "--out", "tagged"},
      {"topics", "--docs", "corpus/cleaned.jsonl", "--k", "5", "--min-df", "1", "--seed", "42",
       "--out", "topics"},
      {"topics-monthly", "--docs", "corpus/cleaned.jsonl", "--min-df", "1", "--out", "monthly"},
      {"sentiment", "--docs", "corpus/documents.jsonl", "--entity", "mask", "--out", "sentiment"},
      {"report", "--docs", "topics/documents_with_topics.jsonl", "--mentions",
       "tagged/mentions.tsv", "--topic-model", "topics/model.lda", "--corpus-id", "fixture",
       "--out", "out"},
  };
}

void end_to_end(Check& c) {
  const auto t0 = Clock::now();
  const fs::path dump = fs::absolute(fs::path(EPIWATCH_FIXTURE_DIR) / "sample_dump.jsonl");
  const fs::path root = fs::temp_directory_path() / "epiwatch_acceptance_e2e";
  fs::remove_all(root);
  const fs::path a = root / "a", b = root / "b", r = root / "replay";
  for (const auto& d : {a, b, r}) fs::create_directories(d);

  std::string errors;
  const auto steps = pipeline(dump.string());
  for (const auto& dir : {a, b})
    for (const auto& step : steps)
      if (run_in(dir, step, &errors) != cli::kOk) break;
  c.expect(errors.empty(), "pipeline failed: " + errors);

  const auto tree_a = snapshot(a), tree_b = snapshot(b);
  c.expect(tree_a.size() > 20, "only " + std::to_string(tree_a.size()) + " files written");
  c.expect(tree_a == tree_b, "the two runs differ");

  // Replay: only the manifests are copied; each one regenerates its outputs
  // from the previous step's, in pipeline order.
  size_t n_manifests = 0;
  for (const auto& step : steps) {
    const std::string sub = step[0];
    std::string out;
    for (size_t i = 1; i + 1 < step.size(); ++i)
      if (step[i] == "--out" || (sub == "ner-train" && step[i] == "--model")) out = step[i + 1];
    const bool file_out = sub == "stats" || sub == "preprocess" || sub == "ner-train" ||
                          sub == "ner-eval";
    const fs::path manifest = file_out ? fs::path(out + ".manifest.json")
                                       : fs::path(out) / (sub + ".manifest.json");
    if (!fs::exists(a / manifest)) {
      c.expect(false, "missing manifest " + manifest.string());
      continue;
    }
    fs::create_directories((r / manifest).parent_path());
    fs::copy_file(a / manifest, r / manifest, fs::copy_options::overwrite_existing);
    ++n_manifests;
    if (run_in(r, {"replay", "--manifest", manifest.string()}, &errors) != cli::kOk) break;
  }
  c.expect(n_manifests == steps.size(), "replayed " + std::to_string(n_manifests) + " manifests");
  c.expect(errors.empty(), "replay failed: " + errors);
  const auto tree_r = snapshot(r);
  if (tree_r != tree_a) {
    std::string diff;
    for (const auto& [k, v] : tree_a) {
      const auto it = tree_r.find(k);
      if (it == tree_r.end() || it->second != v) diff += " " + k;
    }
    c.expect(false, "replayed tree differs:" + diff);
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 120.0, "took " + format_fixed(secs, 1) + " s");
  std::cout << "  " << tree_a.size() << " files per run, " << format_fixed(secs, 2) << " s\n";
  fs::remove_all(root);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"BILOU round trip on 10,000 random sentences", bilou_round_trip},
      {"span metrics equal the brute-force oracle", metric_oracle},
      {"tagger learns the planted corpus", tagger_learning},
      {"vocabulary document-frequency boundaries", vocabulary_thresholds},
      {"LDA recovers two planted topics", lda_recovery},
      {"empty document inference", empty_document},
      {"monthly side topics recover injected vocabularies", monthly_side_topics},
      {"sentiment compound bounds and thresholds", sentiment_bounds},
      {"Sunday week bucketing", week_bucketing},
      {"end-to-end determinism and manifest replay", end_to_end},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << " " << (i + 1) << ": " << criteria[i].first << "\n";
    for (const auto& f : c.failures) std::cout << "  " << f << "\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
