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

#ifndef EPIWATCH_TOPICS_H_
#define EPIWATCH_TOPICS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "epiwatch/document.h"
#include "epiwatch/error.h"

namespace epiwatch::topics {

struct Vocabulary {
  std::vector<std::string> terms;  // index -> term, first-occurrence order
  std::vector<uint32_t> df;        // per retained term
  std::unordered_map<std::string, uint32_t> index;
  size_t n_docs = 0;

  size_t size() const { return terms.size(); }
  std::optional<uint32_t> find(std::string_view term) const;
};

// Sparse bag of words: (term index, count) pairs sorted by index.
using DocCounts = std::vector<std::pair<uint32_t, uint32_t>>;

struct DocTermMatrix {
  std::vector<DocCounts> docs;
  size_t n_terms = 0;
};

struct VocabularyOptions {
  double max_df = 0.90;  // fraction of documents; strictly higher is dropped
  uint32_t min_df = 3;   // documents; strictly lower is dropped

  void validate() const;
};

bool keep_term(uint32_t df, size_t n_docs, const VocabularyOptions& options);

// Whitespace tokens of each text. Throws EmptyVocabularyError when no term
// survives the thresholds.
std::pair<Vocabulary, DocTermMatrix> build_vocabulary(
    const std::vector<std::string>& texts, const VocabularyOptions& options = {});

// Counts of in-vocabulary tokens; unknown tokens are ignored.
DocCounts count_terms(const Vocabulary& vocab, std::string_view text);

enum class LdaMethod { kOnline, kBatch };

struct LdaConfig {
  int k = 5;
  std::optional<double> alpha;  // defaults to 1/k
  std::optional<double> eta;    // defaults to 1/k
  double tau0 = 15.0;
  double kappa = 0.7;
  int batch_size = 128;
  int epochs = 10;
  double mean_change_tol = 1e-3;
  int max_e_iters = 100;
  uint64_t seed = 42;
  int top_n = 15;
  LdaMethod method = LdaMethod::kOnline;
  int threads = 1;

  double doc_topic_prior() const { return alpha ? *alpha : 1.0 / k; }
  double topic_word_prior() const { return eta ? *eta : 1.0 / k; }
  void validate() const;
};

LdaMethod parse_method(std::string_view name);
std::string_view method_name(LdaMethod method);

// rho_t = (tau0 + t)^-kappa, t counted from 0.
double learning_rate(const LdaConfig& config, uint64_t t);

class TopicModel {
 public:
  TopicModel() = default;
  TopicModel(Vocabulary vocab, LdaConfig config, std::vector<double> lambda);

  int k() const { return config_.k; }
  size_t num_terms() const { return vocab_.size(); }
  const Vocabulary& vocab() const { return vocab_; }
  const LdaConfig& config() const { return config_; }

  // Raw topic-word parameters, k rows of num_terms() entries.
  const std::vector<double>& lambda() const { return lambda_; }
  double lambda_at(int topic, size_t term) const {
    return lambda_[size_t(topic) * num_terms() + term];
  }
  std::vector<double> normalized_row(int topic) const;

  // exp(E[log beta]) under the current lambda, same layout as lambda().
  const std::vector<double>& exp_elog_beta() const { return exp_elog_beta_; }

  std::string serialize() const;
  void save(const std::filesystem::path& path) const;
  static TopicModel deserialize(std::string_view text);
  static TopicModel load(const std::filesystem::path& path);

 private:
  Vocabulary vocab_;
  LdaConfig config_;
  std::vector<double> lambda_;
  std::vector<double> exp_elog_beta_;
};

struct DocTopics {
  std::vector<double> gamma;
  int assigned = 0;  // lowest index attaining the max
  double probability = 0.0;
};

struct FitTrace {
  std::vector<double> perplexity;  // after each epoch, on the training corpus
};

// Seeded positive starting point for lambda: Gamma(100, 0.01) draws.
std::vector<double> initial_lambda(const LdaConfig& config, size_t n_terms);

// Online (or batch, rho = 1) variational Bayes. Throws EmptyCorpusError,
// EmptyVocabularyError, ConfigError.
TopicModel fit_lda(const Vocabulary& vocab, const DocTermMatrix& matrix,
                   const LdaConfig& config, FitTrace* trace = nullptr);

// E-step with lambda frozen.
DocTopics infer_doc_topics(const TopicModel& model, const DocCounts& counts);
std::vector<DocTopics> infer_all(const TopicModel& model, const DocTermMatrix& matrix,
                                 int threads = 1);

// Variational-bound perplexity of the model on a corpus.
double perplexity(const TopicModel& model, const DocTermMatrix& matrix, int threads = 1);

struct TopWord {
  std::string term;
  uint32_t index = 0;
  double weight = 0.0;  // normalized lambda
};

// Per topic, descending weight with lower term index first on ties.
std::vector<std::vector<TopWord>> top_words(const TopicModel& model, int top_n);

// Sets topic and topic_probability on every document from its cleaned text.
void assign_topics(const TopicModel& model, std::vector<Document>& docs, int threads = 1);

struct TopicShare {
  int topic = 0;
  uint64_t count = 0;
  uint64_t percent = 0;  // round(100 * count / N), halves rounded up
};

// One row per topic including topics with no documents.
std::vector<TopicShare> topic_frequency(const std::vector<Document>& docs, int k);
std::string format_topic_frequency(const std::vector<TopicShare>& shares);

struct RsdSample {
  std::vector<size_t> documents;  // indices into the input
  bool fallback = false;          // fewer than n met the threshold
};

// Randomly selects n documents of a topic whose probability is at least
// threshold; short samples are topped up with the highest-probability
// remaining documents of that topic. Throws NoAssignedDocumentsError.
RsdSample select_rsd(const std::vector<Document>& docs, int topic, double threshold,
                     size_t n, uint64_t seed);

struct MonthTopics {
  std::string month;  // YYYY-MM
  size_t n_docs = 0;
  bool skipped = false;
  std::vector<std::vector<TopWord>> topics;
};

struct MonthlyOptions {
  size_t min_docs = 5;
  VocabularyOptions vocabulary;
};

// Fits k = 2 on each calendar month (UTC) present in the documents. Months
// that are too small, or whose vocabulary is empty, are reported as skipped
// and noted in diagnostics.
std::vector<MonthTopics> monthly_side_topics(const std::vector<Document>& docs,
                                             const LdaConfig& base,
                                             const MonthlyOptions& options = {},
                                             Diagnostics* diagnostics = nullptr);

}  // namespace epiwatch::topics

#endif  // EPIWATCH_TOPICS_H_
