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

#ifndef EPIWATCH_TAGGER_H_
#define EPIWATCH_TAGGER_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "epiwatch/document.h"
#include "epiwatch/nerdata.h"
#include "epiwatch/textprep.h"

namespace epiwatch::tagger {

using nerdata::AnnotatedSentence;
using nerdata::BilouTag;
using nerdata::Category;
using nerdata::Span;

struct TrainConfig {
  int iterations = 30;
  int batch_min = 4;
  int batch_max = 32;
  double batch_growth = 1.001;  // per batch, compounding
  double dropout_start = 0.5;
  double dropout_end = 0.5;  // linear decay across iterations
  uint64_t seed = 0;

  // The three standard training regimes.
  static TrainConfig model1();  // 30 iterations, batch 4->32, dropout 0.5
  static TrainConfig model2();  // 50 iterations, batch 1->16, dropout 0.35
  static TrainConfig model3();  // 100 iterations, batch 4->32, dropout 0.6->0.35

  void validate() const;
  double dropout_at(int iteration) const;
};

// Compounding batch sizes: floor(min * growth^j) clipped at max. One schedule
// runs across the whole training session.
class BatchSchedule {
 public:
  explicit BatchSchedule(const TrainConfig& config);
  size_t next();

 private:
  double current_;
  double max_;
  double growth_;
};

inline constexpr std::string_view kTemplateId = "bilou-linear-v1";

// bias, w=, shape=, pre1..3=, suf1..3=, prev=, next=, ptag=
std::vector<std::string> extract_features(const std::vector<std::string>& tokens,
                                          size_t position, std::string_view prev_tag);

std::string word_shape(std::string_view word);

// Allowed-transition check for greedy decoding. prev is nullptr at the start.
bool transition_allowed(const BilouTag* prev, const BilouTag& next, bool is_last);

class TaggerModel {
 public:
  TaggerModel() = default;

  const std::vector<BilouTag>& labels() const { return labels_; }
  std::vector<Category> categories() const;
  std::string_view template_id() const { return template_id_; }
  size_t num_features() const { return feature_names_.size(); }

  // Greedy left-to-right decoding restricted to BILOU-valid transitions; the
  // result always passes strict validation.
  std::vector<BilouTag> tag(const std::vector<std::string>& tokens) const;

  // Text container: header, labels, then one line per feature with its
  // averaged weights in shortest round-trip notation.
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;
  static TaggerModel deserialize(std::string_view text);
  static TaggerModel load(const std::filesystem::path& path);

  bool operator==(const TaggerModel& other) const {
    return labels_ == other.labels_ && template_id_ == other.template_id_ &&
           feature_names_ == other.feature_names_ && weights_ == other.weights_;
  }

 private:
  friend TaggerModel train_tagger(const std::vector<AnnotatedSentence>&, const TrainConfig&);

  std::vector<BilouTag> labels_;
  std::string template_id_{kTemplateId};
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, uint32_t> feature_index_;
  std::vector<double> weights_;  // feature-major, labels_.size() per feature
};

// Averaged perceptron: per iteration the data is shuffled, split into
// compounding batches, each batch decoded with the current weights, and the
// summed updates for mispredicted positions applied with feature dropout.
// Throws EmptyTrainingSetError, InvalidBilouError.
TaggerModel train_tagger(const std::vector<AnnotatedSentence>& train,
                         const TrainConfig& config);

std::vector<BilouTag> tag_tokens(const TaggerModel& model,
                                 const std::vector<std::string>& tokens);

struct Prf {
  uint64_t tp = 0;
  uint64_t fp = 0;
  uint64_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // 0/0 is taken as 0 for all three ratios.
  static Prf from_counts(uint64_t tp, uint64_t fp, uint64_t fn);
};

struct EvalReport {
  std::map<Category, Prf> per_category;
  Prf micro;

  std::string format() const;
};

// Exact span match on (start, end, category), per sentence.
EvalReport evaluate_spans(const std::vector<std::vector<Span>>& gold,
                          const std::vector<std::vector<Span>>& predicted,
                          const std::vector<Category>& categories = {});
EvalReport evaluate_tagger(const TaggerModel& model,
                           const std::vector<AnnotatedSentence>& eval);

struct EntityMention {
  std::string post_id;
  std::string subreddit;
  int64_t created_utc = 0;
  Category category;
  std::string name;     // normalized
  std::string surface;  // tokens as seen

  bool operator==(const EntityMention&) const = default;
};

struct EntityCount {
  std::string subreddit;
  Category category;
  std::string name;
  uint64_t count = 0;
  double share = 0.0;  // of the (subreddit, category) total
};

struct DetectOptions {
  // Multi-word keywords to underscore-join before tokenizing, matching how
  // training sentences were built.
  const nerdata::KeywordSpec* join_keywords = nullptr;
  const textprep::Resources* resources = nullptr;  // defaults when null
  int threads = 1;
};

// Lowercase + per-word root form, words split on '_' and joined by spaces.
std::string normalize_entity(const std::vector<std::string>& tokens,
                             const textprep::Resources& resources);

// Tags every sentence of every Document, one Document at a time.
std::vector<EntityMention> detect_entities(const TaggerModel& model,
                                           const std::vector<Document>& documents,
                                           const DetectOptions& options = {});

// Sorted by subreddit, category, count (descending), name.
std::vector<EntityCount> count_entities(const std::vector<EntityMention>& mentions);

std::vector<EntityCount> detect_and_count_entities(const TaggerModel& model,
                                                   const std::vector<Document>& documents,
                                                   const DetectOptions& options = {});

// TSV I/O for mentions (post_id, subreddit, created_utc, category, name,
// surface) and counts (subreddit, category, name, count, share).
std::string format_mentions(const std::vector<EntityMention>& mentions);
std::vector<EntityMention> parse_mentions(std::string_view text);
std::string format_counts(const std::vector<EntityCount>& counts);

}  // namespace epiwatch::tagger

#endif  // EPIWATCH_TAGGER_H_
