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

#include "epiwatch/tagger.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "epiwatch/error.h"
#include "epiwatch/io.h"
#include "epiwatch/parallel.h"
#include "epiwatch/rng.h"
#include "epiwatch/text_util.h"

namespace epiwatch::tagger {

using nerdata::Prefix;

namespace {

bool opens(const BilouTag& t) { return t.prefix == Prefix::kB || t.prefix == Prefix::kI; }

std::vector<BilouTag> make_labels(const std::set<Category>& categories) {
  std::vector<BilouTag> labels = {BilouTag::outside()};
  for (const auto& c : categories)
    for (Prefix p : {Prefix::kB, Prefix::kI, Prefix::kL, Prefix::kU})
      labels.push_back(BilouTag::make(p, c));
  return labels;
}

// Scores every label for one position and returns the best allowed label.
// Ties go to the lowest label index.
template <typename Score>
size_t best_label(const std::vector<BilouTag>& labels, const BilouTag* prev, bool is_last,
                  const Score& score) {
  size_t best = labels.size();
  double best_score = 0.0;
  for (size_t l = 0; l < labels.size(); ++l) {
    if (!transition_allowed(prev, labels[l], is_last)) continue;
    double s = score(l);
    if (best == labels.size() || s > best_score) {
      best = l;
      best_score = s;
    }
  }
  return best;
}

// Weight table shared by decoding in training and in the finished model.
struct WeightView {
  const std::unordered_map<std::string, uint32_t>& index;
  const std::vector<double>& weights;
  size_t n_labels;

  std::vector<uint32_t> ids(const std::vector<std::string>& features) const {
    std::vector<uint32_t> out;
    out.reserve(features.size());
    for (const auto& f : features)
      if (auto it = index.find(f); it != index.end()) out.push_back(it->second);
    return out;
  }

  double score(const std::vector<uint32_t>& ids, size_t label) const {
    double s = 0.0;
    for (uint32_t id : ids) s += weights[size_t(id) * n_labels + label];
    return s;
  }
};

// Decodes a sentence; if `features_out` is given it receives the feature
// strings used at each position (which depend on the predicted history).
std::vector<size_t> decode(const std::vector<std::string>& tokens,
                           const std::vector<BilouTag>& labels, const WeightView& view,
                           std::vector<std::vector<std::string>>* features_out) {
  std::vector<size_t> out;
  out.reserve(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) {
    const BilouTag* prev = i == 0 ? nullptr : &labels[out.back()];
    std::string prev_name = prev ? prev->str() : "O";
    auto features = extract_features(tokens, i, prev_name);
    auto ids = view.ids(features);
    size_t l = best_label(labels, prev, i + 1 == tokens.size(),
                          [&](size_t label) { return view.score(ids, label); });
    out.push_back(l);
    if (features_out) features_out->push_back(std::move(features));
  }
  return out;
}

std::string format_prf_row(const std::string& name, const Prf& p) {
  return name + "\t" + std::to_string(p.tp) + "\t" + std::to_string(p.fp) + "\t" +
         std::to_string(p.fn) + "\t" + format_fixed(p.precision, 4) + "\t" +
         format_fixed(p.recall, 4) + "\t" + format_fixed(p.f1, 4) + "\n";
}

}  // namespace

TrainConfig TrainConfig::model1() { return {30, 4, 32, 1.001, 0.5, 0.5, 0}; }
TrainConfig TrainConfig::model2() { return {50, 1, 16, 1.001, 0.35, 0.35, 0}; }
TrainConfig TrainConfig::model3() { return {100, 4, 32, 1.001, 0.6, 0.35, 0}; }

void TrainConfig::validate() const {
  if (iterations < 1) throw ConfigError("iterations must be positive");
  if (batch_min < 1 || batch_max < batch_min)
    throw ConfigError("batch sizes need 1 <= batch_min <= batch_max");
  if (!(batch_growth > 1.0)) throw ConfigError("batch growth factor must exceed 1");
  auto fraction = [](double d) { return d >= 0.0 && d < 1.0; };
  if (!fraction(dropout_start) || !fraction(dropout_end))
    throw ConfigError("dropout rates must lie in [0, 1)");
}

double TrainConfig::dropout_at(int iteration) const {
  if (iterations <= 1) return dropout_start;
  return dropout_start +
         (dropout_end - dropout_start) * double(iteration) / double(iterations - 1);
}

BatchSchedule::BatchSchedule(const TrainConfig& config)
    : current_(config.batch_min), max_(config.batch_max), growth_(config.batch_growth) {}

size_t BatchSchedule::next() {
  size_t size = std::max<size_t>(1, static_cast<size_t>(std::floor(current_)));
  current_ = std::min(current_ * growth_, max_);
  return size;
}

std::string word_shape(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (char c : word) {
    if (is_ascii_upper(c)) {
      out.push_back('X');
    } else if (is_ascii_lower(c)) {
      out.push_back('x');
    } else if (is_ascii_digit(c)) {
      out.push_back('d');
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> extract_features(const std::vector<std::string>& tokens,
                                          size_t position, std::string_view prev_tag) {
  const std::string w = to_lower(tokens[position]);
  std::vector<std::string> f;
  f.reserve(12);
  f.emplace_back("bias");
  f.push_back("w=" + w);
  f.push_back("shape=" + word_shape(tokens[position]));
  for (size_t n = 1; n <= 3 && n <= w.size(); ++n) {
    f.push_back("pre" + std::to_string(n) + "=" + w.substr(0, n));
    f.push_back("suf" + std::to_string(n) + "=" + w.substr(w.size() - n));
  }
  f.push_back("prev=" + (position == 0 ? std::string("<s>") : to_lower(tokens[position - 1])));
  f.push_back("next=" + (position + 1 == tokens.size() ? std::string("</s>")
                                                       : to_lower(tokens[position + 1])));
  f.push_back("ptag=" + std::string(prev_tag));
  return f;
}

bool transition_allowed(const BilouTag* prev, const BilouTag& next, bool is_last) {
  if (prev && opens(*prev)) {
    if (next.category != prev->category) return false;
    if (next.prefix == Prefix::kL) return true;
    return next.prefix == Prefix::kI && !is_last;
  }
  if (next.prefix == Prefix::kI || next.prefix == Prefix::kL) return false;
  return !(next.prefix == Prefix::kB && is_last);
}

std::vector<Category> TaggerModel::categories() const {
  std::set<Category> cats;
  for (const auto& l : labels_)
    if (!l.is_outside()) cats.insert(l.category);
  return {cats.begin(), cats.end()};
}

std::vector<BilouTag> TaggerModel::tag(const std::vector<std::string>& tokens) const {
  if (labels_.empty()) return std::vector<BilouTag>(tokens.size());
  WeightView view{feature_index_, weights_, labels_.size()};
  std::vector<BilouTag> out;
  out.reserve(tokens.size());
  for (size_t l : decode(tokens, labels_, view, nullptr)) out.push_back(labels_[l]);
  return out;
}

std::vector<BilouTag> tag_tokens(const TaggerModel& model,
                                 const std::vector<std::string>& tokens) {
  return model.tag(tokens);
}

std::string TaggerModel::serialize() const {
  std::string out = "epiwatch-tagger 1\n";
  out += "templates " + template_id_ + "\n";
  out += "labels " + std::to_string(labels_.size()) + "\n";
  for (const auto& l : labels_) out += l.str() + "\n";
  std::vector<uint32_t> order(feature_names_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](uint32_t a, uint32_t b) { return feature_names_[a] < feature_names_[b]; });
  out += "features " + std::to_string(order.size()) + "\n";
  const size_t n = labels_.size();
  for (uint32_t id : order) {
    out += feature_names_[id];
    for (size_t l = 0; l < n; ++l) {
      out += l == 0 ? '\t' : ' ';
      out += format_double(weights_[size_t(id) * n + l]);
    }
    out += '\n';
  }
  return out;
}

void TaggerModel::save(const std::filesystem::path& path) const {
  for (const auto& f : feature_names_)
    if (f.find_first_of("\t\n") != std::string::npos)
      throw ConfigError("feature contains a tab or newline: " + f);
  write_file(path, serialize());
}

TaggerModel TaggerModel::deserialize(std::string_view text) {
  auto lines = split(text, '\n');
  size_t at = 0;
  auto next_line = [&]() -> const std::string& {
    if (at >= lines.size()) throw FormatError(at + 1, "unexpected end of model file");
    return lines[at++];
  };
  auto expect_count = [&](const std::string& line, std::string_view key) -> size_t {
    size_t n = 0;
    if (!starts_with(line, std::string(key) + " ") ||
        std::from_chars(line.data() + key.size() + 1, line.data() + line.size(), n).ec !=
            std::errc()) {
      throw FormatError(at, "expected '" + std::string(key) + " <n>'");
    }
    return n;
  };

  TaggerModel m;
  if (next_line() != "epiwatch-tagger 1") throw FormatError(1, "not a tagger model file");
  const std::string& tmpl = next_line();
  if (!starts_with(tmpl, "templates ")) throw FormatError(at, "missing templates line");
  m.template_id_ = tmpl.substr(10);
  if (m.template_id_ != kTemplateId)
    throw FormatError(at, "unsupported feature templates '" + m.template_id_ + "'");
  const size_t n_labels = expect_count(next_line(), "labels");
  for (size_t i = 0; i < n_labels; ++i) {
    try {
      m.labels_.push_back(BilouTag::parse(next_line()));
    } catch (const ConfigError& e) {
      throw FormatError(at, e.what());
    }
  }
  const size_t n_features = expect_count(next_line(), "features");
  m.weights_.reserve(n_features * n_labels);
  for (size_t i = 0; i < n_features; ++i) {
    const std::string& line = next_line();
    size_t tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(at, "feature line without weights");
    auto values = split(std::string_view(line).substr(tab + 1), ' ');
    if (values.size() != n_labels) throw FormatError(at, "wrong number of weights");
    for (const auto& v : values) {
      double d = 0.0;
      auto res = std::from_chars(v.data(), v.data() + v.size(), d);
      if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        throw FormatError(at, "bad weight '" + v + "'");
      m.weights_.push_back(d);
    }
    std::string name = line.substr(0, tab);
    m.feature_index_.emplace(name, static_cast<uint32_t>(m.feature_names_.size()));
    m.feature_names_.push_back(std::move(name));
  }
  return m;
}

TaggerModel TaggerModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

TaggerModel train_tagger(const std::vector<AnnotatedSentence>& train,
                         const TrainConfig& config) {
  config.validate();
  if (train.empty()) throw EmptyTrainingSetError("training set is empty");
  std::set<Category> categories;
  for (size_t s = 0; s < train.size(); ++s) {
    if (train[s].tokens.size() != train[s].tags.size())
      throw ConfigError("sentence " + std::to_string(s) + " has mismatched tags");
    nerdata::validate_bilou(train[s].tags);
    for (const auto& t : train[s].tags)
      if (!t.is_outside()) categories.insert(t.category);
  }

  TaggerModel model;
  model.labels_ = make_labels(categories);
  const size_t n_labels = model.labels_.size();
  std::map<BilouTag, size_t> label_id;
  for (size_t l = 0; l < n_labels; ++l) label_id[model.labels_[l]] = l;

  // Current weights plus lazily maintained sums for averaging: totals[i]
  // holds the sum of weight i over batches 1..stamp[i].
  std::vector<double>& weights = model.weights_;
  std::vector<double> totals;
  std::vector<uint64_t> stamp;
  auto feature_id = [&](const std::string& f) -> uint32_t {
    auto [it, inserted] =
        model.feature_index_.emplace(f, static_cast<uint32_t>(model.feature_names_.size()));
    if (inserted) {
      model.feature_names_.push_back(f);
      weights.resize(weights.size() + n_labels, 0.0);
      totals.resize(totals.size() + n_labels, 0.0);
      stamp.resize(stamp.size() + n_labels, 0);
    }
    return it->second;
  };

  Rng rng(config.seed);
  BatchSchedule schedule(config);
  std::vector<size_t> order(train.size());
  std::iota(order.begin(), order.end(), size_t{0});
  uint64_t step = 0;

  for (int iter = 0; iter < config.iterations; ++iter) {
    const double dropout = config.dropout_at(iter);
    rng.shuffle(order);
    size_t pos = 0;
    while (pos < order.size()) {
      const size_t end = std::min(order.size(), pos + schedule.next());
      // (weight index, delta) pairs gathered for the whole batch.
      std::map<size_t, double> delta;
      WeightView view{model.feature_index_, weights, n_labels};
      std::vector<std::tuple<std::string, size_t, size_t>> pending;
      for (size_t b = pos; b < end; ++b) {
        const AnnotatedSentence& s = train[order[b]];
        std::vector<std::vector<std::string>> features;
        auto predicted = decode(s.tokens, model.labels_, view, &features);
        for (size_t i = 0; i < predicted.size(); ++i) {
          const size_t gold = label_id.at(s.tags[i]);
          if (predicted[i] == gold) continue;
          for (const auto& f : features[i]) {
            if (dropout > 0.0 && rng.uniform01() < dropout) continue;
            pending.emplace_back(f, gold, predicted[i]);
          }
        }
      }
      pos = end;
      ++step;
      for (const auto& [f, gold, pred] : pending) {
        const size_t base = size_t(feature_id(f)) * n_labels;
        delta[base + gold] += 1.0;
        delta[base + pred] -= 1.0;
      }
      for (const auto& [idx, d] : delta) {
        if (d == 0.0) continue;
        totals[idx] += double(step - 1 - stamp[idx]) * weights[idx];
        weights[idx] += d;
        totals[idx] += weights[idx];
        stamp[idx] = step;
      }
    }
  }

  // Finalize: average over all batches, then drop all-zero features. Features
  // are kept in name order, the same order the model file uses.
  for (size_t idx = 0; idx < weights.size(); ++idx) {
    totals[idx] += double(step - stamp[idx]) * weights[idx];
    weights[idx] = totals[idx] / double(step);
  }
  std::vector<size_t> by_name(model.feature_names_.size());
  std::iota(by_name.begin(), by_name.end(), size_t{0});
  std::sort(by_name.begin(), by_name.end(), [&](size_t a, size_t b) {
    return model.feature_names_[a] < model.feature_names_[b];
  });
  TaggerModel out;
  out.labels_ = model.labels_;
  for (size_t id : by_name) {
    auto first = weights.begin() + long(id * n_labels);
    if (std::all_of(first, first + long(n_labels), [](double w) { return w == 0.0; }))
      continue;
    out.feature_index_.emplace(model.feature_names_[id],
                               static_cast<uint32_t>(out.feature_names_.size()));
    out.feature_names_.push_back(model.feature_names_[id]);
    out.weights_.insert(out.weights_.end(), first, first + long(n_labels));
  }
  return out;
}

Prf Prf::from_counts(uint64_t tp, uint64_t fp, uint64_t fn) {
  Prf p;
  p.tp = tp;
  p.fp = fp;
  p.fn = fn;
  p.precision = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
  p.recall = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
  p.f1 = p.precision + p.recall == 0.0
             ? 0.0
             : 2.0 * p.precision * p.recall / (p.precision + p.recall);
  return p;
}

std::string EvalReport::format() const {
  std::string out = "Category\tTP\tFP\tFN\tP\tR\tF1\n";
  for (const auto& [cat, p] : per_category) out += format_prf_row(cat, p);
  out += format_prf_row("micro", micro);
  return out;
}

EvalReport evaluate_spans(const std::vector<std::vector<Span>>& gold,
                          const std::vector<std::vector<Span>>& predicted,
                          const std::vector<Category>& categories) {
  if (gold.size() != predicted.size())
    throw ConfigError("gold and predicted sentence counts differ");
  struct Counts {
    uint64_t tp = 0, fp = 0, fn = 0;
  };
  std::map<Category, Counts> counts;
  for (const auto& c : categories) counts[c];
  for (size_t s = 0; s < gold.size(); ++s) {
    std::set<Span> g(gold[s].begin(), gold[s].end());
    std::set<Span> p(predicted[s].begin(), predicted[s].end());
    for (const auto& span : p) (g.count(span) ? counts[span.category].tp : counts[span.category].fp)++;
    for (const auto& span : g)
      if (!p.count(span)) counts[span.category].fn++;
  }
  EvalReport report;
  Counts micro;
  for (const auto& [cat, c] : counts) {
    report.per_category[cat] = Prf::from_counts(c.tp, c.fp, c.fn);
    micro.tp += c.tp;
    micro.fp += c.fp;
    micro.fn += c.fn;
  }
  report.micro = Prf::from_counts(micro.tp, micro.fp, micro.fn);
  return report;
}

EvalReport evaluate_tagger(const TaggerModel& model,
                           const std::vector<AnnotatedSentence>& eval) {
  std::vector<std::vector<Span>> gold, predicted;
  for (const auto& s : eval) {
    gold.push_back(nerdata::bilou_to_spans(s.tags));
    predicted.push_back(nerdata::bilou_to_spans(model.tag(s.tokens)));
  }
  return evaluate_spans(gold, predicted, model.categories());
}

std::string normalize_entity(const std::vector<std::string>& tokens,
                             const textprep::Resources& resources) {
  std::vector<std::string> words;
  for (const auto& tok : tokens)
    for (const auto& part : split(tok, '_'))
      if (!part.empty()) words.push_back(textprep::root_form(part, resources));
  return join(words, " ");
}

std::vector<EntityMention> detect_entities(const TaggerModel& model,
                                           const std::vector<Document>& documents,
                                           const DetectOptions& options) {
  const textprep::Resources& res =
      options.resources ? *options.resources : textprep::Resources::defaults();
  std::vector<std::vector<EntityMention>> per_doc(documents.size());
  parallel_for(documents.size(), options.threads, [&](size_t d) {
    const Document& doc = documents[d];
    for (const auto& part : doc.text_parts()) {
      for (const auto& sentence : textprep::split_sentences(
               textprep::strip_urls(part, res.url_pattern), res.abbreviations)) {
        const std::string text = options.join_keywords
                                     ? nerdata::join_multiword(sentence, *options.join_keywords)
                                     : sentence;
        const auto tokens = textprep::tokenize(text);
        for (const auto& span : nerdata::bilou_to_spans(model.tag(tokens))) {
          std::vector<std::string> words(tokens.begin() + long(span.start),
                                         tokens.begin() + long(span.end));
          EntityMention m;
          m.post_id = doc.post_id;
          m.subreddit = doc.subreddit;
          m.created_utc = doc.created_utc;
          m.category = span.category;
          m.name = normalize_entity(words, res);
          m.surface = join(words, " ");
          if (!m.name.empty()) per_doc[d].push_back(std::move(m));
        }
      }
    }
  });
  std::vector<EntityMention> out;
  for (auto& v : per_doc)
    for (auto& m : v) out.push_back(std::move(m));
  return out;
}

std::vector<EntityCount> count_entities(const std::vector<EntityMention>& mentions) {
  std::map<std::tuple<std::string, Category, std::string>, uint64_t> counts;
  std::map<std::pair<std::string, Category>, uint64_t> totals;
  for (const auto& m : mentions) {
    ++counts[{m.subreddit, m.category, m.name}];
    ++totals[{m.subreddit, m.category}];
  }
  std::vector<EntityCount> out;
  for (const auto& [key, n] : counts) {
    const auto& [sub, cat, name] = key;
    out.push_back({sub, cat, name, n, double(n) / double(totals.at({sub, cat}))});
  }
  std::stable_sort(out.begin(), out.end(), [](const EntityCount& a, const EntityCount& b) {
    return std::tie(a.subreddit, a.category) < std::tie(b.subreddit, b.category) ||
           (std::tie(a.subreddit, a.category) == std::tie(b.subreddit, b.category) &&
            (a.count > b.count || (a.count == b.count && a.name < b.name)));
  });
  return out;
}

std::vector<EntityCount> detect_and_count_entities(const TaggerModel& model,
                                                   const std::vector<Document>& documents,
                                                   const DetectOptions& options) {
  return count_entities(detect_entities(model, documents, options));
}

std::string format_mentions(const std::vector<EntityMention>& mentions) {
  std::string out = "post_id\tsubreddit\tcreated_utc\tcategory\tname\tsurface\n";
  for (const auto& m : mentions)
    out += m.post_id + "\t" + m.subreddit + "\t" + std::to_string(m.created_utc) + "\t" +
           m.category + "\t" + m.name + "\t" + m.surface + "\n";
  return out;
}

std::vector<EntityMention> parse_mentions(std::string_view text) {
  std::vector<EntityMention> out;
  auto lines = split(text, '\n');
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = split(lines[i], '\t');
    int64_t t = 0;
    if (f.size() != 6 ||
        std::from_chars(f[2].data(), f[2].data() + f[2].size(), t).ec != std::errc())
      throw FormatError(i + 1, "bad mention row");
    out.push_back({f[0], f[1], t, f[3], f[4], f[5]});
  }
  return out;
}

std::string format_counts(const std::vector<EntityCount>& counts) {
  std::string out = "subreddit\tcategory\tname\tcount\tshare\n";
  for (const auto& c : counts)
    out += c.subreddit + "\t" + c.category + "\t" + c.name + "\t" + std::to_string(c.count) +
           "\t" + format_fixed(c.share, 6) + "\n";
  return out;
}

}  // namespace epiwatch::tagger
