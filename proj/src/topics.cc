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

#include "epiwatch/topics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "epiwatch/civil_time.h"
#include "epiwatch/io.h"
#include "epiwatch/parallel.h"
#include "epiwatch/rng.h"
#include "epiwatch/special_functions.h"
#include "epiwatch/text_util.h"

namespace epiwatch::topics {

namespace {

constexpr double kTiny = 1e-100;  // keeps phi normalizers away from zero

// exp(psi(x_i) - psi(sum x)) for one Dirichlet parameter vector.
void exp_dirichlet_expectation(const double* x, size_t n, double* out) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += x[i];
  const double psi_sum = digamma(sum);
  for (size_t i = 0; i < n; ++i) out[i] = std::exp(digamma(x[i]) - psi_sum);
}

std::vector<double> compute_exp_elog_beta(const std::vector<double>& lambda, int k,
                                          size_t v) {
  std::vector<double> out(lambda.size());
  for (int t = 0; t < k; ++t)
    exp_dirichlet_expectation(lambda.data() + size_t(t) * v, v, out.data() + size_t(t) * v);
  return out;
}

std::vector<double> draw_lambda(Rng& rng, int k, size_t v) {
  std::vector<double> lambda(size_t(k) * v);
  for (double& x : lambda) x = rng.gamma(100.0, 0.01);
  return lambda;
}

struct EStepParams {
  const double* exp_elog_beta;  // k x V
  size_t n_terms;
  int k;
  double alpha;
  double tol;
  int max_iters;
};

// Iterates gamma for one document. When sstats is given it receives the
// k x |doc| sufficient statistics (before multiplication by exp_elog_beta).
void e_step(const DocCounts& doc, const EStepParams& p, std::vector<double>& gamma,
            std::vector<double>* sstats) {
  const size_t k = size_t(p.k);
  const size_t n = doc.size();
  gamma.assign(k, p.alpha);
  if (sstats) sstats->assign(k * n, 0.0);
  if (n == 0) return;

  double total = 0.0;
  for (const auto& [id, c] : doc) total += c;
  for (double& g : gamma) g += total / double(k);

  std::vector<double> beta(k * n);
  for (size_t t = 0; t < k; ++t)
    for (size_t j = 0; j < n; ++j) beta[t * n + j] = p.exp_elog_beta[t * p.n_terms + doc[j].first];

  std::vector<double> etheta(k), ratio(n), next(k);
  auto normalizers = [&] {
    exp_dirichlet_expectation(gamma.data(), k, etheta.data());
    for (size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (size_t t = 0; t < k; ++t) s += etheta[t] * beta[t * n + j];
      ratio[j] = double(doc[j].second) / (s + kTiny);
    }
  };
  for (int it = 0; it < p.max_iters; ++it) {
    normalizers();
    double change = 0.0;
    for (size_t t = 0; t < k; ++t) {
      double s = 0.0;
      for (size_t j = 0; j < n; ++j) s += ratio[j] * beta[t * n + j];
      next[t] = p.alpha + etheta[t] * s;
      change += std::abs(next[t] - gamma[t]);
    }
    gamma.swap(next);
    if (change / double(k) < p.tol) break;
  }
  if (sstats) {
    normalizers();
    for (size_t t = 0; t < k; ++t)
      for (size_t j = 0; j < n; ++j) (*sstats)[t * n + j] = etheta[t] * ratio[j];
  }
}

EStepParams params_for(const TopicModel& m) {
  const LdaConfig& c = m.config();
  return {m.exp_elog_beta().data(), m.num_terms(), c.k, c.doc_topic_prior(),
          c.mean_change_tol, c.max_e_iters};
}

DocTopics summarize(std::vector<double> gamma) {
  DocTopics out;
  size_t best = 0;
  double sum = 0.0;
  bool uniform = true;
  for (size_t t = 0; t < gamma.size(); ++t) {
    sum += gamma[t];
    if (gamma[t] > gamma[best]) best = t;
    if (gamma[t] != gamma[0]) uniform = false;
  }
  out.assigned = int(best);
  // Exactly 1/k at the symmetric fixed point, where summation error would
  // otherwise leak in.
  out.probability = uniform ? 1.0 / double(gamma.size()) : gamma[best] / sum;
  out.gamma = std::move(gamma);
  return out;
}

double log_sum_exp(const double* x, size_t n) {
  double m = *std::max_element(x, x + n);
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += std::exp(x[i] - m);
  return m + std::log(s);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

std::optional<uint32_t> Vocabulary::find(std::string_view term) const {
  auto it = index.find(std::string(term));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

void VocabularyOptions::validate() const {
  if (!(max_df > 0.0 && max_df <= 1.0)) throw ConfigError("max_df must lie in (0, 1]");
}

bool keep_term(uint32_t df, size_t n_docs, const VocabularyOptions& options) {
  if (df < options.min_df) return false;
  // df / n_docs > max_df, compared without dividing.
  return !(double(df) > options.max_df * double(n_docs));
}

std::pair<Vocabulary, DocTermMatrix> build_vocabulary(const std::vector<std::string>& texts,
                                                      const VocabularyOptions& options) {
  options.validate();
  std::vector<std::string> seen_order;
  std::unordered_map<std::string, uint32_t> df;
  for (const auto& text : texts) {
    auto tokens = split_whitespace(text);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& tok : tokens) {
      auto [it, inserted] = df.emplace(tok, 0);
      ++it->second;
    }
  }
  // First-occurrence order needs a second pass in text order.
  Vocabulary vocab;
  vocab.n_docs = texts.size();
  for (const auto& text : texts) {
    for (const auto& tok : split_whitespace(text)) {
      if (vocab.index.count(tok)) continue;
      auto it = df.find(tok);
      if (it == df.end() || !keep_term(it->second, texts.size(), options)) continue;
      vocab.index.emplace(tok, uint32_t(vocab.terms.size()));
      vocab.terms.push_back(tok);
      vocab.df.push_back(it->second);
    }
  }
  if (vocab.terms.empty())
    throw EmptyVocabularyError("no term survives the document-frequency thresholds");
  DocTermMatrix matrix;
  matrix.n_terms = vocab.size();
  matrix.docs.reserve(texts.size());
  for (const auto& text : texts) matrix.docs.push_back(count_terms(vocab, text));
  return {std::move(vocab), std::move(matrix)};
}

DocCounts count_terms(const Vocabulary& vocab, std::string_view text) {
  std::map<uint32_t, uint32_t> counts;
  for (const auto& tok : split_whitespace(text))
    if (auto id = vocab.find(tok)) ++counts[*id];
  return {counts.begin(), counts.end()};
}

void LdaConfig::validate() const {
  if (k < 2) throw ConfigError("k must be at least 2");
  if (!(doc_topic_prior() > 0.0) || !(topic_word_prior() > 0.0))
    throw ConfigError("priors must be positive");
  if (!(tau0 > 0.0)) throw ConfigError("tau0 must be positive");
  if (!(kappa > 0.5 && kappa <= 1.0)) throw ConfigError("kappa must lie in (0.5, 1]");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  if (epochs < 1) throw ConfigError("epochs must be positive");
  if (!(mean_change_tol > 0.0)) throw ConfigError("mean change tolerance must be positive");
  if (max_e_iters < 1) throw ConfigError("E-step iteration cap must be positive");
  if (top_n < 1) throw ConfigError("top_n must be positive");
}

LdaMethod parse_method(std::string_view name) {
  if (name == "online") return LdaMethod::kOnline;
  if (name == "batch") return LdaMethod::kBatch;
  throw ConfigError("unknown LDA method '" + std::string(name) + "'");
}

std::string_view method_name(LdaMethod method) {
  return method == LdaMethod::kOnline ? "online" : "batch";
}

double learning_rate(const LdaConfig& config, uint64_t t) {
  return std::pow(config.tau0 + double(t), -config.kappa);
}

TopicModel::TopicModel(Vocabulary vocab, LdaConfig config, std::vector<double> lambda)
    : vocab_(std::move(vocab)), config_(std::move(config)), lambda_(std::move(lambda)) {
  if (lambda_.size() != size_t(config_.k) * vocab_.size())
    throw ConfigError("lambda shape does not match k x V");
  exp_elog_beta_ = compute_exp_elog_beta(lambda_, config_.k, vocab_.size());
}

std::vector<double> TopicModel::normalized_row(int topic) const {
  const size_t v = num_terms();
  std::vector<double> row(lambda_.begin() + long(size_t(topic) * v),
                          lambda_.begin() + long(size_t(topic + 1) * v));
  double sum = 0.0;
  for (double x : row) sum += x;
  for (double& x : row) x /= sum;
  return row;
}

std::string TopicModel::serialize() const {
  const LdaConfig& c = config_;
  std::string out = "epiwatch-lda 1\n";
  out += "k " + std::to_string(c.k) + "\n";
  out += "alpha " + format_double(c.doc_topic_prior()) + "\n";
  out += "eta " + format_double(c.topic_word_prior()) + "\n";
  out += "tau0 " + format_double(c.tau0) + "\n";
  out += "kappa " + format_double(c.kappa) + "\n";
  out += "batch_size " + std::to_string(c.batch_size) + "\n";
  out += "epochs " + std::to_string(c.epochs) + "\n";
  out += "mean_change_tol " + format_double(c.mean_change_tol) + "\n";
  out += "max_e_iters " + std::to_string(c.max_e_iters) + "\n";
  out += "seed " + std::to_string(c.seed) + "\n";
  out += "top_n " + std::to_string(c.top_n) + "\n";
  out += "method " + std::string(method_name(c.method)) + "\n";
  out += "n_docs " + std::to_string(vocab_.n_docs) + "\n";
  out += "terms " + std::to_string(vocab_.size()) + "\n";
  for (size_t i = 0; i < vocab_.size(); ++i)
    out += vocab_.terms[i] + "\t" + std::to_string(vocab_.df[i]) + "\n";
  out += "lambda\n";
  const size_t v = num_terms();
  for (int t = 0; t < c.k; ++t) {
    for (size_t w = 0; w < v; ++w) {
      if (w) out += ' ';
      out += format_double(lambda_[size_t(t) * v + w]);
    }
    out += '\n';
  }
  return out;
}

void TopicModel::save(const std::filesystem::path& path) const {
  write_file(path, serialize());
}

TopicModel TopicModel::deserialize(std::string_view text) {
  auto lines = split(text, '\n');
  size_t at = 0;
  auto next_line = [&]() -> const std::string& {
    if (at >= lines.size()) throw FormatError(at + 1, "unexpected end of topic model");
    return lines[at++];
  };
  auto value = [&](std::string_view key) -> std::string {
    const std::string& line = next_line();
    if (!starts_with(line, std::string(key) + " "))
      throw FormatError(at, "expected '" + std::string(key) + "'");
    return line.substr(key.size() + 1);
  };
  auto number = [&](std::string_view key, auto& out) {
    if (!parse_number(value(key), out)) throw FormatError(at, "bad value for " + std::string(key));
  };

  if (next_line() != "epiwatch-lda 1") throw FormatError(1, "not a topic model file");
  LdaConfig c;
  double alpha = 0.0, eta = 0.0;
  size_t n_docs = 0, n_terms = 0;
  number("k", c.k);
  number("alpha", alpha);
  number("eta", eta);
  number("tau0", c.tau0);
  number("kappa", c.kappa);
  number("batch_size", c.batch_size);
  number("epochs", c.epochs);
  number("mean_change_tol", c.mean_change_tol);
  number("max_e_iters", c.max_e_iters);
  number("seed", c.seed);
  number("top_n", c.top_n);
  try {
    c.method = parse_method(value("method"));
  } catch (const ConfigError& e) {
    throw FormatError(at, e.what());
  }
  c.alpha = alpha;
  c.eta = eta;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(at, e.what());
  }
  number("n_docs", n_docs);
  number("terms", n_terms);
  Vocabulary vocab;
  vocab.n_docs = n_docs;
  for (size_t i = 0; i < n_terms; ++i) {
    auto fields = split(next_line(), '\t');
    uint32_t df = 0;
    if (fields.size() != 2 || fields[0].empty() || !parse_number(fields[1], df) ||
        vocab.index.count(fields[0]))
      throw FormatError(at, "bad vocabulary row");
    vocab.index.emplace(fields[0], uint32_t(i));
    vocab.terms.push_back(fields[0]);
    vocab.df.push_back(df);
  }
  if (next_line() != "lambda") throw FormatError(at, "expected 'lambda'");
  std::vector<double> lambda;
  lambda.reserve(size_t(c.k) * n_terms);
  for (int t = 0; t < c.k; ++t) {
    auto fields = split(next_line(), ' ');
    if (fields.size() != n_terms) throw FormatError(at, "wrong lambda row length");
    for (const auto& f : fields) {
      double x = 0.0;
      if (!parse_number(f, x) || !(x > 0.0)) throw FormatError(at, "bad lambda entry");
      lambda.push_back(x);
    }
  }
  return TopicModel(std::move(vocab), c, std::move(lambda));
}

TopicModel TopicModel::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

std::vector<double> initial_lambda(const LdaConfig& config, size_t n_terms) {
  Rng rng(config.seed);
  return draw_lambda(rng, config.k, n_terms);
}

TopicModel fit_lda(const Vocabulary& vocab, const DocTermMatrix& matrix,
                   const LdaConfig& config, FitTrace* trace) {
  config.validate();
  if (matrix.docs.empty()) throw EmptyCorpusError("no documents to fit");
  if (vocab.size() == 0) throw EmptyVocabularyError("vocabulary is empty");
  if (matrix.n_terms != vocab.size())
    throw ConfigError("matrix and vocabulary sizes differ");

  const size_t v = vocab.size();
  const size_t k = size_t(config.k);
  const size_t n_docs = matrix.docs.size();
  const double eta = config.topic_word_prior();

  Rng rng(config.seed);
  std::vector<double> lambda = draw_lambda(rng, config.k, v);
  std::vector<size_t> order(n_docs);
  std::iota(order.begin(), order.end(), size_t{0});

  // One variational update from the documents order[begin, end).
  auto update = [&](size_t begin, size_t end, double rho) {
    const std::vector<double> eeb = compute_exp_elog_beta(lambda, config.k, v);
    const EStepParams p{eeb.data(), v, config.k, config.doc_topic_prior(),
                        config.mean_change_tol, config.max_e_iters};
    const size_t batch = end - begin;
    std::vector<std::vector<double>> local(batch);
    parallel_for(batch, config.threads, [&](size_t i) {
      std::vector<double> gamma;
      e_step(matrix.docs[order[begin + i]], p, gamma, &local[i]);
    });
    std::vector<double> sstats(k * v, 0.0);
    for (size_t i = 0; i < batch; ++i) {
      const DocCounts& doc = matrix.docs[order[begin + i]];
      const size_t n = doc.size();
      for (size_t t = 0; t < k; ++t)
        for (size_t j = 0; j < n; ++j) sstats[t * v + doc[j].first] += local[i][t * n + j];
    }
    const double scale = double(n_docs) / double(batch);
    for (size_t idx = 0; idx < k * v; ++idx) {
      const double target = eta + scale * sstats[idx] * eeb[idx];
      lambda[idx] = rho == 1.0 ? target : (1.0 - rho) * lambda[idx] + rho * target;
    }
  };

  uint64_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.method == LdaMethod::kOnline) {
      rng.shuffle(order);
      const size_t batch = std::min(size_t(config.batch_size), n_docs);
      for (size_t begin = 0; begin < n_docs; begin += batch) {
        update(begin, std::min(n_docs, begin + batch), learning_rate(config, t));
        ++t;
      }
    } else {
      update(0, n_docs, 1.0);
    }
    if (trace) {
      TopicModel snapshot(vocab, config, lambda);
      trace->perplexity.push_back(perplexity(snapshot, matrix, config.threads));
    }
  }
  return TopicModel(vocab, config, std::move(lambda));
}

DocTopics infer_doc_topics(const TopicModel& model, const DocCounts& counts) {
  std::vector<double> gamma;
  e_step(counts, params_for(model), gamma, nullptr);
  return summarize(std::move(gamma));
}

std::vector<DocTopics> infer_all(const TopicModel& model, const DocTermMatrix& matrix,
                                 int threads) {
  std::vector<DocTopics> out(matrix.docs.size());
  parallel_for(matrix.docs.size(), threads,
               [&](size_t d) { out[d] = infer_doc_topics(model, matrix.docs[d]); });
  return out;
}

double perplexity(const TopicModel& model, const DocTermMatrix& matrix, int threads) {
  const size_t k = size_t(model.k());
  const size_t v = model.num_terms();
  const double alpha = model.config().doc_topic_prior();
  const double eta = model.config().topic_word_prior();
  const auto& lambda = model.lambda();

  std::vector<double> elog_beta(k * v), row_sums(k, 0.0);
  for (size_t t = 0; t < k; ++t) {
    for (size_t w = 0; w < v; ++w) row_sums[t] += lambda[t * v + w];
    const double psi_sum = digamma(row_sums[t]);
    for (size_t w = 0; w < v; ++w) elog_beta[t * v + w] = digamma(lambda[t * v + w]) - psi_sum;
  }

  const auto doc_topics = infer_all(model, matrix, threads);
  double score = 0.0;
  double words = 0.0;
  std::vector<double> elog_theta(k), terms(k);
  for (size_t d = 0; d < matrix.docs.size(); ++d) {
    const auto& gamma = doc_topics[d].gamma;
    double gsum = 0.0;
    for (double g : gamma) gsum += g;
    const double psi_gsum = digamma(gsum);
    for (size_t t = 0; t < k; ++t) elog_theta[t] = digamma(gamma[t]) - psi_gsum;
    for (const auto& [id, c] : matrix.docs[d]) {
      for (size_t t = 0; t < k; ++t) terms[t] = elog_theta[t] + elog_beta[t * v + id];
      score += double(c) * log_sum_exp(terms.data(), k);
      words += c;
    }
    for (size_t t = 0; t < k; ++t)
      score += (alpha - gamma[t]) * elog_theta[t] + std::lgamma(gamma[t]) - std::lgamma(alpha);
    score += std::lgamma(alpha * double(k)) - std::lgamma(gsum);
  }
  for (size_t t = 0; t < k; ++t) {
    for (size_t w = 0; w < v; ++w) {
      const double l = lambda[t * v + w];
      score += (eta - l) * elog_beta[t * v + w] + std::lgamma(l) - std::lgamma(eta);
    }
    score += std::lgamma(eta * double(v)) - std::lgamma(row_sums[t]);
  }
  if (words == 0.0) return std::numeric_limits<double>::infinity();
  return std::exp(-score / words);
}

std::vector<std::vector<TopWord>> top_words(const TopicModel& model, int top_n) {
  std::vector<std::vector<TopWord>> out;
  const size_t n = std::min(model.num_terms(), size_t(std::max(top_n, 0)));
  for (int t = 0; t < model.k(); ++t) {
    const auto row = model.normalized_row(t);
    std::vector<uint32_t> idx(row.size());
    std::iota(idx.begin(), idx.end(), 0u);
    std::partial_sort(idx.begin(), idx.begin() + long(n), idx.end(), [&](uint32_t a, uint32_t b) {
      return row[a] > row[b] || (row[a] == row[b] && a < b);
    });
    std::vector<TopWord> words;
    for (size_t i = 0; i < n; ++i)
      words.push_back({model.vocab().terms[idx[i]], idx[i], row[idx[i]]});
    out.push_back(std::move(words));
  }
  return out;
}

void assign_topics(const TopicModel& model, std::vector<Document>& docs, int threads) {
  parallel_for(docs.size(), threads, [&](size_t d) {
    DocTopics dt = infer_doc_topics(model, count_terms(model.vocab(), docs[d].cleaned_text));
    docs[d].topic = dt.assigned;
    docs[d].topic_probability = dt.probability;
  });
}

std::vector<TopicShare> topic_frequency(const std::vector<Document>& docs, int k) {
  std::vector<TopicShare> out(size_t(std::max(k, 0)));
  for (int t = 0; t < k; ++t) out[size_t(t)].topic = t;
  uint64_t n = 0;
  for (const auto& d : docs) {
    if (!d.topic) continue;
    if (*d.topic < 0 || *d.topic >= k) throw ConfigError("document topic out of range");
    ++out[size_t(*d.topic)].count;
    ++n;
  }
  // Each row is rounded on its own (halves up), so the column need not sum
  // to exactly 100.
  for (auto& s : out) s.percent = n == 0 ? 0 : (200 * s.count + n) / (2 * n);
  return out;
}

std::string format_topic_frequency(const std::vector<TopicShare>& shares) {
  std::string out = "topic\tdocuments\tpercent\n";
  for (const auto& s : shares)
    out += std::to_string(s.topic) + "\t" + std::to_string(s.count) + "\t" +
           std::to_string(s.percent) + "\n";
  return out;
}

RsdSample select_rsd(const std::vector<Document>& docs, int topic, double threshold,
                     size_t n, uint64_t seed) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw ConfigError("RSD threshold must lie in (0, 1]");
  std::vector<size_t> assigned, qualifying, rest;
  for (size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].topic != topic) continue;
    assigned.push_back(i);
    (docs[i].topic_probability.value_or(0.0) >= threshold ? qualifying : rest).push_back(i);
  }
  if (assigned.empty())
    throw NoAssignedDocumentsError("no documents assigned to topic " + std::to_string(topic));
  RsdSample out;
  if (qualifying.size() >= n) {
    Rng rng(seed);
    rng.shuffle(qualifying);
    out.documents.assign(qualifying.begin(), qualifying.begin() + long(n));
    return out;
  }
  out.fallback = true;
  out.documents = qualifying;
  std::stable_sort(rest.begin(), rest.end(), [&](size_t a, size_t b) {
    return *docs[a].topic_probability > *docs[b].topic_probability;
  });
  for (size_t i = 0; i < rest.size() && out.documents.size() < n; ++i)
    out.documents.push_back(rest[i]);
  return out;
}

std::vector<MonthTopics> monthly_side_topics(const std::vector<Document>& docs,
                                             const LdaConfig& base,
                                             const MonthlyOptions& options,
                                             Diagnostics* diagnostics) {
  std::vector<MonthTopics> out;
  if (docs.empty()) return out;
  std::map<std::string, std::vector<const Document*>> by_month;
  Days first = utc_day(docs.front().created_utc), last = first;
  for (const auto& d : docs) {
    Days day = utc_day(d.created_utc);
    first = std::min(first, day);
    last = std::max(last, day);
    by_month[month_key(day)].push_back(&d);
  }
  LdaConfig config = base;
  config.k = 2;
  auto skip = [&](MonthTopics& m, const std::string& why) {
    m.skipped = true;
    if (diagnostics) diagnostics->note("month " + m.month + " skipped: " + why);
  };
  for (Days month : months_in({first, last})) {
    MonthTopics m;
    m.month = month_key(month);
    auto it = by_month.find(m.month);
    std::vector<std::string> texts;
    if (it != by_month.end())
      for (const Document* d : it->second) texts.push_back(d->cleaned_text);
    m.n_docs = texts.size();
    if (m.n_docs < options.min_docs) {
      skip(m, std::to_string(m.n_docs) + " documents (minimum " +
                  std::to_string(options.min_docs) + ")");
    } else {
      try {
        auto [vocab, matrix] = build_vocabulary(texts, options.vocabulary);
        m.topics = top_words(fit_lda(vocab, matrix, config), config.top_n);
      } catch (const EmptyVocabularyError&) {
        skip(m, "empty vocabulary");
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace epiwatch::topics
