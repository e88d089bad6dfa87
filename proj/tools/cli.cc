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

#include "epiwatch/cli.h"

#include <algorithm>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "epiwatch/civil_time.h"
#include "epiwatch/corpus.h"
#include "epiwatch/error.h"
#include "epiwatch/io.h"
#include "epiwatch/nerdata.h"
#include "epiwatch/parallel.h"
#include "epiwatch/report.h"
#include "epiwatch/resources.h"
#include "epiwatch/sentiment.h"
#include "epiwatch/tagger.h"
#include "epiwatch/text_util.h"
#include "epiwatch/textprep.h"
#include "epiwatch/topics.h"

namespace epiwatch::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr char kDefaultFrom[] = "2020-03-01";
constexpr char kDefaultTo[] = "2020-08-31";

// Where a subcommand keeps its manifest, relative to its outputs.
enum class OutKind { kNone, kDirectory, kFile };

struct Command {
  CLI::App* app = nullptr;
  std::vector<std::string> inputs;  // option names whose values are input paths
  OutKind out_kind = OutKind::kNone;
  std::string out_option = "out";
  std::function<void()> precheck;
  std::function<void(std::ostream&)> body;
};

std::string option_name(const CLI::Option* opt) {
  const auto& names = opt->get_lnames();
  return names.empty() ? std::string() : names.front();
}

const CLI::Option* find_option(const CLI::App* app, const std::string& name) {
  for (const CLI::Option* opt : app->get_options())
    if (option_name(opt) == name) return opt;
  return nullptr;
}

std::string effective_value(const CLI::Option* opt) {
  const bool flag = opt->get_expected_max() == 0;
  if (flag) return opt->count() > 0 ? "true" : "false";
  if (opt->count() > 0) return join(opt->results(), ",");
  return opt->get_default_str();
}

json effective_config(const CLI::App* app) {
  json config = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = option_name(opt);
    if (name.empty() || name == "help" || name == "version") continue;
    config[name] = effective_value(opt);
  }
  return config;
}

topics::LdaConfig lda_from(int k, double offset, double kappa, int batch_size, int epochs,
                           double tol, int max_e_iters, uint64_t seed, int top,
                           const std::string& method, int threads) {
  topics::LdaConfig c;
  c.k = k;
  c.tau0 = offset;
  c.kappa = kappa;
  c.batch_size = batch_size;
  c.epochs = epochs;
  c.mean_change_tol = tol;
  c.max_e_iters = max_e_iters;
  c.seed = seed;
  c.top_n = top;
  c.method = topics::parse_method(method);
  c.threads = threads;
  c.validate();
  return c;
}

DateRange date_range(const std::string& from, const std::string& to) {
  DateRange r{parse_date(from), parse_date(to)};
  if (r.to < r.from) throw ConfigError("--from must not be after --to");
  return r;
}

// The run's own manifest does not count, so a copied manifest can be replayed
// into an otherwise empty directory.
void require_empty_or_force(const fs::path& dir, bool force, const std::string& own_manifest) {
  if (force || !fs::is_directory(dir)) return;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().filename() != own_manifest)
      throw IoError("refusing to write into non-empty directory " + dir.string() +
                    " (use --force)");
}

// All option storage lives here so the CLI11 bindings stay valid.
struct State {
  // ingest
  std::string dump, schema = "native", keywords_csv, ingest_from = kDefaultFrom,
                    ingest_to = kDefaultTo, subreddits_csv, ingest_out;
  bool skip_malformed = false;
  // stats
  std::string stats_docs, stats_out;
  // preprocess
  std::string pre_in, pre_out, stoplist, stages;
  int pre_threads = 1;
  // ner-build
  std::string build_sentences, build_docs, build_keywords, build_match = "prefix", build_out;
  size_t cap = 250;
  double split = 0.65;
  uint64_t build_seed = 0;
  bool pre_annotate = false;
  // ner-train
  std::string train_path, preset = "model1", dropout, model_out;
  int iters = 30, batch_min = 4, batch_max = 32;
  double batch_growth = 1.001;
  uint64_t train_seed = 0;
  // ner-eval
  std::string eval_model, eval_path, eval_out;
  // ner-tag
  std::string tag_model, tag_docs, tag_keywords, tag_out;
  int tag_threads = 1;
  // topics
  std::string topics_docs, topics_out, method = "online";
  int k = 5, batch_size = 128, epochs = 10, max_e_iters = 100, top = 15, topics_threads = 1;
  double max_df = 0.90, offset = 15.0, kappa = 0.7, tol = 1e-3;
  uint32_t min_df = 3;
  uint64_t topics_seed = 42;
  bool topics_force = false;
  // topics-monthly
  std::string monthly_docs, monthly_out, monthly_method = "online";
  size_t min_docs = 5;
  int m_batch_size = 128, m_epochs = 10, m_max_e_iters = 100, m_top = 15, monthly_threads = 1;
  double m_max_df = 0.90, m_offset = 15.0, m_kappa = 0.7, m_tol = 1e-3;
  uint32_t m_min_df = 3;
  uint64_t monthly_seed = 42;
  // sentiment
  std::string sent_docs, entity = "mask", lexicon, negators, themes, sent_out;
  size_t min_tokens = 3;
  int sent_threads = 1;
  // report
  std::string rep_docs, rep_mentions, rep_model, rep_entity = "mask", rep_lexicon,
                        rep_from = kDefaultFrom, rep_to = kDefaultTo, corpus_id = "corpus",
                        rep_out;
  size_t trend_top = 5;
  bool no_truncate = false, rep_force = false;
  int rep_threads = 1;
  // replay
  std::string manifest;
};

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {
    app_.option_defaults()->always_capture_default();
    app_.require_subcommand(1, 1);
    app_.fallthrough();
    app_.set_config("--config", "", "TOML file with option defaults; flags take precedence");
    app_.set_version_flag("--version", EPIWATCH_VERSION);
    add_ingest();
    add_stats();
    add_preprocess();
    add_ner_build();
    add_ner_train();
    add_ner_eval();
    add_ner_tag();
    add_topics();
    add_topics_monthly();
    add_sentiment();
    add_report();
    add_replay();
  }

  int run(const std::vector<std::string>& args) {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app_.parse(reversed);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        app_.exit(e, out_, err_);
        return kOk;
      }
      err_ << "error: " << e.what() << "\n";
      const CLI::App* failing = &app_;
      for (const CLI::App* sub : app_.get_subcommands()) failing = sub;
      err_ << failing->help();
      return kUsage;
    }
    for (auto& cmd : commands_) {
      if (!cmd.app->parsed()) continue;
      try {
        if (cmd.precheck) cmd.precheck();
        write_manifest(cmd, args);
        cmd.body(out_);
        return kOk;
      } catch (const ConfigError& e) {
        err_ << "error: " << e.what() << "\n";
        return kUsage;
      } catch (const std::exception& e) {
        err_ << "error: " << e.what() << "\n";
        return kDataError;
      }
    }
    return kUsage;
  }

 private:
  Command& add(const std::string& name, const std::string& description) {
    commands_.push_back({});
    commands_.back().app = app_.add_subcommand(name, description);
    return commands_.back();
  }

  void write_manifest(const Command& cmd, const std::vector<std::string>& args) {
    if (cmd.out_kind == OutKind::kNone) return;
    const CLI::Option* out_opt = find_option(cmd.app, cmd.out_option);
    if (!out_opt || out_opt->count() == 0) return;
    const fs::path out = effective_value(out_opt);
    const std::string sub = cmd.app->get_name();
    const fs::path path = cmd.out_kind == OutKind::kDirectory
                              ? out / (sub + ".manifest.json")
                              : fs::path(out.string() + ".manifest.json");
    json m;
    m["tool"] = "epiwatch";
    m["version"] = EPIWATCH_VERSION;
    m["subcommand"] = sub;
    m["argv"] = args;
    json config = effective_config(cmd.app);
    const std::string config_file = effective_value(find_option(&app_, "config"));
    m["config"] = config;
    json inputs = json::array();
    auto add_input = [&](const std::string& option, const std::string& p) {
      inputs.push_back({{"option", option}, {"path", p}, {"sha256", sha256_file(p)}});
    };
    if (!config_file.empty()) add_input("config", config_file);
    for (const auto& name : cmd.inputs) {
      const CLI::Option* opt = find_option(cmd.app, name);
      const std::string v = opt ? effective_value(opt) : "";
      if (!v.empty()) add_input(name, v);
    }
    m["inputs"] = inputs;
    json seeds = json::object();
    if (config.contains("seed")) seeds["seed"] = config["seed"];
    m["seeds"] = seeds;
    write_file(path, m.dump(2) + "\n");
  }

  void add_ingest() {
    State& s = s_;
    Command& c = add("ingest", "Parse a dump, filter by keywords/dates/subreddits, build documents");
    c.app->add_option("--dump", s.dump, "Newline-delimited record file")->required();
    c.app->add_option("--schema", s.schema, "Dump layout: native or pushshift");
    c.app->add_option("--keywords", s.keywords_csv, "Comma-separated keywords (default: shipped list)");
    c.app->add_option("--from", s.ingest_from, "First day, YYYY-MM-DD");
    c.app->add_option("--to", s.ingest_to, "Last day, YYYY-MM-DD");
    c.app->add_option("--subreddits", s.subreddits_csv, "Comma-separated subreddits (default: all)");
    c.app->add_flag("--skip-malformed", s.skip_malformed, "Skip unparseable lines instead of failing");
    c.app->add_option("--out", s.ingest_out, "Output directory")->required();
    c.inputs = {"dump"};
    c.out_kind = OutKind::kDirectory;
    c.body = [&s](std::ostream& out) {
      corpus::FilterSpec spec;
      spec.keywords = s.keywords_csv.empty() ? data_lines(resource("covid_keywords.txt"))
                                             : split_csv(s.keywords_csv);
      spec.dates = date_range(s.ingest_from, s.ingest_to);
      spec.subreddits = split_csv(s.subreddits_csv);
      spec.validate();
      Diagnostics diag;
      const auto records =
          corpus::parse_dump(s.dump, corpus::parse_schema(s.schema), {s.skip_malformed, &diag});
      const auto matched = corpus::filter_records(records, spec);
      const auto docs = corpus::assemble_documents(records, matched, {&spec, &diag});
      const fs::path dir = s.ingest_out;
      write_documents(dir / "documents.jsonl", docs);
      write_file(dir / "stats.tsv", corpus::format_stats_table(corpus::corpus_stats(docs)));
      std::string notes;
      for (const auto& m : diag.messages()) notes += m + "\n";
      write_file(dir / "diagnostics.txt", notes);
      out << records.size() << " records, " << matched.size() << " matched, " << docs.size()
          << " documents\n";
    };
  }

  void add_stats() {
    State& s = s_;
    Command& c = add("stats", "Print the per-subreddit corpus table");
    c.app->add_option("--docs", s.stats_docs, "Documents file")->required();
    c.app->add_option("--out", s.stats_out, "Also write the table to this file");
    c.inputs = {"docs"};
    c.out_kind = OutKind::kFile;
    c.body = [&s](std::ostream& out) {
      const std::string table =
          corpus::format_stats_table(corpus::corpus_stats(read_documents(fs::path(s.stats_docs))));
      out << table;
      if (!s.stats_out.empty()) write_file(s.stats_out, table);
    };
  }

  void add_preprocess() {
    State& s = s_;
    Command& c = add("preprocess", "Fill cleaned_text with the preprocessing pipeline");
    c.app->add_option("--in", s.pre_in, "Documents file")->required();
    c.app->add_option("--out", s.pre_out, "Output documents file")->required();
    c.app->add_option("--stoplist", s.stoplist, "Stopword file (default: shipped list)");
    c.app->add_option("--stages", s.stages, "Comma-separated stage order (default: LDA order)");
    c.app->add_option("--threads", s.pre_threads, "Worker threads")->check(CLI::PositiveNumber);
    c.inputs = {"in", "stoplist"};
    c.out_kind = OutKind::kFile;
    c.body = [&s](std::ostream& out) {
      textprep::Resources res = textprep::Resources::defaults();
      if (!s.stoplist.empty()) res.stoplist = textprep::parse_stoplist(read_file(s.stoplist));
      auto config = s.stages.empty() ? textprep::PipelineConfig::lda_default()
                                     : textprep::PipelineConfig::parse(s.stages);
      config.validate();
      const textprep::Pipeline pipeline(config, res);
      auto docs = read_documents(fs::path(s.pre_in));
      parallel_for(docs.size(), s.pre_threads,
                   [&](size_t i) { textprep::preprocess_document(docs[i], pipeline); });
      write_documents(fs::path(s.pre_out), docs);
      out << docs.size() << " documents preprocessed (" << config.to_string() << ")\n";
    };
  }

  void add_ner_build() {
    State& s = s_;
    Command& c = add("ner-build", "Extract keyword sentences and split them into train/eval sets");
    auto* src = c.app->add_option("--sentences", s.build_sentences, "One sentence per line");
    auto* docs = c.app->add_option("--docs", s.build_docs, "Documents file to take sentences from");
    src->excludes(docs);
    c.app->add_option("--keywords", s.build_keywords, "CATEGORY<TAB>keyword file (default: shipped)");
    c.app->add_option("--cap", s.cap, "Maximum sentences per keyword");
    c.app->add_option("--split", s.split, "Training fraction");
    c.app->add_option("--seed", s.build_seed, "Shuffle seed");
    c.app->add_option("--match", s.build_match, "Keyword match mode: prefix or substring");
    c.app->add_flag("--pre-annotate", s.pre_annotate, "Tag keyword tokens as unit entities");
    c.app->add_option("--out", s.build_out, "Output directory")->required();
    c.inputs = {"sentences", "docs", "keywords"};
    c.out_kind = OutKind::kDirectory;
    c.body = [&s](std::ostream& out) {
      std::vector<std::string> sentences;
      if (!s.build_sentences.empty()) {
        for (const auto& line : split(read_file(s.build_sentences), '\n'))
          if (!trim(line).empty()) sentences.push_back(std::string(trim(line)));
      } else if (!s.build_docs.empty()) {
        sentences = corpus::dedup_sentences(
            corpus::document_sentences(read_documents(fs::path(s.build_docs))));
      } else {
        throw ConfigError("one of --sentences or --docs is required");
      }
      auto spec = s.build_keywords.empty() ? nerdata::KeywordSpec::defaults()
                                           : nerdata::KeywordSpec::parse(read_file(s.build_keywords));
      spec.cap = s.cap;
      if (s.build_match == "prefix") {
        spec.mode = nerdata::MatchMode::kTokenPrefix;
      } else if (s.build_match == "substring") {
        spec.mode = nerdata::MatchMode::kSubstring;
      } else {
        throw ConfigError("--match must be prefix or substring");
      }
      spec.validate();
      const auto ds = nerdata::build_ner_dataset(sentences, spec, {s.split, s.build_seed, s.pre_annotate});
      const fs::path dir = s.build_out;
      nerdata::write_annotations(dir / "train.bilou", ds.train);
      nerdata::write_annotations(dir / "eval.bilou", ds.eval);
      auto cats = nerdata::default_categories();
      for (const auto& cat : spec.categories()) cats.insert(cat);
      write_file(dir / "labels.tsv",
                 nerdata::format_label_table(nerdata::count_labels(ds.train, cats),
                                             nerdata::count_labels(ds.eval, cats)));
      out << ds.train.size() << " training and " << ds.eval.size() << " evaluation sentences\n";
    };
  }

  void add_ner_train() {
    State& s = s_;
    Command& c = add("ner-train", "Train the BILOU tagger");
    c.app->add_option("--train", s.train_path, "Annotation file")->required();
    c.app->add_option("--preset", s.preset, "model1, model2 or model3");
    c.app->add_option("--iters", s.iters, "Training iterations (overrides the preset)");
    c.app->add_option("--batch-min", s.batch_min, "Smallest batch (overrides the preset)");
    c.app->add_option("--batch-max", s.batch_max, "Largest batch (overrides the preset)");
    c.app->add_option("--batch-growth", s.batch_growth, "Per-batch growth factor");
    c.app->add_option("--dropout", s.dropout, "Dropout s or s:e (linear decay)");
    c.app->add_option("--seed", s.train_seed, "Training seed");
    c.app->add_option("--model", s.model_out, "Model file to write")->required();
    c.inputs = {"train"};
    c.out_kind = OutKind::kFile;
    c.out_option = "model";
    CLI::App* app = c.app;
    c.body = [&s, app](std::ostream& out) {
      tagger::TrainConfig config;
      if (s.preset == "model1") {
        config = tagger::TrainConfig::model1();
      } else if (s.preset == "model2") {
        config = tagger::TrainConfig::model2();
      } else if (s.preset == "model3") {
        config = tagger::TrainConfig::model3();
      } else {
        throw ConfigError("unknown preset '" + s.preset + "'");
      }
      auto given = [app](const char* name) { return find_option(app, name)->count() > 0; };
      if (given("iters")) config.iterations = s.iters;
      if (given("batch-min")) config.batch_min = s.batch_min;
      if (given("batch-max")) config.batch_max = s.batch_max;
      if (given("batch-growth")) config.batch_growth = s.batch_growth;
      if (!s.dropout.empty()) {
        const auto parts = split(s.dropout, ':');
        try {
          if (parts.size() > 2) throw std::invalid_argument("too many parts");
          config.dropout_start = std::stod(parts[0]);
          config.dropout_end = parts.size() == 2 ? std::stod(parts[1]) : config.dropout_start;
        } catch (const std::logic_error&) {
          throw ConfigError("--dropout expects s or s:e");
        }
      }
      config.seed = s.train_seed;
      config.validate();
      const auto train = nerdata::read_annotations(fs::path(s.train_path), {});
      const auto model = tagger::train_tagger(train, config);
      model.save(s.model_out);
      out << "trained on " << train.size() << " sentences, " << model.num_features()
          << " features\n";
    };
  }

  void add_ner_eval() {
    State& s = s_;
    Command& c = add("ner-eval", "Span-level precision, recall and F1");
    c.app->add_option("--model", s.eval_model, "Model file")->required();
    c.app->add_option("--eval", s.eval_path, "Annotation file")->required();
    c.app->add_option("--out", s.eval_out, "Also write the report to this file");
    c.inputs = {"model", "eval"};
    c.out_kind = OutKind::kFile;
    c.body = [&s](std::ostream& out) {
      const auto model = tagger::TaggerModel::load(s.eval_model);
      const auto report =
          tagger::evaluate_tagger(model, nerdata::read_annotations(fs::path(s.eval_path), {}));
      out << report.format();
      if (!s.eval_out.empty()) write_file(s.eval_out, report.format());
    };
  }

  void add_ner_tag() {
    State& s = s_;
    Command& c = add("ner-tag", "Detect, normalize and count entities in documents");
    c.app->add_option("--model", s.tag_model, "Model file")->required();
    c.app->add_option("--docs", s.tag_docs, "Documents file")->required();
    c.app->add_option("--keywords", s.tag_keywords, "Keyword file used to join multi-word terms");
    c.app->add_option("--threads", s.tag_threads, "Worker threads")->check(CLI::PositiveNumber);
    c.app->add_option("--out", s.tag_out, "Output directory")->required();
    c.inputs = {"model", "docs", "keywords"};
    c.out_kind = OutKind::kDirectory;
    c.body = [&s](std::ostream& out) {
      const auto model = tagger::TaggerModel::load(s.tag_model);
      const auto docs = read_documents(fs::path(s.tag_docs));
      const auto spec = s.tag_keywords.empty()
                            ? nerdata::KeywordSpec::defaults()
                            : nerdata::KeywordSpec::parse(read_file(s.tag_keywords));
      tagger::DetectOptions options;
      options.join_keywords = &spec;
      options.threads = s.tag_threads;
      const auto mentions = tagger::detect_entities(model, docs, options);
      const fs::path dir = s.tag_out;
      write_file(dir / "mentions.tsv", tagger::format_mentions(mentions));
      write_file(dir / "entity_counts.tsv",
                 tagger::format_counts(tagger::count_entities(mentions)));
      out << mentions.size() << " entity mentions in " << docs.size() << " documents\n";
    };
  }

  void add_lda_options(CLI::App* app, int* batch_size, int* epochs, double* offset,
                       double* kappa, double* tol, int* max_e_iters, uint64_t* seed, int* top,
                       std::string* method, double* max_df, uint32_t* min_df, int* threads) {
    app->add_option("--max-df", *max_df, "Drop terms in more than this fraction of documents");
    app->add_option("--min-df", *min_df, "Drop terms in fewer than this many documents");
    app->add_option("--offset", *offset, "Learning offset tau0");
    app->add_option("--kappa", *kappa, "Learning decay");
    app->add_option("--batch-size", *batch_size, "Documents per minibatch");
    app->add_option("--epochs", *epochs, "Passes over the corpus");
    app->add_option("--tol", *tol, "E-step mean change tolerance");
    app->add_option("--max-e-iters", *max_e_iters, "E-step iteration cap");
    app->add_option("--seed", *seed, "Random seed");
    app->add_option("--top", *top, "Keywords per topic");
    app->add_option("--method", *method, "online or batch");
    app->add_option("--threads", *threads, "Worker threads")->check(CLI::PositiveNumber);
  }

  void add_topics() {
    State& s = s_;
    Command& c = add("topics", "Fit LDA, assign topics and export keyword artifacts");
    c.app->add_option("--docs", s.topics_docs, "Preprocessed documents file")->required();
    c.app->add_option("--k", s.k, "Number of topics");
    add_lda_options(c.app, &s.batch_size, &s.epochs, &s.offset, &s.kappa, &s.tol, &s.max_e_iters,
                    &s.topics_seed, &s.top, &s.method, &s.max_df, &s.min_df, &s.topics_threads);
    c.app->add_flag("--force", s.topics_force, "Write into a non-empty directory");
    c.app->add_option("--out", s.topics_out, "Output directory")->required();
    c.inputs = {"docs"};
    c.out_kind = OutKind::kDirectory;
    c.precheck = [&s] { require_empty_or_force(s.topics_out, s.topics_force, "topics.manifest.json"); };
    c.body = [&s](std::ostream& out) {
      const auto config = lda_from(s.k, s.offset, s.kappa, s.batch_size, s.epochs, s.tol,
                                   s.max_e_iters, s.topics_seed, s.top, s.method, s.topics_threads);
      auto docs = read_documents(fs::path(s.topics_docs));
      std::vector<std::string> texts;
      for (const auto& d : docs) texts.push_back(d.cleaned_text);
      const auto [vocab, matrix] = topics::build_vocabulary(texts, {s.max_df, s.min_df});
      topics::FitTrace trace;
      const auto model = topics::fit_lda(vocab, matrix, config, &trace);
      const fs::path dir = s.topics_out;
      model.save(dir / "model.lda");
      std::string perp = "epoch\tperplexity\n";
      for (size_t e = 0; e < trace.perplexity.size(); ++e)
        perp += std::to_string(e + 1) + "\t" + format_fixed(trace.perplexity[e], 6) + "\n";
      write_file(dir / "perplexity.tsv", perp);
      std::string matrix_text = "term";
      for (int t = 0; t < model.k(); ++t) matrix_text += "\ttopic_" + std::to_string(t);
      matrix_text += "\n";
      std::vector<std::vector<double>> rows;
      for (int t = 0; t < model.k(); ++t) rows.push_back(model.normalized_row(t));
      for (size_t w = 0; w < model.num_terms(); ++w) {
        matrix_text += vocab.terms[w];
        for (const auto& row : rows) matrix_text += "\t" + format_double(row[w]);
        matrix_text += "\n";
      }
      write_file(dir / "topic_word.tsv", matrix_text);
      topics::assign_topics(model, docs, config.threads);
      report::export_topic_artifacts(model, docs, dir, {config.top_n, true});
      out << docs.size() << " documents, " << vocab.size() << " terms, k=" << config.k << "\n";
    };
  }

  void add_topics_monthly() {
    State& s = s_;
    Command& c = add("topics-monthly", "Fit k=2 topics on each calendar month");
    c.app->add_option("--docs", s.monthly_docs, "Preprocessed documents file")->required();
    c.app->add_option("--min-docs", s.min_docs, "Skip months with fewer documents");
    add_lda_options(c.app, &s.m_batch_size, &s.m_epochs, &s.m_offset, &s.m_kappa, &s.m_tol,
                    &s.m_max_e_iters, &s.monthly_seed, &s.m_top, &s.monthly_method, &s.m_max_df,
                    &s.m_min_df, &s.monthly_threads);
    c.app->add_option("--out", s.monthly_out, "Output directory")->required();
    c.inputs = {"docs"};
    c.out_kind = OutKind::kDirectory;
    c.body = [&s](std::ostream& out) {
      const auto config = lda_from(2, s.m_offset, s.m_kappa, s.m_batch_size, s.m_epochs, s.m_tol,
                                   s.m_max_e_iters, s.monthly_seed, s.m_top, s.monthly_method,
                                   s.monthly_threads);
      const auto docs = read_documents(fs::path(s.monthly_docs));
      Diagnostics diag;
      const auto months =
          topics::monthly_side_topics(docs, config, {s.min_docs, {s.m_max_df, s.m_min_df}}, &diag);
      std::string table = "month\tdocuments\tstatus\ttopic\trank\tterm\tweight\n";
      for (const auto& m : months) {
        const std::string head = m.month + "\t" + std::to_string(m.n_docs) + "\t";
        if (m.skipped) {
          table += head + "skipped\t\t\t\t\n";
          continue;
        }
        for (size_t t = 0; t < m.topics.size(); ++t)
          for (size_t r = 0; r < m.topics[t].size(); ++r)
            table += head + "fitted\t" + std::to_string(t) + "\t" + std::to_string(r + 1) + "\t" +
                     m.topics[t][r].term + "\t" + format_fixed(m.topics[t][r].weight, 6) + "\n";
      }
      const fs::path dir = s.monthly_out;
      write_file(dir / "monthly_topics.tsv", table);
      std::string notes;
      for (const auto& n : diag.messages()) notes += n + "\n";
      write_file(dir / "diagnostics.txt", notes);
      out << months.size() << " months, " << diag.messages().size() << " skipped\n";
    };
  }

  void add_sentiment() {
    State& s = s_;
    Command& c = add("sentiment", "Score sentences mentioning an entity");
    c.app->add_option("--docs", s.sent_docs, "Documents file")->required();
    c.app->add_option("--entity", s.entity, "Entity keyword");
    c.app->add_option("--lexicon", s.lexicon, "token<TAB>valence file (default: shipped)");
    c.app->add_option("--negators", s.negators, "Negator word list (default: shipped)");
    c.app->add_option("--min-tokens", s.min_tokens, "Shorter sentences count as incomplete");
    c.app->add_option("--themes", s.themes, "sentence_id<TAB>theme file to tally");
    c.app->add_option("--threads", s.sent_threads, "Worker threads")->check(CLI::PositiveNumber);
    c.app->add_option("--out", s.sent_out, "Output directory")->required();
    c.inputs = {"docs", "lexicon", "negators", "themes"};
    c.out_kind = OutKind::kDirectory;
    c.body = [&s](std::ostream& out) {
      const auto lexicon = s.lexicon.empty() ? sentiment::Lexicon::defaults()
                                             : sentiment::Lexicon::parse(read_file(s.lexicon));
      const auto negators = s.negators.empty()
                                ? sentiment::Negators::defaults()
                                : sentiment::Negators::parse(read_file(s.negators));
      sentiment::AnalyzeOptions options;
      options.min_tokens = s.min_tokens;
      options.threads = s.sent_threads;
      const auto report = sentiment::analyze_entity_sentences(read_documents(fs::path(s.sent_docs)),
                                                              s.entity, lexicon, negators, options);
      const fs::path dir = s.sent_out;
      write_file(dir / "summary.tsv", report.format_summary());
      write_file(dir / "sentences.tsv", report.format_sentences());
      if (!s.themes.empty())
        write_file(dir / "themes.tsv",
                   sentiment::format_theme_table(sentiment::theme_tally(read_file(s.themes))));
      out << report.format_summary();
    };
  }

  void add_report() {
    State& s = s_;
    Command& c = add("report", "Write the aggregate tables for one corpus");
    c.app->add_option("--docs", s.rep_docs, "Documents file (with topics if available)")->required();
    c.app->add_option("--mentions", s.rep_mentions, "mentions.tsv from ner-tag");
    c.app->add_option("--topic-model", s.rep_model, "model.lda from topics");
    c.app->add_option("--entity", s.rep_entity, "Entity for the sentiment tables");
    c.app->add_option("--lexicon", s.rep_lexicon, "Sentiment lexicon (default: shipped)");
    c.app->add_option("--from", s.rep_from, "First day, YYYY-MM-DD");
    c.app->add_option("--to", s.rep_to, "Last day, YYYY-MM-DD");
    c.app->add_option("--corpus-id", s.corpus_id, "Name of the per-corpus output directory");
    c.app->add_option("--trend-top", s.trend_top, "Entities in the monthly trend table");
    c.app->add_flag("--no-truncate", s.no_truncate, "List every entity, not just the top rows");
    c.app->add_option("--threads", s.rep_threads, "Worker threads")->check(CLI::PositiveNumber);
    c.app->add_flag("--force", s.rep_force, "Write into a non-empty directory");
    c.app->add_option("--out", s.rep_out, "Output root directory")->required();
    c.inputs = {"docs", "mentions", "topic-model", "lexicon"};
    c.out_kind = OutKind::kDirectory;
    c.precheck = [&s] {
      if (s.corpus_id.empty() || s.corpus_id.find('/') != std::string::npos ||
          s.corpus_id == "." || s.corpus_id == "..")
        throw ConfigError("--corpus-id must be a plain directory name");
      require_empty_or_force(fs::path(s.rep_out) / s.corpus_id, s.rep_force, "");
    };
    c.body = [&s](std::ostream& out) {
      const DateRange range = date_range(s.rep_from, s.rep_to);
      auto docs = read_documents(fs::path(s.rep_docs));
      const fs::path root = fs::path(s.rep_out) / s.corpus_id;

      write_file(root / "stats" / "stats.tsv",
                 corpus::format_stats_table(corpus::corpus_stats(docs)));
      write_file(root / "weekly" / "weekly_posts.tsv",
                 report::format_weekly(report::weekly_post_counts_by_subreddit(docs, range)));

      std::vector<std::string> subreddits;
      for (const auto& d : docs) subreddits.push_back(d.subreddit);
      std::sort(subreddits.begin(), subreddits.end());
      subreddits.erase(std::unique(subreddits.begin(), subreddits.end()), subreddits.end());
      if (!s.rep_mentions.empty()) {
        const auto mentions = tagger::parse_mentions(read_file(s.rep_mentions));
        const auto counts = tagger::count_entities(mentions);
        write_file(root / "entities" / "entity_counts.tsv", tagger::format_counts(counts));
        write_file(root / "entities" / "entity_report.tsv",
                   report::format_entity_report(
                       report::entity_report(counts, {!s.no_truncate, subreddits})));
        write_file(root / "monthly" / "entity_trends.tsv",
                   report::format_monthly(
                       report::monthly_entity_trends(mentions, range, {}, s.trend_top), range));
      }
      if (!s.rep_model.empty()) {
        const auto model = topics::TopicModel::load(s.rep_model);
        const bool assigned = std::all_of(docs.begin(), docs.end(),
                                          [](const Document& d) { return d.topic.has_value(); });
        if (!assigned) topics::assign_topics(model, docs, s.rep_threads);
        report::export_topic_artifacts(model, docs, root / "topics", {model.config().top_n, true});
      }
      const auto lexicon = s.rep_lexicon.empty()
                               ? sentiment::Lexicon::defaults()
                               : sentiment::Lexicon::parse(read_file(s.rep_lexicon));
      sentiment::AnalyzeOptions options;
      options.threads = s.rep_threads;
      const auto sent = sentiment::analyze_entity_sentences(
          docs, s.rep_entity, lexicon, sentiment::Negators::defaults(), options);
      write_file(root / "sentiment" / "summary.tsv", sent.format_summary());
      write_file(root / "sentiment" / "sentences.tsv", sent.format_sentences());
      out << "report written to " << root.string() << "\n";
    };
  }

  void add_replay() {
    State& s = s_;
    Command& c = add("replay", "Verify a run manifest's inputs and run it again");
    c.app->add_option("--manifest", s.manifest, "Manifest file")->required();
    c.body = [this, &s](std::ostream&) {
      json m;
      try {
        m = json::parse(read_file(s.manifest));
      } catch (const json::exception& e) {
        throw FormatError(1, std::string("manifest is not valid JSON: ") + e.what());
      }
      if (!m.is_object() || m.value("tool", "") != "epiwatch" || !m.contains("argv"))
        throw FormatError(1, "not an epiwatch run manifest");
      for (const auto& input : m.value("inputs", json::array())) {
        const std::string path = input.at("path");
        if (!fs::exists(path)) throw IoError("manifest input missing: " + path);
        if (sha256_file(path) != input.at("sha256").get<std::string>())
          throw IoError("manifest input changed since the recorded run: " + path);
      }
      const auto argv = m.at("argv").get<std::vector<std::string>>();
      if (!argv.empty() && argv.front() == "replay")
        throw ConfigError("a manifest cannot replay another replay");
      replay_code_ = cli::run(argv, out_, err_);
      if (replay_code_ != kOk) throw Error("replayed command failed");
    };
  }

  std::ostream& out_;
  std::ostream& err_;
  CLI::App app_{"Keyword-filtered Reddit corpus analysis: entities, topics, sentiment", "epiwatch"};
  State s_;
  std::vector<Command> commands_;
  int replay_code_ = kOk;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto cli = std::make_unique<Cli>(out, err);
  return cli->run(args);
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace epiwatch::cli
