// Copyright 2026 The Causalx Authors.
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

#include "causalx/cli.h"

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "causalx/annotation_service.h"
#include "causalx/annotation_store.h"
#include "causalx/container.h"
#include "causalx/corpus.h"
#include "causalx/datasets.h"
#include "causalx/embedding_classifier.h"
#include "causalx/error.h"
#include "causalx/evaluation.h"
#include "causalx/features.h"
#include "causalx/lime_explainer.h"
#include "causalx/sequence_tagger.h"
#include "causalx/synthetic.h"

namespace causalx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
  std::uint64_t seed = 42;
  std::string in;
  std::string out;
  std::string corpus;
  std::string store;
  std::string model;
  std::string model_out;
  std::string format;
  // train-hypothesis
  int ngrams = 1;
  double lr = 0.1;
  int dim = 120;
  std::string loss = "negative_sampling";
  int epochs = 25;
  int neg = 5;
  double train_fraction = 0.8;
  // synth
  int n_per_class = 500;
  // explain
  std::string sentence;
  int samples = 500;
  std::string label = "hypothesis";
  bool exhaustive = false;
  // train-causality
  std::string features = "bow";
  std::string linear = "logistic";
  // train-tagger
  int hidden = 3;
  int embed_dim = 32;
  int batch = 32;
  int tagger_epochs = 60;
  std::string curve_out;
  // evaluate
  std::string task;
  std::string split = "all";
  // export
  std::string kind;
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
};

void Emit(const Flags& f, std::string_view text, std::ostream& out) {
  if (f.out.empty()) {
    out << text;
  } else {
    WriteFile(f.out, text);
  }
}

std::vector<Document> LoadInputs(const std::string& path) {
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.emplace_back(path);
  }
  std::vector<Document> docs;
  for (const auto& p : files) {
    docs.push_back(
        CleanText(LoadDocument(p.stem().string(), ReadFile(p.string()))));
  }
  return docs;
}

std::vector<Sentence> AllSentences(const std::vector<Document>& docs) {
  std::vector<Sentence> out;
  for (const auto& d : docs) {
    auto s = SegmentSentences(d);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

LabeledCorpus ReadCorpus(const std::string& path) {
  return ParseJsonl(ReadFile(path));
}

template <typename T>
std::vector<std::string> LabelsOf(const std::vector<T>& rows) {
  std::vector<std::string> labels;
  for (const auto& r : rows) labels.push_back(r.label);
  return labels;
}

SplitSpec Split(const Flags& f, bool stratify = true) {
  return SplitSpec{f.train_fraction, f.seed, stratify};
}

template <typename T>
std::pair<std::vector<T>, std::vector<T>> SplitRows(const std::vector<T>& rows,
                                                    const SplitIndices& idx) {
  return {Gather<T>(rows, idx.train), Gather<T>(rows, idx.test)};
}

SplitIndices TaggingSplit(const LabeledCorpus& c, const Flags& f) {
  std::vector<std::string> none(c.tagging.size());
  return StratifiedSplit(none, Split(f, false));
}

int CmdIngest(const Flags& f, std::ostream& out) {
  std::string text;
  for (const Sentence& s : AllSentences(LoadInputs(f.in))) {
    text += ToJson(s).dump() + "\n";
  }
  Emit(f, text, out);
  return kExitOk;
}

int CmdExtract(const Flags& f, std::ostream& out) {
  const auto sentences = AllSentences(LoadInputs(f.in));
  std::string text;
  for (const Candidate& c : ExtractCandidates(sentences)) {
    text += c.sentence.sentence_id + "\t" + c.marker + "\t" + c.sentence.text +
            "\n";
  }
  Emit(f, text, out);
  return kExitOk;
}

int CmdStats(const Flags& f, std::ostream& out) {
  json report;
  if (!f.store.empty()) {
    AnnotationStore store(f.store);
    report = ToJson(store.Stats());
  } else {
    // unlabeled text: hypotheses stay at zero, marker matches are reported
    const auto sentences = AllSentences(LoadInputs(f.in));
    report = ToJson(ComputeCorpusStats(sentences, {}));
    report["n_candidates"] = ExtractCandidates(sentences).size();
  }
  Emit(f, report.dump(2) + "\n", out);
  return kExitOk;
}

int CmdSynth(const Flags& f, std::ostream& out) {
  Emit(f, ToJsonl(GenerateSynthetic(f.seed, f.n_per_class)), out);
  return kExitOk;
}

ClassifierConfig HypothesisConfig(const Flags& f) {
  ClassifierConfig c;
  c.ngram_order = f.ngrams;
  c.learning_rate = f.lr;
  c.dim = f.dim;
  c.loss = ParseLossKind(f.loss);
  c.epochs = f.epochs;
  c.neg_samples = f.neg;
  c.seed = f.seed;
  c.Validate();
  return c;
}

int CmdTrainHypothesis(const Flags& f, std::ostream& out) {
  const LabeledCorpus c = ReadCorpus(f.corpus);
  const auto idx = StratifiedSplit(LabelsOf(c.hypothesis), Split(f));
  auto [train, test] = SplitRows(c.hypothesis, idx);
  const auto model =
      TrainClassifier(HypothesisTrainingData(train), HypothesisConfig(f));
  json report = EvaluateHypothesisClassifier(model, test).ToJson();
  report["n_train"] = train.size();
  report["config"] = model.config.ToJson();
  if (!f.model_out.empty()) SaveContainer(ToContainer(model), f.model_out);
  Emit(f, report.dump(2) + "\n", out);
  return kExitOk;
}

int CmdGrid(const Flags& f, std::ostream& out) {
  const LabeledCorpus c = ReadCorpus(f.corpus);
  const auto grid = DefaultGrid(f.seed);
  const GridReport report = RunGrid(c.hypothesis, grid, Split(f));
  if (f.format == "text") {
    Emit(f, report.ToText(), out);
  } else if (f.format == "json") {
    Emit(f, report.ToJson().dump(2) + "\n", out);
  } else {
    Emit(f, report.ToCsv(), out);
  }
  return kExitOk;
}

int CmdExplain(const Flags& f, std::ostream& out) {
  const auto model = ClassifierFromContainer(LoadContainer(f.model));
  const int label = model.LabelIndex(f.label);
  ScoreFn score = [&](const std::string& text) {
    const auto tokens = TokenizeToStrings(text);
    return Predict(model, tokens).probabilities[label];
  };
  LimeOptions o;
  o.n_samples = f.samples;
  o.seed = f.seed;
  o.exhaustive = f.exhaustive;
  o.label = f.label;
  Emit(f, ToJson(Explain(score, std::string_view(f.sentence), o)).dump(2) + "\n",
       out);
  return kExitOk;
}

int CmdTrainCausality(const Flags& f, std::ostream& out) {
  const LabeledCorpus c = ReadCorpus(f.corpus);
  const auto idx = StratifiedSplit(LabelsOf(c.causality), Split(f));
  auto [train, test] = SplitRows(c.causality, idx);
  CausalityOptions o;
  o.features = ParseCausalityFeatures(f.features);
  o.model = ParseLinearKind(f.linear);
  o.seed = f.seed;
  const auto pipeline = TrainCausality(train, o);
  const auto report = EvaluateCausality(pipeline, test, train.size());
  if (!f.model_out.empty()) SaveContainer(ToContainer(pipeline), f.model_out);
  Emit(f, report.ToJson().dump(2) + "\n", out);
  return kExitOk;
}

TaggerConfig TaggerFlags(const Flags& f) {
  TaggerConfig t;
  t.embed_dim = f.embed_dim;
  t.hidden_units = f.hidden;
  t.batch_size = f.batch;
  t.epochs = f.tagger_epochs;
  t.seed = f.seed;
  t.Validate();
  return t;
}

int CmdTrainTagger(const Flags& f, std::ostream& out) {
  const LabeledCorpus c = ReadCorpus(f.corpus);
  auto [train, test] = SplitRows(c.tagging, TaggingSplit(c, f));
  const Vocabulary vocab = TaggingVocab(train);
  const auto train_seq = EncodeTagging(train, vocab);
  const auto test_seq = EncodeTagging(test, vocab);
  const auto trained = TrainTagger(vocab, train_seq, test_seq, TaggerFlags(f));
  json report = EvaluateTagger(trained.model, test_seq).ToJson();
  report["n_train"] = train.size();
  report["hidden_units"] = f.hidden;
  if (!f.curve_out.empty()) WriteFile(f.curve_out, trained.curve.ToCsv());
  if (!f.model_out.empty()) {
    SaveContainer(ToContainer(trained.model), f.model_out);
  }
  Emit(f, report.dump(2) + "\n", out);
  return kExitOk;
}

int CmdEvaluate(const Flags& f, std::ostream& out) {
  const LabeledCorpus c = ReadCorpus(f.corpus);
  const Container container = LoadContainer(f.model);
  const bool test_only = f.split == "test";
  json report;
  if (f.task == "hypothesis") {
    auto rows = c.hypothesis;
    if (test_only) {
      rows = SplitRows(rows, StratifiedSplit(LabelsOf(rows), Split(f))).second;
    }
    report = EvaluateHypothesisClassifier(ClassifierFromContainer(container),
                                          rows)
                 .ToJson();
  } else if (f.task == "causality") {
    auto rows = c.causality;
    if (test_only) {
      rows = SplitRows(rows, StratifiedSplit(LabelsOf(rows), Split(f))).second;
    }
    report = EvaluateCausality(CausalityFromContainer(container), rows, 0)
                 .ToJson();
  } else {
    auto rows = c.tagging;
    if (test_only) rows = SplitRows(rows, TaggingSplit(c, f)).second;
    const TaggerModel model = TaggerFromContainer(container);
    report = EvaluateTagger(model, EncodeTagging(rows, model.vocab)).ToJson();
  }
  Emit(f, report.dump(2) + "\n", out);
  return kExitOk;
}

int CmdExport(const Flags& f, std::ostream& out) {
  AnnotationStore store(f.store);
  Emit(f,
       store.ExportDataset(ParseExportKind(f.kind),
                           ParseExportFormat(f.format.empty() ? "jsonl"
                                                              : f.format),
                           f.seed),
       out);
  return kExitOk;
}

AnnotationServer* g_server = nullptr;

void HandleSignal(int) {
  if (g_server) g_server->Stop();
}

int CmdServe(const Flags& f, std::ostream& out) {
  AnnotationStore store(f.store);
  AnnotationServer server(&store, f.seed);
  if (!server.Bind(f.host, f.port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + f.host + ":" +
                                    std::to_string(f.port));
  }
  out << "serving on http://" << f.host << ":" << f.port << std::endl;
  g_server = &server;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  server.ListenAfterBind();
  g_server = nullptr;
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"causalx: causal knowledge extraction from scholarly text",
               "causalx"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--seed", f.seed, "Seed for every randomized step")
      ->capture_default_str();

  auto add_out = [&](CLI::App* s) {
    s->add_option("--out", f.out, "Write output here instead of stdout");
  };
  auto add_in = [&](CLI::App* s, bool required) {
    auto* o = s->add_option("--in", f.in, ".txt file or directory of them")
                  ->check(CLI::ExistingPath);
    if (required) o->required();
  };
  auto add_corpus = [&](CLI::App* s) {
    s->add_option("--corpus", f.corpus, "Labeled JSONL corpus")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto add_split = [&](CLI::App* s) {
    s->add_option("--train-fraction", f.train_fraction, "Train share of split")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
  };

  std::map<CLI::App*, int (*)(const Flags&, std::ostream&)> commands;

  auto* ingest = app.add_subcommand("ingest", "Clean and segment documents");
  add_in(ingest, true);
  add_out(ingest);
  commands[ingest] = CmdIngest;

  auto* extract = app.add_subcommand("extract", "List hypothesis candidates");
  add_in(extract, true);
  add_out(extract);
  commands[extract] = CmdExtract;

  auto* stats = app.add_subcommand("stats", "Corpus statistics as JSON");
  add_in(stats, false);
  stats->add_option("--store", f.store, "Annotation store (adds labels)");
  add_out(stats);
  commands[stats] = CmdStats;

  auto* synth = app.add_subcommand("synth", "Generate the synthetic corpus");
  synth->add_option("--n-per-class", f.n_per_class, "Sentences per label")
      ->capture_default_str();
  add_out(synth);
  commands[synth] = CmdSynth;

  auto* train_h =
      app.add_subcommand("train-hypothesis", "Train the hypothesis classifier");
  add_corpus(train_h);
  train_h->add_option("--ngrams", f.ngrams, "Word n-gram order")
      ->capture_default_str();
  train_h->add_option("--lr", f.lr, "Learning rate")->capture_default_str();
  train_h->add_option("--dim", f.dim, "Embedding dimension")
      ->capture_default_str();
  train_h->add_option("--loss", f.loss, "softmax | negative_sampling")
      ->capture_default_str()
      ->check(CLI::IsMember({"softmax", "negative_sampling"}));
  train_h->add_option("--epochs", f.epochs, "Epochs")->capture_default_str();
  train_h->add_option("--neg", f.neg, "Negative samples")->capture_default_str();
  train_h->add_option("--model-out", f.model_out, "Save the model here");
  add_split(train_h);
  add_out(train_h);
  commands[train_h] = CmdTrainHypothesis;

  auto* grid = app.add_subcommand("grid", "Run the four-model grid");
  add_corpus(grid);
  grid->add_option("--format", f.format, "csv | text | json")
      ->check(CLI::IsMember({"csv", "text", "json"}));
  add_split(grid);
  add_out(grid);
  commands[grid] = CmdGrid;

  auto* explain = app.add_subcommand("explain", "Explain one prediction");
  explain->add_option("--model", f.model, "Hypothesis classifier container")
      ->required()
      ->check(CLI::ExistingFile);
  explain->add_option("--sentence", f.sentence, "Sentence to explain")
      ->required();
  explain->add_option("--samples", f.samples, "Perturbations")
      ->capture_default_str();
  explain->add_option("--label", f.label, "Label to explain")
      ->capture_default_str();
  explain->add_flag("--exhaustive", f.exhaustive, "Use every word subset");
  add_out(explain);
  commands[explain] = CmdExplain;

  auto* train_c =
      app.add_subcommand("train-causality", "Train a causality classifier");
  add_corpus(train_c);
  train_c->add_option("--features", f.features, "bow | docvec")
      ->capture_default_str()
      ->check(CLI::IsMember({"bow", "docvec"}));
  train_c->add_option("--model", f.linear, "logistic | svm")
      ->capture_default_str()
      ->check(CLI::IsMember({"logistic", "svm"}));
  train_c->add_option("--model-out", f.model_out, "Save the pipeline here");
  add_split(train_c);
  add_out(train_c);
  commands[train_c] = CmdTrainCausality;

  auto* train_t = app.add_subcommand("train-tagger", "Train the entity tagger");
  add_corpus(train_t);
  train_t->add_option("--hidden", f.hidden, "LSTM units per direction")
      ->capture_default_str();
  train_t->add_option("--embed-dim", f.embed_dim, "Token embedding size")
      ->capture_default_str();
  train_t->add_option("--batch", f.batch, "Batch size")->capture_default_str();
  train_t->add_option("--epochs", f.tagger_epochs, "Epochs")
      ->capture_default_str();
  train_t->add_option("--curve-out", f.curve_out, "Training curve CSV");
  train_t->add_option("--model-out", f.model_out, "Save the model here");
  add_split(train_t);
  add_out(train_t);
  commands[train_t] = CmdTrainTagger;

  auto* evaluate = app.add_subcommand("evaluate", "Score a saved model");
  evaluate->add_option("--task", f.task, "hypothesis | causality | tagging")
      ->required()
      ->check(CLI::IsMember({"hypothesis", "causality", "tagging"}));
  evaluate->add_option("--model", f.model, "Model container")
      ->required()
      ->check(CLI::ExistingFile);
  add_corpus(evaluate);
  evaluate->add_option("--split", f.split, "all | test")
      ->capture_default_str()
      ->check(CLI::IsMember({"all", "test"}));
  add_split(evaluate);
  add_out(evaluate);
  commands[evaluate] = CmdEvaluate;

  auto* exp = app.add_subcommand("export", "Export a training dataset");
  exp->add_option("--store", f.store, "Annotation store")
      ->required()
      ->check(CLI::ExistingFile);
  exp->add_option("--kind", f.kind, "hypothesis_cls | causality_cls | tagging")
      ->required()
      ->check(CLI::IsMember({"hypothesis_cls", "causality_cls", "tagging"}));
  exp->add_option("--format", f.format, "jsonl | tsv")
      ->check(CLI::IsMember({"jsonl", "tsv"}));
  add_out(exp);
  commands[exp] = CmdExport;

  auto* serve = app.add_subcommand("serve", "Run the annotation service");
  serve->add_option("--store", f.store, "Annotation store file")->required();
  serve->add_option("--host", f.host, "Bind address")->capture_default_str();
  serve->add_option("--port", f.port, "Port")->capture_default_str();
  commands[serve] = CmdServe;

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    err << "run with --help for the flag grammar\n";
    return kExitUsage;
  }

  for (const auto& [sub, fn] : commands) {
    if (!sub->parsed()) continue;
    if (sub == stats && f.in.empty() && f.store.empty()) {
      err << "usage error: stats needs --in or --store\n";
      return kExitUsage;
    }
    try {
      return fn(f, out);
    } catch (const Error& e) {
      err << "error: " << ErrorName(e.code()) << ": " << e.detail() << "\n";
      return kExitData;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitData;
    }
  }
  return kExitUsage;
}

}  // namespace causalx
