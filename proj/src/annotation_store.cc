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

#include "causalx/annotation_store.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <mutex>
#include <set>

#include "causalx/error.h"
#include "causalx/features.h"
#include "causalx/random.h"

namespace causalx {

using nlohmann::json;

namespace {

std::optional<Span> SpanField(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  const json& v = j[key];
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() ||
      !v[1].is_number_unsigned()) {
    throw Error(ErrorCode::kInvalidJudgment,
                std::string(key) + " must be [begin, end] with begin, end >= 0");
  }
  return Span{v[0].get<std::size_t>(), v[1].get<std::size_t>()};
}

std::optional<std::string> StringField(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) {
    throw Error(ErrorCode::kInvalidJudgment, std::string(key) + " must be a string");
  }
  return j[key].get<std::string>();
}

std::vector<std::string_view> JsonlLines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      out.push_back(line);
    }
    start = end + 1;
  }
  return out;
}

}  // namespace

std::string UtcNowIso8601() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view ToString(Stage stage) {
  return stage == Stage::kScreening ? "screening" : "annotation";
}

Stage ParseStage(std::string_view s) {
  if (s == "screening") return Stage::kScreening;
  if (s == "annotation") return Stage::kAnnotation;
  throw Error(ErrorCode::kInvalidArgument,
              "stage must be screening or annotation, got '" + std::string(s) +
                  "'");
}

std::string_view ToString(ExportKind kind) {
  switch (kind) {
    case ExportKind::kHypothesisCls: return "hypothesis_cls";
    case ExportKind::kCausalityCls: return "causality_cls";
    case ExportKind::kTagging: return "tagging";
  }
  return "";
}

ExportKind ParseExportKind(std::string_view s) {
  if (s == "hypothesis_cls") return ExportKind::kHypothesisCls;
  if (s == "causality_cls") return ExportKind::kCausalityCls;
  if (s == "tagging") return ExportKind::kTagging;
  throw Error(ErrorCode::kInvalidArgument,
              "kind must be hypothesis_cls, causality_cls or tagging, got '" +
                  std::string(s) + "'");
}

ExportFormat ParseExportFormat(std::string_view s) {
  if (s == "jsonl") return ExportFormat::kJsonl;
  if (s == "tsv") return ExportFormat::kTsv;
  throw Error(ErrorCode::kInvalidArgument,
              "format must be jsonl or tsv, got '" + std::string(s) + "'");
}

Judgment Judgment::FromJson(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidJudgment, "judgment must be a JSON object");
  }
  Judgment out;
  if (j.contains("is_hypothesis") && !j["is_hypothesis"].is_null()) {
    if (!j["is_hypothesis"].is_boolean()) {
      throw Error(ErrorCode::kInvalidJudgment, "is_hypothesis must be a boolean");
    }
    out.is_hypothesis = j["is_hypothesis"].get<bool>();
  }
  out.node1_span = SpanField(j, "node1_span");
  out.node2_span = SpanField(j, "node2_span");
  if (auto d = StringField(j, "direction")) {
    out.direction = ParseDirection(*d);
    if (!out.direction) {
      throw Error(ErrorCode::kInvalidJudgment, "unknown direction '" + *d + "'");
    }
  }
  if (auto c = StringField(j, "causality")) {
    out.causality = ParseCausality(*c);
    if (!out.causality) {
      throw Error(ErrorCode::kInvalidJudgment, "unknown causality '" + *c + "'");
    }
  }
  out.annotator = StringField(j, "annotator").value_or("");
  return out;
}

json Judgment::ToJson() const {
  auto span = [](const std::optional<Span>& s) {
    return s ? json::array({s->begin, s->end}) : json(nullptr);
  };
  return json{
      {"is_hypothesis", is_hypothesis ? json(*is_hypothesis) : json(nullptr)},
      {"node1_span", span(node1_span)},
      {"node2_span", span(node2_span)},
      {"direction", direction ? json(ToString(*direction)) : json(nullptr)},
      {"causality", causality ? json(ToString(*causality)) : json(nullptr)},
      {"annotator", annotator}};
}

json StatusCounts::ToJson() const {
  return json{{"pending", pending},
              {"screened", screened},
              {"screened_false", screened_false},
              {"annotated", annotated},
              {"total", total()}};
}

json IngestResult::ToJson() const {
  return json{{"doc_id", doc_id},
              {"n_sentences", n_sentences},
              {"n_candidates", n_candidates},
              {"added", added}};
}

AnnotationStore::AnnotationStore(std::string path, Clock clock)
    : path_(std::move(path)), clock_(std::move(clock)) {
  if (path_.empty()) return;
  LoadFromDisk();
  record_log_.open(path_, std::ios::app | std::ios::binary);
  sentence_log_.open(path_ + ".sentences.jsonl", std::ios::app | std::ios::binary);
  if (!record_log_ || !sentence_log_) {
    throw Error(ErrorCode::kIo, "cannot open store at " + path_);
  }
}

void AnnotationStore::LoadFromDisk() {
  std::ifstream sentences(path_ + ".sentences.jsonl", std::ios::binary);
  if (sentences) {
    std::string text((std::istreambuf_iterator<char>(sentences)),
                     std::istreambuf_iterator<char>());
    for (std::string_view line : JsonlLines(text)) {
      try {
        const json j = json::parse(line);
        SentenceEntry e;
        e.sentence = SentenceFromJson(j.at("sentence"));
        e.candidate = j.value("candidate", false);
        e.marker = j.value("marker", "");
        if (j.contains("marker_span") && j["marker_span"].is_array()) {
          e.marker_span = Span{j["marker_span"].at(0).get<std::size_t>(),
                               j["marker_span"].at(1).get<std::size_t>()};
        }
        AddSentenceLocked(e);
      } catch (const json::exception& ex) {
        throw Error(ErrorCode::kFormat, std::string("sentence log: ") + ex.what());
      }
    }
  }
  std::ifstream records(path_, std::ios::binary);
  if (records) {
    std::string text((std::istreambuf_iterator<char>(records)),
                     std::istreambuf_iterator<char>());
    for (std::string_view line : JsonlLines(text)) {
      HypothesisRecord r;
      try {
        r = RecordFromJson(json::parse(line));
      } catch (const json::exception& ex) {
        throw Error(ErrorCode::kFormat, std::string("record log: ") + ex.what());
      }
      if (!sentence_index_.contains(r.sentence_id)) {
        throw Error(ErrorCode::kFormat,
                    "record log references unknown sentence '" + r.sentence_id +
                        "'");
      }
      ApplyRecord(r);
    }
  }
}

void AnnotationStore::AppendRecord(const HypothesisRecord& record) {
  if (record_log_.is_open()) {
    record_log_ << causalx::ToJson(record).dump() << '\n';
    record_log_.flush();
    if (!record_log_) throw Error(ErrorCode::kIo, "failed appending to " + path_);
  }
}

void AnnotationStore::AppendSentence(const SentenceEntry& entry) {
  if (sentence_log_.is_open()) {
    json j{{"sentence", causalx::ToJson(entry.sentence)},
           {"candidate", entry.candidate},
           {"marker", entry.marker},
           {"marker_span",
            json::array({entry.marker_span.begin, entry.marker_span.end})}};
    sentence_log_ << j.dump() << '\n';
    sentence_log_.flush();
    if (!sentence_log_) {
      throw Error(ErrorCode::kIo, "failed appending to the sentence log");
    }
  }
}

void AnnotationStore::ApplyRecord(const HypothesisRecord& record) {
  log_.push_back(record);
  auto [it, inserted] = current_.insert_or_assign(record.sentence_id, record);
  if (inserted) queue_order_.push_back(record.sentence_id);
}

// Returns 1 when the entry is new or upgrades a plain sentence to a
// candidate, 0 otherwise.
std::size_t AnnotationStore::AddSentenceLocked(const SentenceEntry& entry) {
  auto it = sentence_index_.find(entry.sentence.sentence_id);
  if (it == sentence_index_.end()) {
    sentence_index_.emplace(entry.sentence.sentence_id, sentences_.size());
    sentences_.push_back(entry);
    return 1;
  }
  SentenceEntry& existing = sentences_[it->second];
  if (entry.candidate && !existing.candidate) {
    existing.candidate = true;
    existing.marker = entry.marker;
    existing.marker_span = entry.marker_span;
    return 1;
  }
  return 0;
}

std::size_t AnnotationStore::AddSentences(std::span<const Sentence> sentences) {
  std::unique_lock lock(mutex_);
  std::size_t added = 0;
  for (const Sentence& s : sentences) {
    SentenceEntry e{s, false, "", Span{}};
    if (AddSentenceLocked(e)) {
      AppendSentence(e);
      ++added;
    }
  }
  return added;
}

std::size_t AnnotationStore::EnqueueLocked(
    std::span<const Candidate> candidates) {
  std::size_t added = 0;
  for (const Candidate& c : candidates) {
    SentenceEntry e{c.sentence, true, c.marker, c.marker_span};
    if (AddSentenceLocked(e)) AppendSentence(e);
    if (current_.contains(c.sentence.sentence_id)) continue;
    HypothesisRecord r;
    r.sentence_id = c.sentence.sentence_id;
    r.status = RecordStatus::kPending;
    r.timestamp = clock_();
    AppendRecord(r);
    ApplyRecord(r);
    ++added;
  }
  return added;
}

std::size_t AnnotationStore::EnqueueCandidates(
    std::span<const Candidate> candidates) {
  std::unique_lock lock(mutex_);
  return EnqueueLocked(candidates);
}

IngestResult AnnotationStore::IngestDocument(const std::string& doc_id,
                                             std::string text) {
  Document doc = CleanText(LoadDocument(doc_id, std::move(text)));
  const std::vector<Sentence> sentences = SegmentSentences(doc);
  const std::vector<Candidate> candidates = ExtractCandidates(sentences);
  IngestResult result;
  result.doc_id = doc_id;
  result.n_sentences = sentences.size();
  result.n_candidates = candidates.size();
  std::unique_lock lock(mutex_);
  for (const Sentence& s : sentences) {
    SentenceEntry e{s, false, "", Span{}};
    if (AddSentenceLocked(e)) AppendSentence(e);
  }
  result.added = EnqueueLocked(candidates);
  return result;
}

std::vector<QueueItem> AnnotationStore::NextBatch(Stage stage,
                                                  std::size_t limit) const {
  if (limit < 1) throw Error(ErrorCode::kInvalidArgument, "limit must be >= 1");
  std::shared_lock lock(mutex_);
  std::vector<QueueItem> out;
  for (const std::string& id : queue_order_) {
    if (out.size() >= limit) break;
    const HypothesisRecord& r = current_.at(id);
    const bool wanted =
        stage == Stage::kScreening
            ? r.status == RecordStatus::kPending
            : r.status == RecordStatus::kScreened && r.is_hypothesis == true;
    if (!wanted) continue;
    const SentenceEntry& e = sentences_[sentence_index_.at(id)];
    out.push_back(QueueItem{e.sentence, r, e.marker, e.marker_span});
  }
  return out;
}

void AnnotationStore::ValidateSpans(const Sentence& sentence,
                                    const Judgment& j) const {
  const std::size_t n = sentence.text.size();
  for (const Span& s : {*j.node1_span, *j.node2_span}) {
    if (s.begin >= s.end || s.end > n) {
      throw Error(ErrorCode::kInvalidSpan,
                  "span [" + std::to_string(s.begin) + ", " +
                      std::to_string(s.end) + ") is empty or outside the " +
                      std::to_string(n) + "-byte sentence");
    }
  }
  if (j.node1_span->Overlaps(*j.node2_span)) {
    throw Error(ErrorCode::kInvalidSpan, "node1_span and node2_span overlap");
  }
}

HypothesisRecord AnnotationStore::SubmitLabel(const std::string& sentence_id,
                                              const Judgment& judgment) {
  std::unique_lock lock(mutex_);
  auto it = current_.find(sentence_id);
  if (it == current_.end()) {
    throw Error(ErrorCode::kNotFound, "no queued sentence '" + sentence_id + "'");
  }
  const HypothesisRecord& cur = it->second;
  const bool has_annotation = judgment.node1_span || judgment.node2_span ||
                              judgment.direction || judgment.causality;
  HypothesisRecord next = cur;
  if (cur.status == RecordStatus::kPending) {
    if (!judgment.is_hypothesis) {
      throw Error(ErrorCode::kInvalidJudgment,
                  "screening requires is_hypothesis");
    }
    if (has_annotation) {
      throw Error(ErrorCode::kInvalidJudgment,
                  "record is pending; screen it before annotating");
    }
    next.status = RecordStatus::kScreened;
    next.is_hypothesis = *judgment.is_hypothesis;
  } else if (cur.is_hypothesis != true) {
    throw Error(ErrorCode::kInvalidJudgment,
                "record was screened as not a hypothesis; no further labels");
  } else {
    if (judgment.is_hypothesis == false) {
      throw Error(ErrorCode::kInvalidJudgment,
                  "is_hypothesis cannot be withdrawn after screening");
    }
    const char* missing = !judgment.node1_span   ? "node1_span"
                          : !judgment.node2_span ? "node2_span"
                          : !judgment.direction  ? "direction"
                          : !judgment.causality  ? "causality"
                                                 : nullptr;
    if (missing) {
      throw Error(ErrorCode::kInvalidJudgment,
                  std::string("annotation requires ") + missing);
    }
    ValidateSpans(sentences_[sentence_index_.at(sentence_id)].sentence,
                  judgment);
    next.status = RecordStatus::kAnnotated;
    next.node1_span = judgment.node1_span;
    next.node2_span = judgment.node2_span;
    next.direction = judgment.direction;
    next.causality = judgment.causality;
  }
  next.annotator = judgment.annotator;
  next.timestamp = clock_();
  AppendRecord(next);
  ApplyRecord(next);
  return next;
}

std::optional<HypothesisRecord> AnnotationStore::Current(
    const std::string& sentence_id) const {
  std::shared_lock lock(mutex_);
  auto it = current_.find(sentence_id);
  if (it == current_.end()) return std::nullopt;
  return it->second;
}

std::vector<HypothesisRecord> AnnotationStore::CurrentRecords() const {
  std::shared_lock lock(mutex_);
  std::vector<HypothesisRecord> out;
  out.reserve(queue_order_.size());
  for (const std::string& id : queue_order_) out.push_back(current_.at(id));
  return out;
}

std::vector<HypothesisRecord> AnnotationStore::Log() const {
  std::shared_lock lock(mutex_);
  return log_;
}

std::string AnnotationStore::LogJsonl() const {
  std::shared_lock lock(mutex_);
  std::string out;
  for (const auto& r : log_) out += causalx::ToJson(r).dump() + "\n";
  return out;
}

StatusCounts AnnotationStore::Counts() const {
  std::shared_lock lock(mutex_);
  StatusCounts c;
  for (const auto& [id, r] : current_) {
    switch (r.status) {
      case RecordStatus::kPending: ++c.pending; break;
      case RecordStatus::kScreened:
        ++c.screened;
        c.screened_false += r.is_hypothesis == false;
        break;
      case RecordStatus::kAnnotated: ++c.annotated; break;
    }
  }
  return c;
}

std::size_t AnnotationStore::sentence_count() const {
  std::shared_lock lock(mutex_);
  return sentences_.size();
}

std::vector<HypothesisRecord> AnnotationStore::Replay(
    std::span<const HypothesisRecord> log) {
  std::vector<std::string> order;
  std::unordered_map<std::string, HypothesisRecord> view;
  for (const HypothesisRecord& r : log) {
    if (view.insert_or_assign(r.sentence_id, r).second) {
      order.push_back(r.sentence_id);
    }
  }
  std::vector<HypothesisRecord> out;
  out.reserve(order.size());
  for (const auto& id : order) out.push_back(view.at(id));
  return out;
}

std::vector<HypothesisRecord> AnnotationStore::ReplayJsonl(
    std::string_view jsonl) {
  std::vector<HypothesisRecord> log;
  for (std::string_view line : JsonlLines(jsonl)) {
    try {
      log.push_back(RecordFromJson(json::parse(line)));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::kFormat, ex.what());
    }
  }
  return Replay(log);
}

LabeledCorpus AnnotationStore::ExportCorpus(ExportKind kind,
                                            std::uint64_t seed) const {
  std::shared_lock lock(mutex_);
  LabeledCorpus corpus;
  auto sentence_of = [&](const std::string& id) -> const Sentence& {
    return sentences_[sentence_index_.at(id)].sentence;
  };

  if (kind == ExportKind::kHypothesisCls) {
    std::set<std::string> positive_docs;
    for (const std::string& id : queue_order_) {
      const HypothesisRecord& r = current_.at(id);
      if (r.is_hypothesis != true) continue;
      const Sentence& s = sentence_of(id);
      corpus.hypothesis.push_back(
          TextExample{s.text, std::string(kHypothesisLabel), id});
      positive_docs.insert(s.doc_id);
    }
    if (corpus.hypothesis.empty()) {
      throw Error(ErrorCode::kEmptyExport, "no screened hypotheses to export");
    }
    // Negatives come first from non-candidate sentences of the same
    // documents, then other documents, then rejected candidates.
    std::vector<std::size_t> tiers[3];
    for (std::size_t i = 0; i < sentences_.size(); ++i) {
      const SentenceEntry& e = sentences_[i];
      if (!e.candidate) {
        tiers[positive_docs.contains(e.sentence.doc_id) ? 0 : 1].push_back(i);
      } else if (auto it = current_.find(e.sentence.sentence_id);
                 it != current_.end() && it->second.is_hypothesis == false) {
        tiers[2].push_back(i);
      }
    }
    Rng rng(seed);
    const std::size_t pool = tiers[0].size() + tiers[1].size() + tiers[2].size();
    if (pool == 0) {
      throw Error(ErrorCode::kEmptyExport,
                  "no non-hypothesis sentences to balance the export");
    }
    if (pool < corpus.hypothesis.size()) {
      // Too few negatives: keep a seeded subset of the positives instead.
      std::vector<std::size_t> keep(corpus.hypothesis.size());
      for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
      Shuffle(std::span<std::size_t>(keep), rng);
      keep.resize(pool);
      std::sort(keep.begin(), keep.end());
      std::vector<TextExample> positives;
      for (std::size_t i : keep) positives.push_back(corpus.hypothesis[i]);
      corpus.hypothesis = std::move(positives);
    }
    std::vector<std::size_t> chosen;
    const std::size_t want = corpus.hypothesis.size();
    for (auto& tier : tiers) {
      Shuffle(std::span<std::size_t>(tier), rng);
      for (std::size_t i : tier) {
        if (chosen.size() == want) break;
        chosen.push_back(i);
      }
    }
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t i : chosen) {
      const Sentence& s = sentences_[i].sentence;
      corpus.hypothesis.push_back(TextExample{
          s.text, std::string(kNonHypothesisLabel), s.sentence_id});
    }
    return corpus;
  }

  for (const std::string& id : queue_order_) {
    const HypothesisRecord& r = current_.at(id);
    if (r.status != RecordStatus::kAnnotated) continue;
    const Sentence& s = sentence_of(id);
    if (kind == ExportKind::kCausalityCls) {
      CausalityExample e;
      e.sentence = s.text;
      e.node1_span = *r.node1_span;
      e.node2_span = *r.node2_span;
      e.masked = MaskNodes(s.text, e.node1_span, e.node2_span);
      e.label = std::string(*r.causality == Causality::kCausal
                                ? kCausalLabel
                                : kAssociativeLabel);
      e.direction = r.direction;
      e.sentence_id = id;
      corpus.causality.push_back(std::move(e));
    } else {
      TaggingExample t;
      t.labels = TagsFromSpans(s.text, *r.node1_span, *r.node2_span, &t.tokens);
      t.sentence_id = id;
      corpus.tagging.push_back(std::move(t));
    }
  }
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyExport, "no annotated records to export");
  }
  return corpus;
}

std::string AnnotationStore::ExportDataset(ExportKind kind, ExportFormat format,
                                           std::uint64_t seed) const {
  const LabeledCorpus corpus = ExportCorpus(kind, seed);
  if (format == ExportFormat::kJsonl) return ToJsonl(corpus);
  switch (kind) {
    case ExportKind::kHypothesisCls: return HypothesisTsv(corpus.hypothesis);
    case ExportKind::kCausalityCls: return CausalityTsv(corpus.causality);
    case ExportKind::kTagging: return TaggingTsv(corpus.tagging);
  }
  return "";
}

CorpusStats AnnotationStore::Stats() const {
  std::vector<Sentence> sentences;
  std::vector<HypothesisRecord> records;
  {
    std::shared_lock lock(mutex_);
    sentences.reserve(sentences_.size());
    for (const auto& e : sentences_) sentences.push_back(e.sentence);
    for (const std::string& id : queue_order_) records.push_back(current_.at(id));
  }
  return ComputeCorpusStats(sentences, records);
}

}  // namespace causalx
