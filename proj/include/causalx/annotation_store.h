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

// Append-only store behind the screening and annotation loop. Every
// submitted judgment becomes a new HypothesisRecord revision; the current
// view is the latest revision per sentence and can always be rebuilt by
// replaying the log.

#ifndef CAUSALX_ANNOTATION_STORE_H_
#define CAUSALX_ANNOTATION_STORE_H_

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "causalx/corpus.h"
#include "causalx/datasets.h"
#include "causalx/record.h"
#include "json.hpp"

namespace causalx {

// Returns ISO-8601 timestamps; injectable so tests get stable output.
using Clock = std::function<std::string()>;
std::string UtcNowIso8601();

enum class Stage { kScreening, kAnnotation };
std::string_view ToString(Stage stage);
Stage ParseStage(std::string_view s);  // kInvalidArgument if unknown

enum class ExportKind { kHypothesisCls, kCausalityCls, kTagging };
std::string_view ToString(ExportKind kind);
ExportKind ParseExportKind(std::string_view s);

enum class ExportFormat { kJsonl, kTsv };
ExportFormat ParseExportFormat(std::string_view s);

// A human decision. Screening sets is_hypothesis only; annotation sets both
// spans, direction and causality.
struct Judgment {
  std::optional<bool> is_hypothesis;
  std::optional<Span> node1_span;
  std::optional<Span> node2_span;
  std::optional<Direction> direction;
  std::optional<Causality> causality;
  std::string annotator;

  // Throws kInvalidJudgment on wrongly typed or unknown values.
  static Judgment FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

struct QueueItem {
  Sentence sentence;
  HypothesisRecord record;
  std::string marker;
  Span marker_span;
};

struct StatusCounts {
  std::size_t pending = 0;
  std::size_t screened = 0;  // both verdicts, not yet annotated
  std::size_t screened_false = 0;
  std::size_t annotated = 0;
  std::size_t total() const { return pending + screened + annotated; }
  nlohmann::json ToJson() const;
};

struct IngestResult {
  std::string doc_id;
  std::size_t n_sentences = 0;
  std::size_t n_candidates = 0;
  std::size_t added = 0;
  nlohmann::json ToJson() const;
};

class AnnotationStore {
 public:
  // An empty path keeps everything in memory. Otherwise the record log at
  // `path` and the sentence log at `path + ".sentences.jsonl"` are replayed
  // and then appended to.
  explicit AnnotationStore(std::string path = "", Clock clock = UtcNowIso8601);

  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  // Load, clean, segment and extract; every sentence joins the negative
  // pool and every candidate is enqueued.
  IngestResult IngestDocument(const std::string& doc_id, std::string text);

  // Registers sentences without enqueueing them. Known ids are skipped.
  std::size_t AddSentences(std::span<const Sentence> sentences);
  // Returns how many sentence ids were new to the queue.
  std::size_t EnqueueCandidates(std::span<const Candidate> candidates);

  // FIFO by enqueue order. Screening lists pending records; annotation
  // lists screened records whose is_hypothesis is true.
  std::vector<QueueItem> NextBatch(Stage stage, std::size_t limit) const;

  HypothesisRecord SubmitLabel(const std::string& sentence_id,
                               const Judgment& judgment);

  std::optional<HypothesisRecord> Current(const std::string& sentence_id) const;
  std::vector<HypothesisRecord> CurrentRecords() const;  // enqueue order
  std::vector<HypothesisRecord> Log() const;
  std::string LogJsonl() const;
  StatusCounts Counts() const;

  // Latest revision per sentence id, in first-seen order.
  static std::vector<HypothesisRecord> Replay(
      std::span<const HypothesisRecord> log);
  static std::vector<HypothesisRecord> ReplayJsonl(std::string_view jsonl);

  // Throws kEmptyExport when nothing qualifies. Hypothesis exports pair
  // every positive with one seeded negative; when negatives run short a
  // seeded subset of the positives is kept so the classes stay equal.
  LabeledCorpus ExportCorpus(ExportKind kind, std::uint64_t seed = 42) const;
  std::string ExportDataset(ExportKind kind, ExportFormat format,
                            std::uint64_t seed = 42) const;

  CorpusStats Stats() const;

  std::size_t sentence_count() const;

 private:
  struct SentenceEntry {
    Sentence sentence;
    bool candidate = false;
    std::string marker;
    Span marker_span;
  };

  void LoadFromDisk();
  void AppendRecord(const HypothesisRecord& record);
  void AppendSentence(const SentenceEntry& entry);
  void ApplyRecord(const HypothesisRecord& record);
  std::size_t AddSentenceLocked(const SentenceEntry& entry);
  std::size_t EnqueueLocked(std::span<const Candidate> candidates);
  void ValidateSpans(const Sentence& sentence, const Judgment& j) const;

  std::string path_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::ofstream record_log_;
  std::ofstream sentence_log_;

  std::vector<SentenceEntry> sentences_;
  std::unordered_map<std::string, std::size_t> sentence_index_;
  std::vector<HypothesisRecord> log_;
  std::vector<std::string> queue_order_;
  std::unordered_map<std::string, HypothesisRecord> current_;
};

}  // namespace causalx

#endif  // CAUSALX_ANNOTATION_STORE_H_
