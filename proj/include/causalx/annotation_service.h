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

// JSON-over-HTTP front end for the annotation store.
//
//   POST /api/documents          {"doc_id", "text"}: ingest and enqueue
//   GET  /api/queue              ?stage=screening|annotation&limit=N
//   POST /api/labels/{id}        a Judgment object
//   GET  /api/export             ?kind=...&format=jsonl|tsv[&seed=N]
//   GET  /api/stats              CorpusStats of the store
//
// Failures answer 400 (404 for unknown ids and routes) with
// {"error": <code name>, "detail": <message>}.

#ifndef CAUSALX_ANNOTATION_SERVICE_H_
#define CAUSALX_ANNOTATION_SERVICE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <thread>

#include "causalx/annotation_store.h"

namespace causalx {

struct ApiRequest {
  std::string method;  // GET, POST, OPTIONS
  std::string path;    // already percent-decoded
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Transport-independent request handling; thread-safe because the store is.
class AnnotationApi {
 public:
  explicit AnnotationApi(AnnotationStore* store, std::uint64_t seed = 42)
      : store_(store), seed_(seed) {}

  ApiResponse Handle(const ApiRequest& request) const;

 private:
  ApiResponse Route(const ApiRequest& request) const;

  AnnotationStore* store_;
  std::uint64_t seed_;
};

class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationStore* store, std::uint64_t seed = 42);
  ~AnnotationServer();

  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Returns the bound port, or -1.
  int BindToAnyPort(const std::string& host = "127.0.0.1");
  bool Bind(const std::string& host, int port);
  // Blocks until Stop().
  bool ListenAfterBind();
  // Serves from a background thread after a successful bind.
  void Start();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace causalx

#endif  // CAUSALX_ANNOTATION_SERVICE_H_
