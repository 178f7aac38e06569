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

#include "causalx/annotation_service.h"

#include <charconv>

#include "causalx/error.h"
#include "httplib.h"

namespace causalx {

using nlohmann::json;

namespace {

constexpr std::string_view kLabelsPrefix = "/api/labels/";
constexpr std::size_t kDefaultLimit = 20;

ApiResponse JsonResponse(int status, const json& body) {
  return ApiResponse{status, "application/json", body.dump()};
}

ApiResponse ErrorResponse(int status, std::string_view code,
                          std::string_view detail) {
  return JsonResponse(status, json{{"error", code}, {"detail", detail}});
}

std::string QueryOr(const ApiRequest& r, const std::string& key,
                    std::string fallback) {
  auto it = r.query.find(key);
  return it == r.query.end() ? fallback : it->second;
}

std::uint64_t ParseUnsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (value.empty() || ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidArgument,
                key + " must be a non-negative integer, got '" + value + "'");
  }
  return out;
}

json ParseBody(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("request body is not JSON: ") + e.what());
  }
}

json QueueItemJson(const QueueItem& item) {
  return json{{"sentence_id", item.sentence.sentence_id},
              {"doc_id", item.sentence.doc_id},
              {"text", item.sentence.text},
              {"marker", item.marker},
              {"marker_span",
               json::array({item.marker_span.begin, item.marker_span.end})},
              {"record", ToJson(item.record)}};
}

}  // namespace

ApiResponse AnnotationApi::Handle(const ApiRequest& request) const {
  try {
    return Route(request);
  } catch (const Error& e) {
    const int status = e.code() == ErrorCode::kNotFound ? 404 : 400;
    return ErrorResponse(status, ErrorName(e.code()), e.detail());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "Internal", e.what());
  }
}

ApiResponse AnnotationApi::Route(const ApiRequest& r) const {
  if (r.method == "OPTIONS") return ApiResponse{204, "text/plain", ""};

  if (r.path == "/api/documents" && r.method == "POST") {
    const json body = ParseBody(r.body);
    if (!body.is_object() || !body.contains("text") ||
        !body["text"].is_string()) {
      throw Error(ErrorCode::kInvalidArgument, "body needs a string 'text'");
    }
    std::string doc_id = "doc" + std::to_string(store_->sentence_count());
    if (body.contains("doc_id")) {
      if (!body["doc_id"].is_string() ||
          body["doc_id"].get<std::string>().empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "'doc_id' must be a nonempty string");
      }
      doc_id = body["doc_id"].get<std::string>();
    }
    return JsonResponse(
        200, store_->IngestDocument(doc_id, body["text"].get<std::string>())
                 .ToJson());
  }

  if (r.path == "/api/queue" && r.method == "GET") {
    const Stage stage = ParseStage(QueryOr(r, "stage", "screening"));
    const std::uint64_t limit = ParseUnsigned(
        "limit", QueryOr(r, "limit", std::to_string(kDefaultLimit)));
    json items = json::array();
    for (const QueueItem& item : store_->NextBatch(stage, limit)) {
      items.push_back(QueueItemJson(item));
    }
    return JsonResponse(200, json{{"stage", ToString(stage)},
                                  {"items", items},
                                  {"progress", store_->Counts().ToJson()}});
  }

  if (r.path.starts_with(kLabelsPrefix) && r.method == "POST") {
    const std::string id = r.path.substr(kLabelsPrefix.size());
    if (id.empty()) throw Error(ErrorCode::kNotFound, "missing sentence id");
    const Judgment j = Judgment::FromJson(ParseBody(r.body));
    return JsonResponse(200, ToJson(store_->SubmitLabel(id, j)));
  }

  if (r.path == "/api/export" && r.method == "GET") {
    const ExportKind kind = ParseExportKind(QueryOr(r, "kind", ""));
    const ExportFormat format = ParseExportFormat(QueryOr(r, "format", "jsonl"));
    const std::uint64_t seed =
        ParseUnsigned("seed", QueryOr(r, "seed", std::to_string(seed_)));
    return ApiResponse{200,
                       format == ExportFormat::kJsonl
                           ? "application/x-ndjson"
                           : "text/tab-separated-values",
                       store_->ExportDataset(kind, format, seed)};
  }

  if (r.path == "/api/stats" && r.method == "GET") {
    return JsonResponse(200, ToJson(store_->Stats()));
  }

  return ErrorResponse(404, ErrorName(ErrorCode::kNotFound),
                       "no route for " + r.method + " " + r.path);
}

struct AnnotationServer::Impl {
  explicit Impl(AnnotationStore* store, std::uint64_t seed)
      : api(store, seed) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      ApiRequest request{req.method, req.path, {}, req.body};
      for (const auto& [k, v] : req.params) request.query.emplace(k, v);
      const ApiResponse response = api.Handle(request);
      res.status = response.status;
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_content(response.body, response.content_type);
    };
    server.Get(".*", handler);
    server.Post(".*", handler);
    server.Options(".*", handler);
  }

  AnnotationApi api;
  httplib::Server server;
  bool bound = false;
};

AnnotationServer::AnnotationServer(AnnotationStore* store, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(store, seed)) {}

AnnotationServer::~AnnotationServer() { Stop(); }

int AnnotationServer::BindToAnyPort(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  impl_->bound = port > 0;
  return impl_->bound ? port : -1;
}

bool AnnotationServer::Bind(const std::string& host, int port) {
  impl_->bound = impl_->server.bind_to_port(host, port);
  return impl_->bound;
}

bool AnnotationServer::ListenAfterBind() {
  return impl_->bound && impl_->server.listen_after_bind();
}

void AnnotationServer::Start() {
  if (!impl_->bound || thread_.joinable()) return;
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void AnnotationServer::Stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace causalx
