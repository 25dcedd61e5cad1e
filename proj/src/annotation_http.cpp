// Copyright 2026 The asreval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asreval/annotation_http.hpp"

#include "httplib.h"

namespace asreval::annotation {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, status, {{"code", code}, {"message", message}});
}

std::string bearer(const httplib::Request& req) {
  const std::string header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.rfind(kPrefix, 0) != 0) throw ServiceError(401, "unauthorized", "missing bearer token");
  return header.substr(kPrefix.size());
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) throw ServiceError(400, "invalid", "request body must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ServiceError(400, "invalid", std::string("malformed JSON: ") + e.what());
  }
}

// Wraps a handler: authenticates, maps exceptions onto {code, message}.
template <typename Fn>
httplib::Server::Handler guarded(AnnotationStore& store, Fn fn) {
  return [&store, fn](const httplib::Request& req, httplib::Response& res) {
    try {
      const std::string annotator = store.annotator_for_token(bearer(req));
      fn(req, res, annotator);
    } catch (const ServiceError& e) {
      send_error(res, e.status(), e.code(), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "invalid", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

void register_routes(httplib::Server& server, AnnotationStore& store, const std::filesystem::path& static_dir) {
  server.Get("/api/tasks/next", guarded(store, [&store](const httplib::Request&, httplib::Response& res,
                                                        const std::string& annotator) {
    NextTask t = store.next_task(annotator);
    send_json(res, 200, {{"task_id", t.task_id}, {"utterance_id", t.utterance_id},
                         {"hypothesis", t.hypothesis}, {"state", std::string(to_string(t.state))}});
  }));

  server.Post(R"(/api/tasks/([^/]+)/guess)", guarded(store, [&store](const httplib::Request& req,
                                                                      httplib::Response& res,
                                                                      const std::string& annotator) {
    json body = body_of(req);
    std::string guess;
    if (body.contains("guess_text")) {
      if (!body["guess_text"].is_string()) throw ServiceError(400, "invalid", "guess_text must be a string");
      guess = body["guess_text"].get<std::string>();
    }
    store.submit_guess(req.matches[1], annotator, guess);
    send_json(res, 200, {{"ok", true}, {"state", "guessed"}});
  }));

  server.Post(R"(/api/tasks/([^/]+)/reveal)", guarded(store, [&store](const httplib::Request& req,
                                                                       httplib::Response& res,
                                                                       const std::string& annotator) {
    std::string reference = store.reveal(req.matches[1], annotator);
    send_json(res, 200, {{"reference", reference}, {"state", "revealed"}});
  }));

  server.Post(R"(/api/tasks/([^/]+)/assessment)", guarded(store, [&store](const httplib::Request& req,
                                                                           httplib::Response& res,
                                                                           const std::string& annotator) {
    json body = body_of(req);
    if (!body.contains("assessment") || !body["assessment"].is_number_integer()) {
      throw ServiceError(400, "invalid", "assessment must be an integer 0, 1 or 2");
    }
    std::vector<std::string> types;
    if (body.contains("error_types")) {
      if (!body["error_types"].is_array()) throw ServiceError(400, "invalid", "error_types must be an array");
      for (const auto& t : body["error_types"]) {
        if (!t.is_string()) throw ServiceError(400, "invalid", "error_types entries must be strings");
        types.push_back(t.get<std::string>());
      }
    }
    store.submit_assessment(req.matches[1], annotator, body["assessment"].get<long long>(), types);
    send_json(res, 200, {{"ok", true}, {"state", "completed"}});
  }));

  server.Get("/api/progress", guarded(store, [&store](const httplib::Request&, httplib::Response& res,
                                                      const std::string& annotator) {
    Progress p = store.progress(annotator);
    send_json(res, 200, {{"total", p.total}, {"completed", p.completed}, {"in_flight", p.in_flight},
                         {"completed_by_you", p.completed_by_annotator}});
  }));

  server.Get("/api/export", guarded(store, [&store](const httplib::Request&, httplib::Response& res,
                                                    const std::string&) {
    res.status = 200;
    res.set_content(store.export_jsonl(), "application/x-ndjson");
  }));

  if (!static_dir.empty()) server.set_mount_point("/", static_dir.string());
}

void serve(AnnotationStore& store, const std::string& host, int port, const std::filesystem::path& static_dir) {
  httplib::Server server;
  register_routes(server, store, static_dir);
  if (!server.listen(host, port)) {
    throw UsageError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace asreval::annotation
