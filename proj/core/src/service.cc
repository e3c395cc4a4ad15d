// Copyright 2026 The DCO Authors.
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

#include "dco/service.h"

#include <chrono>
#include <future>

#include <httplib.h>

#include "dco/error.h"

namespace dco {
namespace {

using nlohmann::json;

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

int StatusFor(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kUnknownDirective: return 404;
    case ErrorCode::kEmptyText:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError: return 400;
    default: return 500;
  }
}

void ReplyError(httplib::Response& res, const Error& e) {
  Reply(res, StatusFor(e), {{"error", ErrorCodeName(e.code())}, {"detail", e.detail()}});
}

json ParseBody(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw Error(ErrorCode::kParseError, "body must be a JSON object");
  }
  return body;
}

// Runs `handler`, mapping Error to a JSON error reply.
template <typename F>
void Guarded(httplib::Response& res, F&& handler) {
  try {
    handler();
  } catch (const Error& e) {
    ReplyError(res, e);
  } catch (const std::exception& e) {
    Reply(res, 500, {{"error", "Internal"}, {"detail", e.what()}});
  }
}

}  // namespace

Service::Service(Engine& engine, ServiceConfig config)
    : engine_(engine), config_(std::move(config)), server_(std::make_unique<httplib::Server>()) {
  InstallRoutes();
}

Service::~Service() { Stop(); }

void Service::InstallRoutes() {
  auto& server = *server_;
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200, {{"status", "ok"}});
  });

  server.Get("/api/directives", [this](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& d : engine_.directives().List()) list.push_back(ToJson(d));
    Reply(res, 200, list);
  });

  server.Get(R"(/api/directives/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               Guarded(res, [&] {
                 Reply(res, 200, ToJson(engine_.directives().Get(req.matches[1].str())));
               });
             });

  server.Put(R"(/api/directives/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               Guarded(res, [&] {
                 json body = ParseBody(req);
                 if (!body.contains("text") || !body["text"].is_string()) {
                   throw Error(ErrorCode::kParseError, "body needs a string \"text\"");
                 }
                 Directive d = engine_.directives().UpdateText(req.matches[1].str(),
                                                               body["text"].get<std::string>());
                 Reply(res, 200, ToJson(d));
               });
             });

  server.Post(R"(/api/directives/([^/]+)/invoke)",
              [this](const httplib::Request& req, httplib::Response& res) {
                Guarded(res, [&] {
                  const std::string id = req.matches[1].str();
                  const Directive directive = engine_.directives().Get(id);
                  json body = ParseBody(req);
                  json args = body.value("args", json::array());
                  if (!args.is_array()) throw Error(ErrorCode::kParseError, "args must be an array");

                  // The invoke keeps running if the deadline passes; the
                  // shared state outlives this handler.
                  auto promise = std::make_shared<std::promise<json>>();
                  auto future = promise->get_future();
                  Engine* engine = &engine_;
                  std::thread([engine, id, args, promise] {
                    try {
                      promise->set_value(ToJson(engine->orchestrator().InvokeAction(id, args)));
                    } catch (...) {
                      promise->set_exception(std::current_exception());
                    }
                  }).detach();
                  const auto deadline = std::chrono::milliseconds(directive.policy.timeout_ms +
                                                                  config_.deadline_slack_ms);
                  if (future.wait_for(deadline) == std::future_status::timeout) {
                    auto blocks = engine_.blocks().ForDirective(id);
                    Reply(res, 504, {{"error", "DeadlineExceeded"},
                                     {"block", blocks.empty() ? json() : ToJson(blocks.back())}});
                    return;
                  }
                  Reply(res, 200, future.get());
                });
              });

  server.Post(R"(/api/directives/([^/]+)/regenerate)",
              [this](const httplib::Request& req, httplib::Response& res) {
                Guarded(res, [&] {
                  Reply(res, 200, ToJson(engine_.orchestrator().Regenerate(req.matches[1].str())));
                });
              });

  server.Get("/api/blocks", [this](const httplib::Request& req, httplib::Response& res) {
    Guarded(res, [&] {
      json list = json::array();
      const bool filter = req.has_param("directive");
      const std::string id = filter ? req.get_param_value("directive") : "";
      for (const auto& b : engine_.blocks().LoadAll()) {
        if (!filter || b.directive_id == id) list.push_back(ToJson(b));
      }
      Reply(res, 200, list);
    });
  });

  server.Post("/api/purge", [this](const httplib::Request& req, httplib::Response& res) {
    Guarded(res, [&] {
      json body = ParseBody(req);
      if (!body.contains("scope")) throw Error(ErrorCode::kParseError, "body needs \"scope\"");
      const std::size_t purged = engine_.orchestrator().PurgeBlocks(PurgeScopeFromJson(body["scope"]));
      Reply(res, 200, {{"purged", purged}});
    });
  });
}

void Service::Bind() {
  if (config_.port == 0) {
    port_ = server_->bind_to_any_port(config_.host);
    if (port_ < 0) throw Error(ErrorCode::kBindError, config_.host);
  } else {
    if (config_.port < 1 || config_.port > 65535) {
      throw Error(ErrorCode::kInvalidArgument, "port must be in [1, 65535]");
    }
    if (!server_->bind_to_port(config_.host, config_.port)) {
      throw Error(ErrorCode::kBindError, config_.host + ":" + std::to_string(config_.port));
    }
    port_ = config_.port;
  }
}

void Service::Start() {
  Bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void Service::Run() {
  Bind();
  server_->listen_after_bind();
}

void Service::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace dco
