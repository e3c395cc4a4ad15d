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

#ifndef DCO_SERVICE_H_
#define DCO_SERVICE_H_

#include <memory>
#include <string>
#include <thread>

#include "dco/engine.h"

namespace httplib {
class Server;
}

namespace dco {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port.
  // Extra time an invoke may take beyond the directive's timeout before the
  // request answers 504.
  int deadline_slack_ms = 5000;
};

// JSON-over-HTTP front end of an Engine:
//   GET  /api/health
//   GET  /api/directives
//   GET  /api/directives/{id}        PUT  /api/directives/{id}  {"text": ...}
//   POST /api/directives/{id}/invoke {"args": [...]}
//   POST /api/directives/{id}/regenerate
//   GET  /api/blocks?directive={id}
//   POST /api/purge                  {"scope": "all" | "failed_only" | {"older_than_ms": N}}
class Service {
 public:
  Service(Engine& engine, ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves on a background thread. Throws Error(kBindError).
  void Start();
  // Binds and serves on the calling thread until Stop().
  void Run();
  void Stop();

  int port() const { return port_; }

 private:
  void Bind();
  void InstallRoutes();

  Engine& engine_;
  ServiceConfig config_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace dco

#endif  // DCO_SERVICE_H_
