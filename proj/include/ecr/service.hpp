// Copyright 2026 The ecr Authors.
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

#ifndef ECR_SERVICE_HPP
#define ECR_SERVICE_HPP

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ecr/hybrid.hpp"
#include "ecr/pool.hpp"
#include "ecr/serialize.hpp"

namespace ecr {

// Parses the given .ec files and directories (or the inline source when no
// files are given) into one domain. Throws ValidationError with diagnostics.
DomainDescription load_domain(const std::vector<std::string>& files, const std::string& source = {});

enum class SessionMode { Classical, Epistemic, Hybrid };
std::string_view to_string(SessionMode m);
SessionMode parse_session_mode(std::string_view s);
KbMode parse_kb_mode(std::string_view s);

struct SessionDescriptor {
  SessionMode mode = SessionMode::Classical;
  KbMode kb_mode = KbMode::NonDestructive;
  // Files or directories of .ec sources; alternatively inline source text.
  std::vector<std::string> domain_files;
  std::string domain_source;
  std::string network_dir;
  std::string explanations;
  HybridConfig config;
  std::size_t branch_cap = 1024;

  static SessionDescriptor from_json(const Json& j);
  Json to_json() const;
};

// A running reasoner. All access goes through the session mutex.
class Session {
 public:
  Session(std::string id, SessionDescriptor desc);

  const std::string& id() const noexcept { return id_; }
  const SessionDescriptor& descriptor() const noexcept { return desc_; }
  ModelPool& pool() noexcept { return hybrid_ ? hybrid_->pool() : *pool_; }
  HybridSession* hybrid() noexcept { return hybrid_.get(); }

  // Appends a tick or cycle record to the stream log and wakes readers.
  void publish(std::string type, Json payload);

  std::mutex mutex;
  std::condition_variable changed;
  std::vector<Json> log;
  std::vector<Json> stats;
  bool closed = false;

 private:
  std::string id_;
  SessionDescriptor desc_;
  std::unique_ptr<ModelPool> pool_;
  std::unique_ptr<HybridSession> hybrid_;
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::string body;
  std::map<std::string, std::string> query;
};

struct ApiResponse {
  int status = 200;
  Json body;
};

// Maps an error code to the HTTP status reported by the API.
int http_status(ErrorCode code);

// Transport-independent implementation of the JSON API.
class Service {
 public:
  ApiResponse handle(const ApiRequest& req);

  std::shared_ptr<Session> find(const std::string& id) const;
  std::shared_ptr<Session> create(SessionDescriptor desc);
  bool remove(const std::string& id);
  std::vector<std::string> session_ids() const;

  // Log entries with index >= from; waits up to `timeout` for the first one.
  std::vector<Json> wait_events(const std::string& id, std::size_t from, std::chrono::milliseconds timeout,
                                bool* closed = nullptr);

 private:
  ApiResponse route(const ApiRequest& req, const std::vector<std::string>& parts);

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::size_t next_id_ = 1;
};

// HTTP front end over a Service, with a server-sent event stream per session.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  int start(const std::string& host, int port);
  // Blocks in the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ecr

#endif  // ECR_SERVICE_HPP
