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

#include "ecr/service.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <sstream>

#include <httplib.h>

#include "ecr/error.hpp"
#include "ecr/parser.hpp"

namespace ecr {

DomainDescription load_domain(const std::vector<std::string>& files, const std::string& source) {
  ParseResult r;
  if (!files.empty()) {
    std::vector<std::filesystem::path> paths(files.begin(), files.end());
    r = parse_domain_paths(paths);
  } else if (!source.empty()) {
    r = parse_domain(source);
  } else {
    throw Error(ErrorCode::InvalidArgument, "no domain given");
  }
  if (!r.ok()) throw Error(r.error_code(), r.error_text());
  return std::move(*r.domain);
}

std::string_view to_string(SessionMode m) {
  switch (m) {
    case SessionMode::Classical: return "classical";
    case SessionMode::Epistemic: return "epistemic";
    case SessionMode::Hybrid: return "hybrid";
  }
  return "?";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  out.erase(std::remove(out.begin(), out.end(), '-'), out.end());
  out.erase(std::remove(out.begin(), out.end(), '_'), out.end());
  return out;
}

}  // namespace

SessionMode parse_session_mode(std::string_view s) {
  std::string l = lower(s);
  if (l == "classical") return SessionMode::Classical;
  if (l == "epistemic") return SessionMode::Epistemic;
  if (l == "hybrid") return SessionMode::Hybrid;
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + std::string(s) + "'");
}

KbMode parse_kb_mode(std::string_view s) {
  std::string l = lower(s);
  if (l == "nondestructive") return KbMode::NonDestructive;
  if (l == "semidestructive") return KbMode::SemiDestructive;
  throw Error(ErrorCode::InvalidArgument, "unknown kb mode '" + std::string(s) + "'");
}

SessionDescriptor SessionDescriptor::from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::FormatError, "session descriptor must be an object");
  SessionDescriptor d;
  try {
    if (j.contains("mode")) d.mode = parse_session_mode(j.at("mode").get<std::string>());
    if (j.contains("kbMode")) d.kb_mode = parse_kb_mode(j.at("kbMode").get<std::string>());
    if (j.contains("domain")) {
      const Json& dom = j.at("domain");
      if (dom.is_string()) d.domain_files.push_back(dom.get<std::string>());
      else d.domain_files = dom.get<std::vector<std::string>>();
    }
    if (j.contains("domainSource")) d.domain_source = j.at("domainSource").get<std::string>();
    if (j.contains("networks")) d.network_dir = j.at("networks").get<std::string>();
    if (j.contains("explanations")) d.explanations = j.at("explanations").get<std::string>();
    if (j.contains("threshold")) d.config.threshold = j.at("threshold").get<double>();
    if (j.contains("gating")) {
      for (const auto& [w, g] : j.at("gating").items()) {
        int weight = std::stoi(w);
        std::string v = lower(g.get<std::string>());
        if (v != "evaluate" && v != "skip") throw Error(ErrorCode::InvalidArgument, "gating values are evaluate or skip");
        d.config.gating[weight] = v == "skip" ? Gate::Skip : Gate::Evaluate;
      }
    }
    if (j.contains("branchCap")) d.branch_cap = j.at("branchCap").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("bad session descriptor: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::FormatError, "gating keys must be weights");
  }
  if (d.domain_files.empty() && d.domain_source.empty()) throw Error(ErrorCode::InvalidArgument, "a session needs a domain");
  d.config.check();
  return d;
}

Json SessionDescriptor::to_json() const {
  Json j;
  j["mode"] = std::string(to_string(mode));
  j["kbMode"] = kb_mode == KbMode::NonDestructive ? "non-destructive" : "semi-destructive";
  j["domain"] = domain_files;
  if (mode == SessionMode::Hybrid) {
    j["networks"] = network_dir;
    j["explanations"] = explanations;
    j["threshold"] = config.threshold;
    Json g = Json::object();
    for (const auto& [w, v] : config.gating) g[std::to_string(w)] = v == Gate::Skip ? "skip" : "evaluate";
    j["gating"] = std::move(g);
  }
  j["branchCap"] = branch_cap;
  return j;
}

namespace {

ExplanationCatalog find_catalog(const SessionDescriptor& d) {
  if (!d.explanations.empty()) return ExplanationCatalog::load(d.explanations);
  for (const std::string& f : d.domain_files) {
    auto p = std::filesystem::path(f) / "explanations.txt";
    if (std::filesystem::is_regular_file(p)) return ExplanationCatalog::load(p);
  }
  return {};
}

}  // namespace

Session::Session(std::string id, SessionDescriptor desc) : id_(std::move(id)), desc_(std::move(desc)) {
  DomainDescription domain = load_domain(desc_.domain_files, desc_.domain_source);
  PoolOptions options;
  options.kb_mode = desc_.kb_mode;
  options.mode = desc_.mode == SessionMode::Epistemic ? ReasoningMode::Epistemic : ReasoningMode::Classical;
  options.branch_cap = desc_.branch_cap;
  if (desc_.mode == SessionMode::Hybrid) {
    if (desc_.network_dir.empty()) throw Error(ErrorCode::InvalidArgument, "hybrid sessions need a network directory");
    hybrid_ = std::make_unique<HybridSession>(std::move(domain), load_repository(desc_.network_dir), find_catalog(desc_),
                                              desc_.config, options);
  } else {
    pool_ = std::make_unique<ModelPool>(std::move(domain), options);
  }
  stats.push_back(stats_json(pool().initial_report()));
}

void Session::publish(std::string type, Json payload) {
  Json entry{{"seq", log.size()}, {"type", std::move(type)}, {"data", std::move(payload)}};
  log.push_back(std::move(entry));
  changed.notify_all();
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::SessionNotFound: return 404;
    case ErrorCode::GlobalInconsistency:
    case ErrorCode::BranchCapExceeded:
    case ErrorCode::ModeUnavailable:
    case ErrorCode::HistoryUnavailable:
    case ErrorCode::PhaseNotEntered: return 409;
    default: return 400;
  }
}

std::shared_ptr<Session> Service::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::SessionNotFound, "no session '" + id + "'");
  return it->second;
}

std::shared_ptr<Session> Service::create(SessionDescriptor desc) {
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = "s" + std::to_string(next_id_++);
  }
  auto s = std::make_shared<Session>(id, std::move(desc));
  std::lock_guard lock(mutex_);
  sessions_[id] = s;
  return s;
}

bool Service::remove(const std::string& id) {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return false;
    s = it->second;
    sessions_.erase(it);
  }
  std::lock_guard lock(s->mutex);
  s->closed = true;
  s->changed.notify_all();
  return true;
}

std::vector<std::string> Service::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, s] : sessions_) ids.push_back(id);
  return ids;
}

std::vector<Json> Service::wait_events(const std::string& id, std::size_t from, std::chrono::milliseconds timeout,
                                       bool* closed) {
  std::shared_ptr<Session> s;
  try {
    s = find(id);
  } catch (const Error&) {
    if (closed) *closed = true;
    return {};
  }
  std::unique_lock lock(s->mutex);
  s->changed.wait_for(lock, timeout, [&] { return s->log.size() > from || s->closed; });
  if (closed) *closed = s->closed;
  std::vector<Json> out;
  for (std::size_t i = from; i < s->log.size(); ++i) out.push_back(s->log[i]);
  return out;
}

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string p;
  while (std::getline(ss, p, '/')) {
    if (!p.empty()) parts.push_back(p);
  }
  return parts;
}

Json parse_body(const std::string& body) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  try {
    return Json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::FormatError, std::string("request body is not JSON: ") + e.what());
  }
}

std::vector<std::string> statements(const Json& body) {
  std::vector<std::string> out;
  try {
    if (body.contains("statement")) out.push_back(body.at("statement").get<std::string>());
    if (body.contains("statements")) {
      for (const auto& s : body.at("statements")) out.push_back(s.get<std::string>());
    }
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::FormatError, "statements must be strings");
  }
  return out;
}

Time query_time(const ApiRequest& req, const std::string& key, Time fallback) {
  auto it = req.query.find(key);
  if (it == req.query.end() || it->second.empty()) return fallback;
  Time v = 0;
  auto [ptr, ec] = std::from_chars(it->second.data(), it->second.data() + it->second.size(), v);
  if (ec != std::errc() || ptr != it->second.data() + it->second.size()) {
    throw Error(ErrorCode::InvalidArgument, "query parameter '" + key + "' must be an integer");
  }
  return v;
}

ApiResponse not_found(const std::string& what) { return {404, Json{{"error", "NotFound"}, {"message", what}}}; }
ApiResponse bad_method() { return {405, Json{{"error", "MethodNotAllowed"}, {"message", "method not allowed"}}}; }

Json session_json(Session& s) {
  ModelPool& pool = s.pool();
  Json j;
  j["id"] = s.id();
  j["descriptor"] = s.descriptor().to_json();
  j["clock"] = pool.clock();
  j["models"] = pool.models().size();
  j["pending"] = pool.pending_count();
  if (pool.options().mode == ReasoningMode::Epistemic && !pool.models().empty()) {
    j["knowledge"] = to_json(pool.epistemic_state());
  }
  return j;
}

Json queue(Session& s, const std::vector<std::string>& lines, bool events) {
  ModelPool& pool = s.pool();
  std::vector<GroundFact> facts;
  for (const std::string& line : lines) {
    GroundFact f = parse_statement(line, pool.clock(), &pool.domain());
    bool is_event = f.kind == GroundFact::Kind::Happens;
    if (is_event != events) {
      throw Error(ErrorCode::InvalidArgument,
                  "'" + line + "' is " + (is_event ? "an event; post it to /events" : "an observation; post it to /observations"));
    }
    facts.push_back(std::move(f));
  }
  if (facts.empty()) throw Error(ErrorCode::InvalidArgument, "no statements given");
  Json queued = Json::array();
  for (GroundFact& f : facts) {
    queued.push_back(to_json(f));
    pool.submit(std::move(f));
  }
  return Json{{"queued", std::move(queued)}, {"pending", pool.pending_count()}};
}

}  // namespace

ApiResponse Service::handle(const ApiRequest& req) {
  try {
    return route(req, split_path(req.path));
  } catch (const Error& e) {
    return {http_status(e.code()), error_json(e)};
  } catch (const std::exception& e) {
    return {500, Json{{"error", "Internal"}, {"message", e.what()}}};
  }
}

ApiResponse Service::route(const ApiRequest& req, const std::vector<std::string>& parts) {
  if (parts.empty() || parts[0] != "sessions") return not_found(req.path);
  const std::string& m = req.method;
  if (parts.size() == 1) {
    if (m == "POST") {
      auto s = create(SessionDescriptor::from_json(parse_body(req.body)));
      std::lock_guard lock(s->mutex);
      return {201, session_json(*s)};
    }
    if (m == "GET") return {200, Json{{"sessions", session_ids()}}};
    return bad_method();
  }
  const std::string& id = parts[1];
  if (parts.size() == 2) {
    if (m == "GET") {
      auto s = find(id);
      std::lock_guard lock(s->mutex);
      return {200, session_json(*s)};
    }
    if (m == "DELETE") {
      if (!remove(id)) throw Error(ErrorCode::SessionNotFound, "no session '" + id + "'");
      return {204, Json()};
    }
    return bad_method();
  }
  const std::string& what = parts[2];
  auto s = find(id);
  std::lock_guard lock(s->mutex);
  ModelPool& pool = s->pool();

  if (parts.size() == 3 && (what == "events" || what == "observations")) {
    if (m != "POST") return bad_method();
    return {202, queue(*s, statements(parse_body(req.body)), what == "events")};
  }
  if (parts.size() == 3 && what == "sense") {
    if (m != "POST") return bad_method();
    if (pool.options().mode != ReasoningMode::Epistemic) {
      throw Error(ErrorCode::ModeUnavailable, "sensing needs an epistemic session");
    }
    Json body = parse_body(req.body);
    if (!body.contains("fluent") || !body["fluent"].is_string()) throw Error(ErrorCode::FormatError, "sense needs a fluent");
    bool value = body.value("value", true);
    Time t = body.value("time", kNextTick);
    Term f = parse_term(body["fluent"].get<std::string>());
    if (auto err = check_ground_term(pool.domain(), f, TemplateKind::Fluent)) throw Error(ErrorCode::ValidationError, *err);
    GroundFact fact = GroundFact::holds(f, value, t == kNextTick ? pool.clock() + 1 : t);
    Json out{{"queued", Json::array({to_json(fact)})}};
    pool.submit(std::move(fact));
    out["pending"] = pool.pending_count();
    return {202, out};
  }
  if (parts.size() == 3 && what == "tick") {
    if (m != "POST") return bad_method();
    Json body = parse_body(req.body);
    int count = body.value("count", 1);
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be positive");
    Json reports = Json::array();
    for (int i = 0; i < count; ++i) {
      TickReport r = pool.tick();
      s->stats.push_back(stats_json(r));
      Json jr = to_json(r);
      s->publish("tick", jr);
      reports.push_back(std::move(jr));
    }
    return {200, Json{{"clock", pool.clock()}, {"reports", std::move(reports)}}};
  }
  if (parts.size() == 3 && what == "cycle") {
    if (m != "POST") return bad_method();
    HybridSession* h = s->hybrid();
    if (!h) throw Error(ErrorCode::ModeUnavailable, "cycles need a hybrid session");
    std::vector<GroundFact> events;
    Json body = parse_body(req.body);
    std::vector<std::string> lines = statements(body);
    if (body.contains("events")) {
      for (const auto& e : body["events"]) {
        if (!e.is_string()) throw Error(ErrorCode::FormatError, "events must be statements");
        lines.push_back(e.get<std::string>());
      }
    }
    for (const std::string& line : lines) events.push_back(parse_statement(line, pool.clock(), &pool.domain()));
    CycleReport r = h->run_cycle(events);
    for (const TickReport& t : r.ticks) s->stats.push_back(stats_json(t));
    Json jr = to_json(r);
    s->publish("cycle", jr);
    return {200, jr};
  }
  if (parts.size() == 3 && what == "models") {
    if (m != "GET") return bad_method();
    return {200, model_tree_json(pool)};
  }
  if (parts.size() == 5 && what == "models" && parts[4] == "fluents") {
    if (m != "GET") return bad_method();
    const Model* model = pool.find_model(parts[3]);
    if (!model) return not_found("no live model '" + parts[3] + "' in session '" + id + "'");
    Time from = query_time(req, "from", model->wm.floor());
    Time to = query_time(req, "to", model->wm.clock());
    return {200, fluent_timeline_json(*model, from, to)};
  }
  if (parts.size() == 3 && what == "activities") {
    if (m != "GET") return bad_method();
    HybridSession* h = s->hybrid();
    if (!h) throw Error(ErrorCode::ModeUnavailable, "activities need a hybrid session");
    Json rec = Json::array();
    for (const RecognizedActivity& r : h->recognized()) rec.push_back(to_json(r));
    Json names = Json::array();
    for (const auto& [name, an] : h->repertoire()) names.push_back(name);
    Json j{{"repertoire", std::move(names)}, {"recognized", std::move(rec)}};
    j["last"] = h->history().empty() ? Json(nullptr) : to_json(h->history().back());
    return {200, j};
  }
  if (parts.size() == 3 && what == "stats") {
    if (m != "GET") return bad_method();
    return {200, Json{{"ticks", s->stats}}};
  }
  if (parts.size() == 3 && what == "stream") {
    if (m != "GET") return bad_method();
    auto from = static_cast<std::size_t>(std::max<Time>(0, query_time(req, "from", 0)));
    Json events = Json::array();
    for (std::size_t i = from; i < s->log.size(); ++i) events.push_back(s->log[i]);
    return {200, Json{{"events", std::move(events)}, {"next", s->log.size()}}};
  }
  return not_found(req.path);
}

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::thread thread;
  std::atomic<bool> stopping{false};

  explicit Impl(Service& s) : service(s) { setup(); }

  static ApiRequest to_api(const httplib::Request& r) {
    ApiRequest a;
    a.method = r.method;
    a.path = r.path;
    a.body = r.body;
    for (const auto& [k, v] : r.params) a.query[k] = v;
    return a;
  }

  void reply(const httplib::Request& r, httplib::Response& res) {
    ApiResponse out = service.handle(to_api(r));
    res.status = out.status;
    if (out.status != 204) res.set_content(out.body.dump(), "application/json");
  }

  void stream(const httplib::Request& r, httplib::Response& res) {
    std::string id = r.matches[1];
    if (r.has_param("poll")) {
      std::size_t from = r.has_param("from") ? std::stoul(r.get_param_value("from")) : 0;
      bool closed = false;
      auto events = service.wait_events(id, from, std::chrono::seconds(25), &closed);
      Json j{{"events", events}, {"next", from + events.size()}, {"closed", closed}};
      res.set_content(j.dump(), "application/json");
      return;
    }
    try {
      service.find(id);
    } catch (const Error& e) {
      res.status = http_status(e.code());
      res.set_content(error_json(e).dump(), "application/json");
      return;
    }
    auto next = std::make_shared<std::size_t>(r.has_param("from") ? std::stoul(r.get_param_value("from")) : 0);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, id, next](std::size_t, httplib::DataSink& sink) {
      if (stopping) return false;
      bool closed = false;
      auto events = service.wait_events(id, *next, std::chrono::milliseconds(500), &closed);
      if (events.empty()) {
        static const std::string keepalive = ": keepalive\n\n";
        if (!sink.write(keepalive.data(), keepalive.size())) return false;
      }
      for (const Json& e : events) {
        std::string chunk = "id: " + std::to_string(e["seq"].get<std::size_t>()) + "\nevent: " +
                            e["type"].get<std::string>() + "\ndata: " + e["data"].dump() + "\n\n";
        if (!sink.write(chunk.data(), chunk.size())) return false;
        ++*next;
      }
      if (closed) {
        sink.done();
      }
      return true;
    });
  }

  void setup() {
    server.Get(R"(/sessions/([^/]+)/stream)", [this](const httplib::Request& r, httplib::Response& res) { stream(r, res); });
    auto h = [this](const httplib::Request& r, httplib::Response& res) { reply(r, res); };
    server.Get(R"(/.*)", h);
    server.Post(R"(/.*)", h);
    server.Delete(R"(/.*)", h);
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(ErrorCode::InvalidArgument, "cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    if (impl_->stopping) return;
    throw Error(ErrorCode::InvalidArgument, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->stopping = true;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace ecr
