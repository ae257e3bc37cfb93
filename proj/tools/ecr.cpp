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

// ecr: batch runs, validation, hybrid replay and the HTTP service.

#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ecr/error.hpp"
#include "ecr/parser.hpp"
#include "ecr/service.hpp"

namespace {

using ecr::Error;
using ecr::ErrorCode;
using ecr::Json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct Settings {
  std::vector<std::string> domain;
  std::string networks;
  std::string trace;
  std::string explanations;
  long long horizon = 12;
  int rounds = 1;
  std::string mode = "classical";
  std::string kb_mode = "non-destructive";
  std::optional<double> threshold;
  std::size_t branch_cap = 1024;
  long long flush_before = -1;
  std::string format = "plain";
  std::string config;
  std::string host = "127.0.0.1";
  int port = 8080;
};

std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FormatError, "cannot read config " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::FormatError, path + ":" + std::to_string(n) + ": expected key = value");
    auto strip = [](std::string s) {
      auto x = s.find_first_not_of(" \t\r\"");
      auto y = s.find_last_not_of(" \t\r\"");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    out[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  return out;
}

// Fills every setting that was not given on the command line from the config file.
void apply_config(Settings& s, const CLI::App& app) {
  if (s.config.empty()) return;
  auto cfg = read_config(s.config);
  auto unset = [&](const char* flag) {
    const CLI::Option* o = app.get_option_no_throw(flag);
    return o && o->count() == 0;
  };
  auto number = [](const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw Error(ErrorCode::FormatError, "config key '" + key + "' needs a number");
    }
  };
  for (const auto& [key, value] : cfg) {
    std::string flag = "--" + key;
    if (key == "domain") {
      if (unset("--domain")) {
        s.domain.clear();
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) s.domain.push_back(item);
      }
    } else if (key == "networks") {
      if (unset("--networks")) s.networks = value;
    } else if (key == "trace") {
      if (unset("--trace")) s.trace = value;
    } else if (key == "explanations") {
      if (unset("--explanations")) s.explanations = value;
    } else if (key == "horizon") {
      if (unset("--horizon")) s.horizon = static_cast<long long>(number(key, value));
    } else if (key == "rounds") {
      if (unset("--rounds")) s.rounds = static_cast<int>(number(key, value));
    } else if (key == "mode") {
      if (unset("--mode")) s.mode = value;
    } else if (key == "kb-mode") {
      if (unset("--kb-mode")) s.kb_mode = value;
    } else if (key == "threshold") {
      if (unset("--threshold")) s.threshold = number(key, value);
    } else if (key == "branch-cap") {
      if (unset("--branch-cap")) s.branch_cap = static_cast<std::size_t>(number(key, value));
    } else if (key == "flush-before") {
      if (unset("--flush-before")) s.flush_before = static_cast<long long>(number(key, value));
    } else if (key == "format") {
      if (unset("--format")) s.format = value;
    } else if (key == "host") {
      if (unset("--host")) s.host = value;
    } else if (key == "port") {
      if (unset("--port")) s.port = static_cast<int>(number(key, value));
    } else {
      throw Error(ErrorCode::FormatError, "unknown config key '" + key + "'");
    }
  }
}

ecr::SessionDescriptor descriptor(const Settings& s) {
  ecr::SessionDescriptor d;
  d.mode = ecr::parse_session_mode(s.mode);
  d.kb_mode = ecr::parse_kb_mode(s.kb_mode);
  d.domain_files = s.domain;
  d.network_dir = s.networks;
  d.explanations = s.explanations;
  d.branch_cap = s.branch_cap;
  if (d.mode == ecr::SessionMode::Hybrid) {
    if (!s.threshold) throw Error(ErrorCode::InvalidArgument, "hybrid runs need --threshold");
    d.config.threshold = *s.threshold;
    d.config.check();
  }
  if (d.domain_files.empty()) throw Error(ErrorCode::InvalidArgument, "--domain is required");
  return d;
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::ValidationError:
    case ErrorCode::UnknownSort:
    case ErrorCode::SchemaError:
    case ErrorCode::IncompleteCPT:
    case ErrorCode::CycleError:
    case ErrorCode::FormatError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ModeUnavailable:
    case ErrorCode::UnknownExplanation:
    case ErrorCode::MissingNetwork: return kExitValidation;
    default: return kExitRuntime;
  }
}

std::string join(const std::vector<ecr::Term>& terms) {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += ", ";
    out += t.to_string();
  }
  return out;
}

void print_state_plain(std::ostream& os, ecr::ModelPool& pool) {
  os << "t=" << pool.clock() << " models=" << pool.models().size();
  if (pool.options().mode == ecr::ReasoningMode::Epistemic) {
    const auto& es = pool.epistemic_state();
    os << "\n  known true: " << join(es.known_true().sorted());
    os << "\n  known false: " << join(es.known_false().sorted());
    os << "\n  unknown: " << join(es.unknown().sorted());
    for (const auto& h : es.hcds) os << "\n  hcd: " << h.to_string();
    if (auto it = es.potentials.find(pool.clock()); it != es.potentials.end()) {
      for (const auto& p : it->second) os << "\n  potential: " << p.to_string();
    }
    os << "\n";
    return;
  }
  if (pool.models().size() == 1) {
    os << " | " << join(pool.models().front().wm.current().holds.sorted()) << "\n";
    return;
  }
  os << "\n";
  for (const auto& m : pool.models()) os << "  " << m.id << ": " << join(m.wm.current().holds.sorted()) << "\n";
}

Json state_json(ecr::ModelPool& pool) {
  Json j;
  j["time"] = pool.clock();
  if (pool.options().mode == ecr::ReasoningMode::Epistemic) {
    j["knowledge"] = ecr::to_json(pool.epistemic_state());
    return j;
  }
  Json models = Json::array();
  for (const auto& m : pool.models()) {
    models.push_back(Json{{"id", m.id}, {"holds", ecr::to_json(m.wm.current().holds)}});
  }
  j["models"] = std::move(models);
  return j;
}

int cmd_run(const Settings& s) {
  ecr::SessionDescriptor d = descriptor(s);
  if (d.mode == ecr::SessionMode::Hybrid) throw Error(ErrorCode::InvalidArgument, "use 'replay' for hybrid runs");
  ecr::Session session("run", d);
  ecr::ModelPool& pool = session.pool();
  const bool json = s.format == "json";
  Json ticks = Json::array();
  auto emit = [&](const ecr::TickReport* r) {
    if (json) {
      Json j = state_json(pool);
      j["report"] = r ? ecr::to_json(*r) : ecr::to_json(pool.initial_report());
      ticks.push_back(std::move(j));
    } else {
      print_state_plain(std::cout, pool);
      if (r) {
        for (const auto& t : r->eliminated) std::cout << "  eliminated " << t.id << " (" << t.reason << ": " << t.detail << ")\n";
      }
    }
  };
  emit(nullptr);
  int status = kExitOk;
  try {
    while (pool.clock() < s.horizon) {
      ecr::TickReport r = pool.tick();
      if (s.flush_before >= 0 && d.kb_mode == ecr::KbMode::NonDestructive && pool.clock() > s.flush_before) {
        pool.flush_before(pool.clock() - s.flush_before);
      }
      emit(&r);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::GlobalInconsistency && e.code() != ErrorCode::BranchCapExceeded) throw;
    std::cerr << e.what() << "\n";
    status = kExitRuntime;
  }
  if (json) std::cout << Json{{"ticks", std::move(ticks)}}.dump(2) << "\n";
  return status;
}

int cmd_validate(const Settings& s) {
  if (s.domain.empty()) throw Error(ErrorCode::InvalidArgument, "--domain is required");
  std::vector<std::filesystem::path> paths(s.domain.begin(), s.domain.end());
  ecr::ParseResult r = ecr::parse_domain_paths(paths);
  if (!r.ok()) {
    for (const auto& d : r.diagnostics) std::cerr << d.to_string() << "\n";
    return kExitValidation;
  }
  ecr::check_poss_activity_weights(*r.domain);
  const auto& dom = *r.domain;
  if (s.format == "json") {
    std::cout << Json{{"valid", true},
                      {"sorts", dom.sorts.size()},
                      {"templates", dom.templates.size()},
                      {"sigma", dom.sigma.size()},
                      {"psi", dom.psi.size()},
                      {"delta2", dom.delta2.size()},
                      {"facts", dom.fact_count()},
                      {"usesPastTime", r.uses_past_time}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "ok: " << dom.sorts.size() << " sorts, " << dom.templates.size() << " templates, " << dom.sigma.size()
              << " effect axioms, " << dom.psi.size() << " state constraints, " << dom.delta2.size() << " triggers, "
              << dom.fact_count() << " facts\n";
    for (const auto& d : r.diagnostics) std::cerr << d.to_string() << "\n";
  }
  return kExitOk;
}

int cmd_replay(const Settings& s) {
  Settings hs = s;
  hs.mode = "hybrid";
  ecr::SessionDescriptor d = descriptor(hs);
  if (s.trace.empty()) throw Error(ErrorCode::InvalidArgument, "--trace is required");
  ecr::Session session("replay", d);
  ecr::HybridSession& h = *session.hybrid();
  auto schedule = ecr::ingest_trace(s.trace, s.rounds, 15000, &h.pool().domain());
  const bool json = s.format == "json";
  Json cycles = Json::array();
  Json stats = Json::array();
  int status = kExitOk;
  try {
    for (const auto& fact : schedule) {
      ecr::CycleReport r = h.run_cycle({fact});
      for (const auto& t : r.ticks) stats.push_back(ecr::stats_json(t));
      if (json) {
        cycles.push_back(ecr::to_json(r));
        continue;
      }
      std::cout << "cycle t=" << r.start + 1 << ".." << r.end << " " << r.events.front().term.to_string() << "\n";
      for (const auto& p : r.poss) std::cout << "  poss " << p.fluent().to_string() << "\n";
      for (const auto& [a, c] : r.confidence) std::cout << "  confidence " << a << " = " << c << "\n";
      for (const auto& a : r.recognized) std::cout << "  recognized " << a.user << " " << a.activity << "\n";
      for (const auto& a : r.actions) {
        std::cout << "  action " << ecr::to_string(a.kind) << " " << a.payload << " (cause " << a.cause.activity << ")\n";
      }
      double ms = 0;
      std::size_t facts = 0;
      for (const auto& t : r.ticks) {
        ms += t.elapsed_ms;
        facts = t.fact_count;
      }
      std::cout << "  stats facts=" << facts << " ms=" << ms << "\n";
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::GlobalInconsistency && e.code() != ErrorCode::BranchCapExceeded) throw;
    std::cerr << e.what() << "\n";
    status = kExitRuntime;
  }
  if (json) std::cout << Json{{"cycles", std::move(cycles)}, {"statistics", std::move(stats)}}.dump(2) << "\n";
  return status;
}

ecr::HttpServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const Settings& s) {
  ecr::Service service;
  if (!s.domain.empty()) {
    auto session = service.create(descriptor(s));
    std::cerr << "session " << session->id() << " created\n";
  }
  ecr::HttpServer server(service);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << s.host << ":" << s.port << "\n";
  server.run(s.host, s.port);
  g_server = nullptr;
  return kExitOk;
}

void add_common(CLI::App* cmd, Settings& s) {
  cmd->add_option("--domain", s.domain, "Domain file or directory (repeatable)");
  cmd->add_option("--mode", s.mode, "classical, epistemic or hybrid");
  cmd->add_option("--kb-mode", s.kb_mode, "non-destructive or semi-destructive");
  cmd->add_option("--branch-cap", s.branch_cap, "Maximum number of models");
  cmd->add_option("--format", s.format, "Output format")->check(CLI::IsMember({"json", "plain"}));
  cmd->add_option("--config", s.config, "key=value file mirroring the flags");
}

void add_hybrid(CLI::App* cmd, Settings& s) {
  cmd->add_option("--networks", s.networks, "Directory of activity networks");
  cmd->add_option("--explanations", s.explanations, "Explanation catalog");
  cmd->add_option("--threshold", s.threshold, "Recognition threshold in (0, 1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete event calculus reasoner with activity recognition"};
  app.require_subcommand(1);
  Settings s;

  auto* run = app.add_subcommand("run", "Project a narrative over a horizon");
  add_common(run, s);
  run->add_option("--horizon", s.horizon, "Last timepoint to compute");
  run->add_option("--flush-before", s.flush_before, "Keep only this many past states");

  auto* validate = app.add_subcommand("validate", "Parse and validate a domain");
  add_common(validate, s);

  auto* replay = app.add_subcommand("replay", "Replay a sensor trace through the recognition cycle");
  add_common(replay, s);
  add_hybrid(replay, s);
  replay->add_option("--trace", s.trace, "JSON-lines trace");
  replay->add_option("--rounds", s.rounds, "Number of rounds")->check(CLI::NonNegativeNumber);

  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  add_common(serve, s);
  add_hybrid(serve, s);
  serve->add_option("--host", s.host, "Bind address");
  serve->add_option("--port", s.port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    apply_config(s, *cmd);
    if (cmd == run) return cmd_run(s);
    if (cmd == validate) return cmd_validate(s);
    if (cmd == replay) return cmd_replay(s);
    return cmd_serve(s);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
