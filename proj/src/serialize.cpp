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

#include "ecr/serialize.hpp"

#include <algorithm>

namespace ecr {

Json to_json(const Term& t) { return t.to_string(); }

Json to_json(const std::vector<Term>& terms) {
  Json a = Json::array();
  for (const Term& t : terms) a.push_back(t.to_string());
  return a;
}

Json to_json(const FluentSet& set) { return to_json(set.sorted()); }

Json to_json(const GroundFact& f) {
  Json j;
  switch (f.kind) {
    case GroundFact::Kind::Happens: j["kind"] = "happens"; break;
    case GroundFact::Kind::Holds: j["kind"] = "holds"; break;
    case GroundFact::Kind::Released: j["kind"] = "released"; break;
  }
  j["term"] = f.term.to_string();
  if (f.kind == GroundFact::Kind::Holds) j["value"] = f.value;
  j["time"] = f.time;
  j["text"] = f.to_string();
  return j;
}

Json to_json(const Tombstone& t) {
  return Json{{"id", t.id}, {"reason", t.reason}, {"detail", t.detail}, {"at", t.at}};
}

Json to_json(const TickReport& r) {
  Json j;
  j["time"] = r.time;
  j["surviving"] = r.surviving;
  j["created"] = r.created;
  Json dead = Json::array();
  for (const Tombstone& t : r.eliminated) dead.push_back(to_json(t));
  j["eliminated"] = std::move(dead);
  j["events"] = to_json(r.events);
  j["triggered"] = to_json(r.triggered);
  j["factCount"] = r.fact_count;
  j["ruleFirings"] = r.rule_firings;
  j["elapsedMs"] = r.elapsed_ms;
  Json timing = Json::array();
  for (const ModelTiming& m : r.timing) timing.push_back(Json{{"id", m.id}, {"micros", m.micros}});
  j["timing"] = std::move(timing);
  return j;
}

Json to_json(const EpistemicState& es) {
  Json j;
  j["knownTrue"] = to_json(es.known_true());
  j["knownFalse"] = to_json(es.known_false());
  j["unknown"] = to_json(es.unknown());
  Json h = Json::array();
  for (const Hcd& c : es.hcds) h.push_back(Json{{"clause", c.to_string()}, {"born", c.born}});
  j["hcds"] = std::move(h);
  Json p = Json::array();
  for (const auto& [t, list] : es.potentials) {
    for (const PotentialEvent& e : list) p.push_back(Json{{"event", e.to_string()}, {"time", t}});
  }
  j["potentials"] = std::move(p);
  return j;
}

Json to_json(const PossActivity& p) {
  return Json{{"user", p.user}, {"activity", p.activity}, {"explanation", p.explanation}, {"weight", p.weight}};
}

Json to_json(const RecognizedActivity& r) {
  return Json{{"user", r.user}, {"activity", r.activity}, {"confidence", r.confidence}, {"at", r.at}};
}

Json to_json(const DoAction& d) {
  return Json{{"kind", std::string(to_string(d.kind))},
              {"payload", d.payload},
              {"fluent", d.fluent.to_string()},
              {"at", d.at},
              {"cause", to_json(d.cause)}};
}

Json to_json(const CycleReport& r) {
  Json j;
  j["start"] = r.start;
  j["end"] = r.end;
  Json ev = Json::array();
  for (const GroundFact& f : r.events) ev.push_back(f.to_string());
  j["events"] = std::move(ev);
  Json poss = Json::array();
  for (const PossActivity& p : r.poss) poss.push_back(to_json(p));
  j["poss"] = std::move(poss);
  Json conf = Json::object();
  for (const auto& [a, p] : r.confidence) conf[a] = p;
  j["confidence"] = std::move(conf);
  Json rec = Json::array();
  for (const RecognizedActivity& a : r.recognized) rec.push_back(to_json(a));
  j["recognized"] = std::move(rec);
  Json acts = Json::array();
  for (const DoAction& d : r.actions) acts.push_back(to_json(d));
  j["actions"] = std::move(acts);
  Json ticks = Json::array();
  for (const TickReport& t : r.ticks) ticks.push_back(to_json(t));
  j["ticks"] = std::move(ticks);
  return j;
}

Json error_json(const Error& e) {
  std::string msg = e.what();
  std::string code(to_string(e.code()));
  if (msg.rfind(code + ": ", 0) == 0) msg = msg.substr(code.size() + 2);
  return Json{{"error", code}, {"message", msg}};
}

Json stats_json(const TickReport& r) {
  return Json{{"time", r.time},
              {"factCount", r.fact_count},
              {"ruleFirings", r.rule_firings},
              {"modelsAlive", r.surviving.size()},
              {"elapsedMs", r.elapsed_ms}};
}

Json model_tree_json(const ModelPool& pool) {
  Json j;
  j["clock"] = pool.clock();
  Json live = Json::array();
  for (const Model& m : pool.models()) {
    Json n{{"id", m.id}, {"parent", m.parent ? Json(*m.parent) : Json(nullptr)}, {"bornAt", m.born_at}, {"alive", true}};
    live.push_back(std::move(n));
  }
  j["models"] = std::move(live);
  Json dead = Json::array();
  for (const Tombstone& t : pool.graveyard()) {
    Json n = to_json(t);
    n["alive"] = false;
    dead.push_back(std::move(n));
  }
  j["eliminated"] = std::move(dead);
  return j;
}

Json fluent_timeline_json(const Model& m, Time from, Time to) {
  Json j;
  j["model"] = m.id;
  from = std::max<Time>(from, 0);
  to = std::min<Time>(to, m.wm.clock());
  j["from"] = from;
  j["to"] = to;
  Json rows = Json::array();
  for (Time t = from; t <= to; ++t) {
    const Snapshot& s = m.wm.at(t);
    rows.push_back(Json{{"time", t},
                        {"holds", to_json(s.holds)},
                        {"released", to_json(s.released)},
                        {"undetermined", to_json(s.undetermined)}});
  }
  j["timeline"] = std::move(rows);
  if (m.epistemic) j["knowledge"] = to_json(*m.epistemic);
  return j;
}

}  // namespace ecr
