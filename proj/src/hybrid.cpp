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

#include "ecr/hybrid.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ecr/error.hpp"

namespace ecr {

namespace {

constexpr const char* kPossActivity = "PossActivity";
constexpr const char* kDoAction = "DoAction";

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

void check_weight_term(const Term& fluent, const std::string& where) {
  if (fluent.name() != kPossActivity) return;
  if (fluent.arity() != 4) {
    throw Error(ErrorCode::ValidationError, where + ": PossActivity takes (user, activity, explanation, weight)");
  }
  const Term& w = fluent.args()[3];
  if (w.is_variable()) return;
  if (!w.is_integer() || w.value() < 1 || w.value() > 5) {
    throw Error(ErrorCode::ValidationError, where + ": PossActivity weight must be an integer in 1..5, got " + w.to_string());
  }
}

}  // namespace

Term PossActivity::fluent() const {
  return Term::compound(kPossActivity, {Term::constant(user), Term::constant(activity), Term::constant(explanation),
                                        Term::integer(weight)});
}

std::string_view to_string(DoActionKind k) {
  switch (k) {
    case DoActionKind::Notify: return "Notify";
    case DoActionKind::Alert: return "Alert";
    case DoActionKind::DeviceCommand: return "DeviceCommand";
  }
  return "?";
}

ExplanationCatalog ExplanationCatalog::parse(std::string_view text) {
  std::map<std::string, std::string> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::FormatError, "explanation line " + std::to_string(n) + " has no '='");
    }
    std::string id = trim(t.substr(0, eq));
    if (id.empty()) throw Error(ErrorCode::FormatError, "explanation line " + std::to_string(n) + " has no id");
    entries[id] = trim(t.substr(eq + 1));
  }
  return ExplanationCatalog(std::move(entries));
}

ExplanationCatalog ExplanationCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FormatError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const std::string& ExplanationCatalog::text(const std::string& id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorCode::UnknownExplanation, "no explanation '" + id + "'");
  return it->second;
}

bool HybridConfig::evaluates(int weight) const {
  auto it = gating.find(weight);
  return it == gating.end() || it->second == Gate::Evaluate;
}

void HybridConfig::check() const {
  if (!(threshold > 0 && threshold < 1)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must lie in (0, 1), got " + std::to_string(threshold));
  }
  for (const auto& [w, g] : gating) {
    if (w < 1 || w > 5) throw Error(ErrorCode::InvalidArgument, "gating names weight " + std::to_string(w));
  }
}

void check_poss_activity_weights(const DomainDescription& domain) {
  for (const auto* set : {&domain.sigma, &domain.psi}) {
    for (const Axiom& a : *set) check_weight_term(a.head.subject, a.to_string());
  }
  for (const auto& [t, facts] : domain.gamma) {
    for (const GroundFact& f : facts) check_weight_term(f.term, f.to_string());
  }
}

std::vector<PossActivity> collect_poss_activities(const ModelPool& pool, Time t, const ExplanationCatalog* catalog) {
  std::vector<PossActivity> out;
  if (pool.models().empty()) return out;
  const Snapshot& first = pool.models().front().wm.at(t);
  const auto* bucket = first.holds.with_functor(kPossActivity);
  if (!bucket) return out;
  for (const Term& f : *bucket) {
    bool everywhere = std::all_of(pool.models().begin(), pool.models().end(),
                                  [&](const Model& m) { return m.wm.at(t).value(f) == Truth::True; });
    if (!everywhere) continue;
    check_weight_term(f, f.to_string());
    const auto& a = f.args();
    if (!a[0].is_constant() || !a[1].is_constant() || !a[2].is_constant()) {
      throw Error(ErrorCode::ValidationError, f.to_string() + " is not a well-formed PossActivity");
    }
    if (catalog) catalog->text(a[2].name());
    out.push_back({a[0].name(), a[1].name(), a[2].name(), static_cast<int>(a[3].value())});
  }
  std::sort(out.begin(), out.end());
  return out;
}

PoolSensorView::PoolSensorView(const ModelPool& pool) : pool_(pool) {
  for (const Model& m : pool.models()) views_.emplace_back(m.wm, pool.domain());
}

double PoolSensorView::now() const { return views_.empty() ? 0.0 : views_.front().now(); }

bool PoolSensorView::is_event(const std::string& functor) const {
  const TemplateDecl* t = pool_.domain().find_template(functor);
  return t && t->kind == TemplateKind::Event;
}

std::optional<bool> PoolSensorView::fluent_now(const Term& fluent) const {
  if (views_.empty()) return std::nullopt;
  std::optional<bool> v = views_.front().fluent_now(fluent);
  for (std::size_t i = 1; i < views_.size() && v; ++i) {
    if (views_[i].fluent_now(fluent) != v) return std::nullopt;
  }
  return v;
}

std::vector<double> PoolSensorView::occurrences(const Term& pattern) const {
  return views_.empty() ? std::vector<double>{} : views_.front().occurrences(pattern);
}

std::optional<double> PoolSensorView::true_for(const Term& fluent) const {
  std::optional<double> best;
  for (const MemorySensorView& v : views_) {
    auto d = v.true_for(fluent);
    if (!d) return std::nullopt;
    best = best ? std::min(*best, *d) : *d;
  }
  return best;
}

bool PoolSensorView::true_within(const Term& fluent, double seconds) const {
  if (views_.empty()) return false;
  return std::all_of(views_.begin(), views_.end(), [&](const MemorySensorView& v) { return v.true_within(fluent, seconds); });
}

ScoreResult score(const std::vector<PossActivity>& poss, const SensorView& view, const Repertoire& repertoire,
                  const HybridConfig& config) {
  ScoreResult r;
  std::set<std::pair<std::string, std::string>> wanted;
  for (const PossActivity& p : poss) {
    if (config.evaluates(p.weight)) wanted.insert({p.user, p.activity});
  }
  for (const auto& [user, activity] : wanted) {
    auto it = repertoire.find(activity);
    if (it == repertoire.end()) throw Error(ErrorCode::MissingNetwork, "no activity network for '" + activity + "'");
    const Ebn& g = it->second.recognition;
    Substitution bindings{{"user", Term::constant(user)}};
    ObservationVector obs = build_observation_vector(g, view, bindings);
    double p = infer(g, g.target, obs);
    r.by_user[{user, activity}] = p;
    auto [slot, fresh] = r.confidence.emplace(activity, p);
    if (fresh) r.evaluated.push_back(activity);
    else slot->second = std::max(slot->second, p);
  }
  return r;
}

std::vector<GroundFact> parse_trace(std::string_view text, int rounds, long long offset_ms,
                                    const DomainDescription* domain) {
  if (rounds < 0) throw Error(ErrorCode::InvalidArgument, "rounds must be non-negative");
  std::vector<std::pair<std::string, std::vector<Term>>> base;
  std::vector<long long> payloads;
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    auto fail = [&](const std::string& why) -> Error {
      return Error(ErrorCode::FormatError, "trace line " + std::to_string(n) + ": " + why);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw fail(e.what());
    }
    if (!j.is_object()) throw fail("expected an object");
    if (!j.contains("event") || !j["event"].is_string()) throw fail("missing string field 'event'");
    if (!j.contains("payloadMs") || !j["payloadMs"].is_number_integer()) throw fail("missing integer field 'payloadMs'");
    std::vector<Term> args;
    if (j.contains("args")) {
      if (!j["args"].is_array()) throw fail("'args' must be an array");
      for (const auto& a : j["args"]) {
        if (a.is_number_integer()) {
          args.push_back(Term::integer(a.get<long long>()));
        } else if (a.is_string() && !a.get<std::string>().empty() && std::isupper(static_cast<unsigned char>(a.get<std::string>()[0]))) {
          args.push_back(Term::constant(a.get<std::string>()));
        } else {
          throw fail("arguments must be integers or capitalized constants");
        }
      }
    }
    std::string functor = j["event"].get<std::string>();
    if (functor.empty() || !std::isupper(static_cast<unsigned char>(functor[0]))) throw fail("bad event name '" + functor + "'");
    base.emplace_back(std::move(functor), std::move(args));
    payloads.push_back(j["payloadMs"].get<long long>());
  }
  std::vector<GroundFact> out;
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t i = 0; i < base.size(); ++i) {
      std::vector<Term> args = base[i].second;
      args.push_back(Term::integer(payloads[i] + static_cast<long long>(r) * offset_ms));
      Term e = Term::compound(base[i].first, std::move(args));
      if (domain) {
        if (auto err = check_ground_term(*domain, e, TemplateKind::Event)) {
          throw Error(ErrorCode::FormatError, "trace event " + e.to_string() + ": " + *err);
        }
      }
      out.push_back(GroundFact::happens(std::move(e), kNextTick));
    }
  }
  return out;
}

std::vector<GroundFact> ingest_trace(const std::filesystem::path& path, int rounds, long long offset_ms,
                                     const DomainDescription* domain) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FormatError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str(), rounds, offset_ms, domain);
}

namespace {

DomainDescription checked(DomainDescription d) {
  check_poss_activity_weights(d);
  const TemplateDecl* rec = d.find_template("Recognize");
  if (!rec || rec->kind != TemplateKind::Event || rec->arg_sorts.size() != 2) {
    throw Error(ErrorCode::ValidationError, "a hybrid domain must declare event Recognize(user, activity)");
  }
  return d;
}

}  // namespace

HybridSession::HybridSession(DomainDescription domain, Repertoire repertoire, ExplanationCatalog catalog,
                             HybridConfig config, PoolOptions options)
    : pool_((config.check(), checked(std::move(domain))), options),
      repertoire_(std::move(repertoire)),
      catalog_(std::move(catalog)),
      config_(std::move(config)) {}

std::vector<DoAction> HybridSession::harvest(Time t) const {
  std::vector<DoAction> out;
  if (pool_.models().empty()) return out;
  const auto* bucket = pool_.models().front().wm.at(t).holds.with_functor(kDoAction);
  if (!bucket) return out;
  std::vector<Term> fluents(bucket->begin(), bucket->end());
  std::sort(fluents.begin(), fluents.end());
  for (const Term& f : fluents) {
    if (!pool_.query_holds(f, t).value || f.arity() != 4) continue;
    const auto& a = f.args();
    DoAction d;
    const std::string& kind = a[0].name();
    if (kind == "Notify") d.kind = DoActionKind::Notify;
    else if (kind == "Alert") d.kind = DoActionKind::Alert;
    else if (kind == "DeviceCommand") d.kind = DoActionKind::DeviceCommand;
    else continue;
    auto cause = std::find_if(recognized_.rbegin(), recognized_.rend(), [&](const RecognizedActivity& r) {
      return r.user == a[1].name() && r.activity == a[2].name();
    });
    if (cause == recognized_.rend()) continue;
    d.cause = *cause;
    d.payload = a[3].to_string();
    d.fluent = f;
    d.at = t;
    out.push_back(std::move(d));
  }
  return out;
}

CycleReport HybridSession::run_cycle(const std::vector<GroundFact>& external) {
  CycleReport r;
  r.start = pool_.clock();
  const Time next = r.start + 1;
  for (GroundFact f : external) {
    if (f.time == kNextTick) f.time = next;
    if (f.time != next) {
      throw Error(ErrorCode::InvalidArgument, f.to_string() + " is not scheduled for the next tick " + std::to_string(next));
    }
    pool_.submit(f);
    r.events.push_back(std::move(f));
  }
  auto collect = [&] {
    for (DoAction& d : harvest(pool_.clock())) {
      bool seen = std::any_of(r.actions.begin(), r.actions.end(), [&](const DoAction& x) { return x.fluent == d.fluent; });
      if (seen) continue;
      if (actuator_) actuator_(d);
      r.actions.push_back(std::move(d));
    }
  };

  r.ticks.push_back(pool_.tick());
  collect();
  r.ticks.push_back(pool_.tick());
  collect();

  const Time t = pool_.clock();
  r.poss = collect_poss_activities(pool_, t, &catalog_);
  PoolSensorView view(pool_);
  ScoreResult s = score(r.poss, view, repertoire_, config_);
  r.confidence = s.confidence;
  for (const auto& [key, p] : s.by_user) {
    if (p < config_.threshold) continue;
    RecognizedActivity ra{key.first, key.second, p, t};
    r.recognized.push_back(ra);
    recognized_.push_back(ra);
    Term already = Term::compound("Recognized", {Term::constant(ra.user), Term::constant(ra.activity)});
    const TemplateDecl* tpl = pool_.domain().find_template("Recognized");
    if (tpl && pool_.query_holds(already, t).value) continue;
    pool_.inject_now(Term::compound("Recognize", {Term::constant(ra.user), Term::constant(ra.activity)}));
  }

  r.ticks.push_back(pool_.tick());
  collect();
  r.end = pool_.clock();
  history_.push_back(r);
  return r;
}

}  // namespace ecr
