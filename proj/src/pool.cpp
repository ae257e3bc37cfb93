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

#include "ecr/pool.hpp"

#include <algorithm>
#include <chrono>

#include "ecr/error.hpp"
#include "ecr/parser.hpp"

namespace ecr {

std::string_view to_string(ReasoningMode m) { return m == ReasoningMode::Classical ? "classical" : "epistemic"; }

namespace {

using Clock = std::chrono::steady_clock;

double micros_since(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

Snapshot snapshot_of(const EpistemicState& es) {
  Snapshot s;
  es.known_true().for_each([&](const Term& f) { s.holds.insert(f); });
  es.unknown().for_each([&](const Term& f) {
    s.released.insert(f);
    s.undetermined.insert(f);
  });
  return s;
}

}  // namespace

ModelPool::ModelPool(DomainDescription domain, PoolOptions options) : domain_(std::move(domain)), options_(options) {
  domain_.rebuild_index();
  if (options_.kb_mode == KbMode::SemiDestructive && uses_past_time(domain_)) {
    throw Error(ErrorCode::ModeUnavailable, "the domain refers to past timepoints; semi-destructive storage is disabled");
  }
  if (options_.branch_cap == 0) throw Error(ErrorCode::InvalidArgument, "branch cap must be positive");
  initialize();
}

const Model* ModelPool::find_model(std::string_view id) const {
  for (const Model& m : models_) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

void ModelPool::initialize() {
  std::vector<GroundFact> init_obs;
  for (const auto& [t, facts] : domain_.gamma) {
    for (const GroundFact& f : facts) {
      if (t == 0) init_obs.push_back(f);
      else pending_obs_[t == kNextTick ? 1 : t].push_back(f);
    }
  }
  for (const auto& [t, facts] : domain_.delta1) {
    for (const GroundFact& f : facts) pending_events_[t == kNextTick ? 1 : t].push_back(f);
  }

  Model m0;
  m0.id = "m0";
  m0.wm = WorkingMemory(options_.kb_mode);
  initial_.time = 0;
  if (auto it = pending_events_.find(0); it != pending_events_.end()) {
    for (const GroundFact& f : it->second) initial_.events.push_back(f.term);
  }
  auto start = Clock::now();
  std::vector<Model> out;

  if (options_.mode == ReasoningMode::Epistemic) {
    EpistemicState es(true);
    for (const GroundFact& f : init_obs) {
      if (f.kind == GroundFact::Kind::Holds) {
        m0.wm.observed().insert(f.term);
        es.set(f.term, f.value);
      }
    }
    for (const GroundFact& f : init_obs) {
      if (f.kind == GroundFact::Kind::Released) es.forget(f.term);
    }
    m0.wm.commit(snapshot_of(es));
    m0.epistemic = std::move(es);
    finish_model(m0, 0, initial_);
    out.push_back(std::move(m0));
  } else {
    Snapshot s;
    std::map<Term, bool> seen;
    for (const GroundFact& f : init_obs) {
      if (f.kind != GroundFact::Kind::Released) continue;
      s.released.insert(f.term);
      s.undetermined.insert(f.term);
    }
    for (const GroundFact& f : init_obs) {
      if (f.kind != GroundFact::Kind::Holds) continue;
      auto [it, fresh] = seen.emplace(f.term, f.value);
      if (!fresh && it->second != f.value) {
        throw Error(ErrorCode::GlobalInconsistency, "contradictory observations of " + f.term.to_string() + " at 0");
      }
      m0.wm.observed().insert(f.term);
      s.undetermined.erase(f.term);
      if (f.value) s.holds.insert(f.term);
    }
    m0.wm.commit(std::move(s));
    std::size_t budget = 0;
    std::vector<Snapshot> leaves;
    try {
      leaves = branch(m0.wm.current(), {}, 0, budget);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BranchCapExceeded) throw;
      failed_ = true;
      throw;
    }
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      Model child = m0;
      child.wm.current() = std::move(leaves[i]);
      if (i > 0) child.id.clear();
      finish_model(child, 0, initial_);
      out.push_back(std::move(child));
    }
  }
  pending_events_.erase(0);
  initial_.timing.push_back({"m0", micros_since(start)});
  models_ = std::move(out);
  std::size_t n = 0;
  for (Model& m : models_) {
    if (m.id.empty()) {
      m.parent = "m0";
      m.id = "m0." + std::to_string(++n);
      initial_.created.push_back(m.id);
    }
    initial_.surviving.push_back(m.id);
    initial_.fact_count += m.wm.fact_count();
  }
  if (auto* root = const_cast<Model*>(find_model("m0"))) root->spawned = n;
  initial_.elapsed_ms = micros_since(start) / 1000.0;
  if (models_.empty()) {
    failed_ = true;
    throw Error(ErrorCode::GlobalInconsistency, "no model satisfies the initial state");
  }
}

std::vector<Snapshot> ModelPool::branch(Snapshot s, const FluentSet& prefer_true, Time t, std::size_t& budget) const {
  std::vector<Snapshot> out;
  std::vector<Snapshot> stack;
  stack.push_back(std::move(s));
  // Depth-first; children are pushed in reverse so the preferred value comes out first.
  while (!stack.empty()) {
    Snapshot cur = std::move(stack.back());
    stack.pop_back();
    try {
      close_constraints(cur, domain_, t);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ConstraintContradiction) continue;
      throw;
    }
    if (cur.undetermined.empty()) {
      if (++budget > options_.branch_cap) {
        throw Error(ErrorCode::BranchCapExceeded,
                    "branching at " + std::to_string(t) + " exceeds the cap of " + std::to_string(options_.branch_cap) + " models");
      }
      out.push_back(std::move(cur));
      continue;
    }
    std::optional<Term> pick;
    cur.undetermined.for_each([&](const Term& f) {
      if (!pick || f < *pick) pick = f;
    });
    bool first = prefer_true.contains(*pick);
    Snapshot other = cur;
    other.undetermined.erase(*pick);
    if (!first) other.holds.insert(*pick);
    cur.undetermined.erase(*pick);
    if (first) cur.holds.insert(*pick);
    stack.push_back(std::move(other));
    stack.push_back(std::move(cur));
  }
  return out;
}

void ModelPool::kill(const Model& m, std::string reason, std::string detail, Time t, TickReport& report) {
  Tombstone ts{m.id, std::move(reason), std::move(detail), t};
  report.eliminated.push_back(ts);
  graveyard_.push_back(std::move(ts));
}

void ModelPool::finish_model(Model& m, Time t, TickReport& report) {
  if (auto it = pending_events_.find(t); it != pending_events_.end()) {
    for (const GroundFact& f : it->second) m.wm.add_event(t, f.term);
  }
  std::vector<Term> fired = m.epistemic ? fire_epistemic_triggers(*m.epistemic, m.wm, domain_, t)
                                        : fire_triggers(m.wm, domain_, t);
  report.rule_firings += fired.size();
  for (const Term& e : fired) {
    if (std::find(report.triggered.begin(), report.triggered.end(), e) == report.triggered.end()) {
      report.triggered.push_back(e);
    }
  }
}

void ModelPool::step_classical(std::vector<Model>& out, Model&& m, Time t, std::size_t& budget, TickReport& report) {
  FluentSet prefer;
  {
    const Snapshot& prev = m.wm.current();
    prev.released.for_each([&](const Term& f) {
      if (prev.holds.contains(f)) prefer.insert(f);
    });
  }
  EffectSet effects;
  try {
    effects = derive_effects(m.wm, domain_, t);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Inconsistency) throw;
    kill(m, "inconsistency", e.what(), t + 1, report);
    return;
  }
  report.rule_firings += effects.firings;
  effects.initiated.for_each([&](const Term& f) { m.wm.observed().insert(f); });
  effects.terminated.for_each([&](const Term& f) { m.wm.observed().insert(f); });
  advance(m.wm, effects, t);
  m.wm.record_effects(t, std::move(effects));

  Snapshot& s = m.wm.current();
  if (auto it = pending_obs_.find(t + 1); it != pending_obs_.end()) {
    for (const GroundFact& f : it->second) {
      if (f.kind == GroundFact::Kind::Released) {
        s.holds.erase(f.term);
        s.released.insert(f.term);
        s.undetermined.insert(f.term);
      }
    }
    for (const GroundFact& f : it->second) {
      if (f.kind != GroundFact::Kind::Holds) continue;
      m.wm.observed().insert(f.term);
      Truth cur = s.value(f.term);
      if (cur == Truth::Released) {
        s.undetermined.erase(f.term);
        if (f.value) s.holds.insert(f.term);
      } else if ((cur == Truth::True) != f.value) {
        kill(m, "observation", f.to_string(), t + 1, report);
        return;
      }
    }
  }

  std::vector<Snapshot> leaves = branch(std::move(s), prefer, t + 1, budget);
  if (leaves.empty()) {
    kill(m, "constraint", "no assignment satisfies the state constraints", t + 1, report);
    return;
  }
  std::string parent = m.id;
  for (std::size_t i = 1; i < leaves.size(); ++i) {
    Model child = m;
    child.id.clear();
    child.parent = parent;
    child.born_at = t + 1;
    child.spawned = 0;
    child.wm.current() = std::move(leaves[i]);
    finish_model(child, t + 1, report);
    out.push_back(std::move(child));
  }
  m.wm.current() = std::move(leaves.front());
  finish_model(m, t + 1, report);
  out.insert(out.end() - static_cast<std::ptrdiff_t>(leaves.size() - 1), std::move(m));
}

void ModelPool::step_epistemic(std::vector<Model>& out, Model&& m, Time t, TickReport& report) {
  try {
    EpistemicState next = epistemic_step(*m.epistemic, domain_, m.wm.narrative(t), t);
    m.wm.commit(snapshot_of(next));
    if (auto it = pending_obs_.find(t + 1); it != pending_obs_.end()) {
      for (const GroundFact& f : it->second) {
        if (f.kind == GroundFact::Kind::Holds) {
          m.wm.observed().insert(f.term);
          sense(next, f.term, f.value, t + 1);
        } else if (f.kind == GroundFact::Kind::Released) {
          next.forget(f.term);
        }
      }
    }
    m.epistemic = std::move(next);
    m.wm.current() = snapshot_of(*m.epistemic);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::KnowledgeInconsistency && e.code() != ErrorCode::Inconsistency) throw;
    kill(m, "knowledge", e.what(), t + 1, report);
    return;
  }
  finish_model(m, t + 1, report);
  m.wm.current() = snapshot_of(*m.epistemic);
  out.push_back(std::move(m));
}

void ModelPool::submit(GroundFact fact) {
  if (fact.time == kNextTick) fact.time = clock_ + 1;
  if (fact.time <= clock_) {
    throw Error(ErrorCode::RejectPast, fact.to_string() + " is not after the current clock " + std::to_string(clock_));
  }
  auto& queue = fact.kind == GroundFact::Kind::Happens ? pending_events_ : pending_obs_;
  queue[fact.time].push_back(std::move(fact));
}

GroundFact ModelPool::submit_statement(std::string_view line) {
  GroundFact f = parse_statement(line, clock_, &domain_);
  submit(f);
  return f;
}

std::size_t ModelPool::pending_count() const {
  std::size_t n = 0;
  for (const auto& [t, v] : pending_events_) n += v.size();
  for (const auto& [t, v] : pending_obs_) n += v.size();
  return n;
}

void ModelPool::inject_now(const Term& event) {
  if (auto err = check_ground_term(domain_, event, TemplateKind::Event)) throw Error(ErrorCode::ValidationError, *err);
  for (Model& m : models_) {
    m.wm.add_event(clock_, event);
    if (m.epistemic) {
      fire_epistemic_triggers(*m.epistemic, m.wm, domain_, clock_);
      m.wm.current() = snapshot_of(*m.epistemic);
    } else {
      fire_triggers(m.wm, domain_, clock_);
    }
  }
}

TickReport ModelPool::tick() {
  if (models_.empty()) throw Error(ErrorCode::GlobalInconsistency, "the model pool is empty");
  if (failed_) throw Error(ErrorCode::BranchCapExceeded, "the pool exceeded its branch cap and cannot advance");
  const Time t = clock_;
  TickReport report;
  report.time = t + 1;
  auto start = Clock::now();
  std::vector<Model> out;
  std::size_t budget = 0;
  std::vector<Model> input = std::move(models_);
  models_.clear();
  try {
    for (Model& m : input) {
      auto ms = Clock::now();
      std::string id = m.id;
      if (options_.mode == ReasoningMode::Epistemic) {
        step_epistemic(out, std::move(m), t, report);
      } else {
        step_classical(out, std::move(m), t, budget, report);
      }
      report.timing.push_back({id, micros_since(ms)});
    }
  } catch (...) {
    failed_ = true;
    models_ = std::move(out);
    throw;
  }

  // Identical states are merged; models that keep their lineage id win.
  if (out.size() > 1) {
    std::vector<std::size_t> order;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].id.empty() == (pass == 1)) order.push_back(i);
      }
    }
    std::vector<std::size_t> keep;
    for (std::size_t i : order) {
      bool dup = std::any_of(keep.begin(), keep.end(),
                             [&](std::size_t k) { return out[k].wm.current() == out[i].wm.current(); });
      if (!dup) keep.push_back(i);
      else if (!out[i].id.empty()) kill(out[i], "duplicate", "state equals another model", t + 1, report);
    }
    std::sort(keep.begin(), keep.end());
    std::vector<Model> kept;
    for (std::size_t i : keep) kept.push_back(std::move(out[i]));
    // Restore lineage order: each parent followed by its new children.
    std::vector<Model> ordered;
    std::vector<Model> newborn;
    for (Model& m : kept) (m.id.empty() ? newborn : ordered).push_back(std::move(m));
    for (Model& m : newborn) {
      auto it = std::find_if(ordered.begin(), ordered.end(), [&](const Model& p) { return p.id == *m.parent; });
      Model* parent = it != ordered.end() ? &*it : nullptr;
      std::size_t k = parent ? ++parent->spawned : 0;
      m.id = *m.parent + "." + std::to_string(k);
      report.created.push_back(m.id);
      ordered.push_back(std::move(m));
    }
    out = std::move(ordered);
  }
  if (auto it = pending_events_.find(t + 1); it != pending_events_.end()) {
    for (const GroundFact& f : it->second) report.events.push_back(f.term);
  }
  pending_events_.erase(t + 1);
  pending_obs_.erase(t + 1);
  clock_ = t + 1;
  for (const Model& m : out) {
    report.surviving.push_back(m.id);
    report.fact_count += m.wm.fact_count();
  }
  models_ = std::move(out);
  report.elapsed_ms = micros_since(start) / 1000.0;
  if (models_.empty()) {
    throw Error(ErrorCode::GlobalInconsistency, "every model was eliminated at " + std::to_string(clock_));
  }
  return report;
}

std::vector<TickReport> ModelPool::run_narrative(Time horizon) {
  std::vector<TickReport> out;
  while (clock_ < horizon) out.push_back(tick());
  return out;
}

QueryAnswer ModelPool::query_holds(const Term& fluent, Time t, QueryMode mode) const {
  if (t > clock_ || t < 0) throw Error(ErrorCode::InvalidArgument, "timepoint " + std::to_string(t) + " is not committed");
  QueryAnswer a;
  bool all = !models_.empty();
  bool any = false;
  for (const Model& m : models_) {
    Truth v = m.wm.holds(fluent, t);
    a.per_model[m.id] = v;
    all = all && v == Truth::True;
    any = any || v == Truth::True;
  }
  a.value = mode == QueryMode::Credulous ? any : all;
  if (mode != QueryMode::PerModel) a.per_model.clear();
  return a;
}

const EpistemicState& ModelPool::epistemic_state() const {
  if (options_.mode != ReasoningMode::Epistemic || models_.empty() || !models_.front().epistemic) {
    throw Error(ErrorCode::ModeUnavailable, "the pool is not running epistemic reasoning");
  }
  return *models_.front().epistemic;
}

Knowledge ModelPool::knows(const Term& fluent) const { return epistemic_state().knows(fluent); }

void ModelPool::flush_before(Time t) {
  if (options_.kb_mode == KbMode::SemiDestructive) {
    throw Error(ErrorCode::ModeUnavailable, "semi-destructive memory keeps no history to flush");
  }
  for (Model& m : models_) m.wm.flush_before(t);
}

}  // namespace ecr
