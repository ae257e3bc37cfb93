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

#include "ecr/engine.hpp"

#include <algorithm>

#include "ecr/error.hpp"

namespace ecr {

std::string_view to_string(Truth t) {
  switch (t) {
    case Truth::False: return "false";
    case Truth::True: return "true";
    case Truth::Released: return "released";
  }
  return "?";
}

std::string_view to_string(KbMode m) {
  return m == KbMode::NonDestructive ? "non-destructive" : "semi-destructive";
}

bool FluentSet::contains(const Term& f) const {
  auto it = buckets_.find(f.name());
  return it != buckets_.end() && it->second.count(f) != 0;
}

bool FluentSet::insert(const Term& f) {
  bool fresh = buckets_[f.name()].insert(f).second;
  if (fresh) ++size_;
  return fresh;
}

bool FluentSet::erase(const Term& f) {
  auto it = buckets_.find(f.name());
  if (it == buckets_.end() || it->second.erase(f) == 0) return false;
  if (it->second.empty()) buckets_.erase(it);
  --size_;
  return true;
}

const FluentSet::Bucket* FluentSet::with_functor(const std::string& functor) const {
  auto it = buckets_.find(functor);
  return it == buckets_.end() ? nullptr : &it->second;
}

std::vector<Term> FluentSet::sorted() const {
  std::vector<Term> out;
  out.reserve(size_);
  for_each([&](const Term& t) { out.push_back(t); });
  std::sort(out.begin(), out.end());
  return out;
}

Time WorkingMemory::floor() const noexcept {
  return history_.empty() ? 0 : history_.begin()->first;
}

const Snapshot& WorkingMemory::current() const {
  if (history_.empty()) throw Error(ErrorCode::HistoryUnavailable, "no state has been committed");
  return history_.rbegin()->second;
}

Snapshot& WorkingMemory::current() {
  if (history_.empty()) throw Error(ErrorCode::HistoryUnavailable, "no state has been committed");
  return history_.rbegin()->second;
}

const Snapshot& WorkingMemory::at(Time t) const {
  if (t > clock_ || t < 0) throw Error(ErrorCode::InvalidArgument, "timepoint " + std::to_string(t) + " is outside [0, " + std::to_string(clock_) + "]");
  auto it = history_.find(t);
  if (it == history_.end()) {
    throw Error(ErrorCode::HistoryUnavailable, "state at " + std::to_string(t) + " is not retained (" +
                                                   std::string(to_string(mode_)) + " memory, floor " +
                                                   std::to_string(floor()) + ")");
  }
  return it->second;
}

Truth WorkingMemory::holds(const Term& fluent, Time t) const { return at(t).value(fluent); }

void WorkingMemory::commit(Snapshot s) {
  ++clock_;
  if (mode_ == KbMode::SemiDestructive) history_.clear();
  history_[clock_] = std::move(s);
  if (mode_ == KbMode::SemiDestructive) {
    for (auto it = derived_.begin(); it != derived_.end() && it->first < clock_ - 1;) it = derived_.erase(it);
  }
}

void WorkingMemory::commit_in_place() {
  if (history_.empty()) throw Error(ErrorCode::HistoryUnavailable, "no state has been committed");
  auto node = history_.extract(std::prev(history_.end()));
  ++clock_;
  node.key() = clock_;
  history_.insert(std::move(node));
  for (auto it = derived_.begin(); it != derived_.end() && it->first < clock_ - 1;) it = derived_.erase(it);
}

const std::vector<Term>& WorkingMemory::narrative(Time t) const {
  static const std::vector<Term> kEmpty;
  auto it = narrative_.find(t);
  return it == narrative_.end() ? kEmpty : it->second;
}

bool WorkingMemory::add_event(Time t, const Term& event) {
  auto& v = narrative_[t];
  if (std::find(v.begin(), v.end(), event) != v.end()) return false;
  v.push_back(event);
  return true;
}

void WorkingMemory::record_effects(Time t, EffectSet effects) { derived_[t] = std::move(effects); }

const EffectSet* WorkingMemory::effects(Time t) const {
  auto it = derived_.find(t);
  return it == derived_.end() ? nullptr : &it->second;
}

void WorkingMemory::flush_before(Time t) {
  if (t <= floor()) return;
  Time keep = std::min(t, clock_);
  for (auto it = history_.begin(); it != history_.end() && it->first < keep;) it = history_.erase(it);
  for (auto it = derived_.begin(); it != derived_.end() && it->first < keep;) it = derived_.erase(it);
  flushed_ = std::max(flushed_, keep);
}

std::size_t WorkingMemory::fact_count() const {
  std::size_t n = 0;
  for (const auto& [t, s] : history_) n += s.holds.size() + s.released.size();
  for (const auto& [t, v] : narrative_) n += v.size();
  for (const auto& [t, e] : derived_) n += e.initiated.size() + e.terminated.size() + e.released.size();
  return n;
}

const Snapshot* MemoryWorld::state(Time t) const {
  if (pending_ && t == pending_time_) return pending_;
  if (t < 0) return nullptr;
  return &wm_.at(t);
}

Status MemoryWorld::fluent(const Term& f, Time t) const {
  const Snapshot* s = state(t);
  if (!s) return Status::Violated;
  switch (s->value(f)) {
    case Truth::True: return Status::Satisfied;
    case Truth::False: return Status::Violated;
    case Truth::Released: return Status::Unknown;
  }
  return Status::Violated;
}

bool MemoryWorld::released(const Term& f, Time t) const {
  const Snapshot* s = state(t);
  return s && s->released.contains(f);
}

void MemoryWorld::fluent_candidates(const std::string& functor, Time t, std::vector<Term>& out) const {
  const Snapshot* s = state(t);
  if (!s) return;
  if (const auto* b = s->holds.with_functor(functor)) out.insert(out.end(), b->begin(), b->end());
  if (const auto* b = s->undetermined.with_functor(functor)) out.insert(out.end(), b->begin(), b->end());
}

void MemoryWorld::released_candidates(const std::string& functor, Time t, std::vector<Term>& out) const {
  const Snapshot* s = state(t);
  if (!s) return;
  if (const auto* b = s->released.with_functor(functor)) out.insert(out.end(), b->begin(), b->end());
}

const std::vector<Term>& MemoryWorld::events(Time t) const {
  if (pending_events_ && t == pending_time_) return *pending_events_;
  return wm_.narrative(t);
}

EffectSet derive_effects(const MatchWorld& world, const DomainDescription& domain, Time t) {
  EffectSet out;
  for (const Term& ev : world.events(t)) {
    for (std::size_t idx : domain.sigma_for_event(ev.name())) {
      const Axiom& ax = domain.sigma[idx];
      auto seed = unify(ax.head.event, ev);
      if (!seed) continue;
      match_body(domain, ax, world, t, *seed, [&](const Substitution& sub, const std::vector<Literal>& unknowns) {
        if (!unknowns.empty()) return;
        Term f = apply(sub, ax.head.subject);
        ++out.firings;
        switch (ax.cls) {
          case AxiomClass::PositiveEffect: out.initiated.insert(f); break;
          case AxiomClass::NegativeEffect: out.terminated.insert(f); break;
          default: out.released.insert(f); break;
        }
      });
    }
  }
  std::vector<Term> clash;
  out.initiated.for_each([&](const Term& f) {
    if (out.terminated.contains(f)) clash.push_back(f);
  });
  if (!clash.empty()) {
    std::sort(clash.begin(), clash.end());
    throw Error(ErrorCode::Inconsistency, clash.front().to_string() + " is both initiated and terminated at " + std::to_string(t));
  }
  return out;
}

EffectSet derive_effects(const WorkingMemory& wm, const DomainDescription& domain, Time t) {
  return derive_effects(MemoryWorld(wm), domain, t);
}

Snapshot apply_inertia(const Snapshot& prev, const EffectSet& effects) {
  Snapshot next;
  prev.holds.for_each([&](const Term& f) {
    if (prev.undetermined.contains(f)) return;
    if (effects.terminated.contains(f) || effects.released.contains(f)) return;
    next.holds.insert(f);
  });
  effects.initiated.for_each([&](const Term& f) { next.holds.insert(f); });
  prev.released.for_each([&](const Term& f) {
    if (effects.initiated.contains(f) || effects.terminated.contains(f)) return;
    next.released.insert(f);
  });
  effects.released.for_each([&](const Term& f) {
    if (effects.initiated.contains(f) || effects.terminated.contains(f)) return;
    next.released.insert(f);
  });
  // Released fluents are exempt from inertia: their value is free again.
  next.released.for_each([&](const Term& f) {
    next.holds.erase(f);
    next.undetermined.insert(f);
  });
  return next;
}

Snapshot apply_inertia(const WorkingMemory& wm, const EffectSet& effects, Time t) {
  return apply_inertia(wm.at(t), effects);
}

void semi_destructive_update(WorkingMemory& wm, const EffectSet& effects, Time t) {
  if (wm.mode() != KbMode::SemiDestructive) {
    throw Error(ErrorCode::ModeUnavailable, "semi-destructive update on a non-destructive memory");
  }
  if (t != wm.clock()) throw Error(ErrorCode::HistoryUnavailable, "semi-destructive update must start at the clock");
  Snapshot& s = wm.current();
  // KB(t+1) = (KB(t) - terminated - released) + initiated
  std::vector<Term> undet;
  s.undetermined.for_each([&](const Term& f) { undet.push_back(f); });
  for (const Term& f : undet) s.holds.erase(f);
  effects.terminated.for_each([&](const Term& f) {
    s.holds.erase(f);
    s.released.erase(f);
  });
  effects.released.for_each([&](const Term& f) {
    s.holds.erase(f);
    if (!effects.initiated.contains(f) && !effects.terminated.contains(f)) s.released.insert(f);
  });
  effects.initiated.for_each([&](const Term& f) {
    s.holds.insert(f);
    s.released.erase(f);
  });
  s.undetermined.clear();
  std::vector<Term> rel;
  s.released.for_each([&](const Term& f) { rel.push_back(f); });
  for (const Term& f : rel) {
    s.holds.erase(f);
    s.undetermined.insert(f);
  }
  wm.commit_in_place();
}

void advance(WorkingMemory& wm, const EffectSet& effects, Time t) {
  if (wm.mode() == KbMode::SemiDestructive) {
    semi_destructive_update(wm, effects, t);
  } else {
    wm.commit(apply_inertia(wm, effects, t));
  }
}

namespace {

class StateWorld : public MatchWorld {
 public:
  StateWorld(const Snapshot& s, Time t) : s_(s), t_(t) {}

  Status fluent(const Term& f, Time t) const override {
    if (t != t_) return Status::Violated;
    switch (s_.value(f)) {
      case Truth::True: return Status::Satisfied;
      case Truth::False: return Status::Violated;
      default: return Status::Unknown;
    }
  }
  bool released(const Term& f, Time t) const override { return t == t_ && s_.released.contains(f); }
  void fluent_candidates(const std::string& functor, Time t, std::vector<Term>& out) const override {
    if (t != t_) return;
    if (const auto* b = s_.holds.with_functor(functor)) out.insert(out.end(), b->begin(), b->end());
    if (const auto* b = s_.undetermined.with_functor(functor)) out.insert(out.end(), b->begin(), b->end());
  }
  void released_candidates(const std::string& functor, Time t, std::vector<Term>& out) const override {
    if (t != t_) return;
    if (const auto* b = s_.released.with_functor(functor)) out.insert(out.end(), b->begin(), b->end());
  }
  const std::vector<Term>& events(Time) const override {
    static const std::vector<Term> kEmpty;
    return kEmpty;
  }

 private:
  const Snapshot& s_;
  Time t_;
};

}  // namespace

std::size_t close_constraints(Snapshot& state, const DomainDescription& domain, Time t, const WorkingMemory*) {
  std::size_t pinned = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Axiom& ax : domain.psi) {
      std::vector<std::pair<Term, bool>> forced;
      match_body(domain, ax, StateWorld(state, t), t, {}, [&](const Substitution& sub, const std::vector<Literal>& unknowns) {
        if (unknowns.empty()) forced.emplace_back(apply(sub, ax.head.subject), ax.head.positive);
      });
      for (const auto& [f, value] : forced) {
        Truth cur = state.value(f);
        if (cur == Truth::Released) {
          state.undetermined.erase(f);
          if (value) state.holds.insert(f);
          ++pinned;
          changed = true;
        } else if ((cur == Truth::True) != value) {
          throw Error(ErrorCode::ConstraintContradiction,
                      "constraint '" + ax.to_string() + "' forces " + (value ? "" : "~") + f.to_string() + " at " +
                          std::to_string(t));
        }
      }
    }
  }
  return pinned;
}

std::vector<Term> fire_triggers(WorkingMemory& wm, const DomainDescription& domain, Time t) {
  std::vector<Term> fired;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Axiom& ax : domain.delta2) {
      std::vector<Term> heads;
      match_body(domain, ax, MemoryWorld(wm), t, {}, [&](const Substitution& sub, const std::vector<Literal>& unknowns) {
        if (unknowns.empty()) heads.push_back(apply(sub, ax.head.subject));
      });
      for (const Term& e : heads) {
        if (wm.add_event(t, e)) {
          fired.push_back(e);
          changed = true;
        }
      }
    }
  }
  return fired;
}

}  // namespace ecr
