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

#ifndef ECR_ENGINE_HPP
#define ECR_ENGINE_HPP

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ecr/domain.hpp"
#include "ecr/matcher.hpp"

namespace ecr {

enum class Truth { False, True, Released };
std::string_view to_string(Truth t);

enum class KbMode { NonDestructive, SemiDestructive };
std::string_view to_string(KbMode m);

// Set of ground fluents bucketed by functor.
class FluentSet {
 public:
  using Bucket = std::unordered_set<Term, TermHash>;

  bool contains(const Term& f) const;
  bool insert(const Term& f);
  bool erase(const Term& f);
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }
  void clear() {
    buckets_.clear();
    size_ = 0;
  }
  const Bucket* with_functor(const std::string& functor) const;
  std::vector<Term> sorted() const;

  template <typename F>
  void for_each(F&& f) const {
    for (const auto& [name, bucket] : buckets_) {
      for (const Term& t : bucket) f(t);
    }
  }

  friend bool operator==(const FluentSet& a, const FluentSet& b) { return a.size_ == b.size_ && a.buckets_ == b.buckets_; }

 private:
  std::unordered_map<std::string, Bucket> buckets_;
  std::size_t size_ = 0;
};

// Fluent state at one timepoint. Only true fluents are stored (negation as
// failure); `undetermined` is the subset of `released` whose value is free.
struct Snapshot {
  FluentSet holds;
  FluentSet released;
  FluentSet undetermined;

  Truth value(const Term& f) const {
    if (undetermined.contains(f)) return Truth::Released;
    return holds.contains(f) ? Truth::True : Truth::False;
  }
  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct EffectSet {
  FluentSet initiated;
  FluentSet terminated;
  FluentSet released;
  std::size_t firings = 0;

  bool empty() const noexcept { return initiated.empty() && terminated.empty() && released.empty(); }
};

class WorkingMemory {
 public:
  explicit WorkingMemory(KbMode mode = KbMode::NonDestructive) : mode_(mode) {}

  KbMode mode() const noexcept { return mode_; }
  // Largest committed timepoint; -1 before the initial state is committed.
  Time clock() const noexcept { return clock_; }
  // Earliest timepoint whose state is still retained.
  Time floor() const noexcept;

  const Snapshot& current() const;
  Snapshot& current();
  // Throws HistoryUnavailable for timepoints that are not retained.
  const Snapshot& at(Time t) const;
  Truth holds(const Term& fluent, Time t) const;

  // Commits the state for clock + 1 (or 0 for the first commit).
  void commit(Snapshot s);
  // Advances the clock after the current snapshot was updated in place.
  void commit_in_place();

  const std::vector<Term>& narrative(Time t) const;
  const std::map<Time, std::vector<Term>>& narrative() const noexcept { return narrative_; }
  bool add_event(Time t, const Term& event);

  void record_effects(Time t, EffectSet effects);
  const EffectSet* effects(Time t) const;

  void flush_before(Time t);

  // Fluents observed (true or false) at least once; used to tell "false" from "no data".
  FluentSet& observed() noexcept { return observed_; }
  const FluentSet& observed() const noexcept { return observed_; }

  // Number of ground facts currently materialized (states, releases, events, effects).
  std::size_t fact_count() const;

 private:
  KbMode mode_;
  Time clock_ = -1;
  Time flushed_ = 0;
  std::map<Time, Snapshot> history_;
  std::map<Time, std::vector<Term>> narrative_;
  std::map<Time, EffectSet> derived_;
  FluentSet observed_;
};

// MatchWorld over a working memory, with an optional state override for the
// timepoint being built.
class MemoryWorld : public MatchWorld {
 public:
  explicit MemoryWorld(const WorkingMemory& wm, const Snapshot* pending = nullptr, Time pending_time = -1,
                       const std::vector<Term>* pending_events = nullptr)
      : wm_(wm), pending_(pending), pending_time_(pending_time), pending_events_(pending_events) {}

  Status fluent(const Term& f, Time t) const override;
  bool released(const Term& f, Time t) const override;
  void fluent_candidates(const std::string& functor, Time t, std::vector<Term>& out) const override;
  void released_candidates(const std::string& functor, Time t, std::vector<Term>& out) const override;
  const std::vector<Term>& events(Time t) const override;

 private:
  const Snapshot* state(Time t) const;

  const WorkingMemory& wm_;
  const Snapshot* pending_;
  Time pending_time_;
  const std::vector<Term>* pending_events_;
};

// Effects of the events in narrative(t) whose axiom bodies hold at t.
// Throws Inconsistency if a fluent is both initiated and terminated.
EffectSet derive_effects(const WorkingMemory& wm, const DomainDescription& domain, Time t);
EffectSet derive_effects(const MatchWorld& world, const DomainDescription& domain, Time t);

// Non-destructive step: the state at t+1 built from the state at t.
Snapshot apply_inertia(const Snapshot& prev, const EffectSet& effects);
Snapshot apply_inertia(const WorkingMemory& wm, const EffectSet& effects, Time t);

// In-place update of the single snapshot (only valid for t == clock).
void semi_destructive_update(WorkingMemory& wm, const EffectSet& effects, Time t);

// Performs whichever storage step matches the memory's mode.
void advance(WorkingMemory& wm, const EffectSet& effects, Time t);

// Least fixpoint of the state constraints over the state at t. Pins
// undetermined heads; returns the number of fluents pinned. Throws
// ConstraintContradiction when a constraint conflicts with a determined value.
std::size_t close_constraints(Snapshot& state, const DomainDescription& domain, Time t,
                              const WorkingMemory* history = nullptr);

// Fires trigger axioms to a fixpoint at t, appending new events to the
// narrative. Returns the newly triggered events.
std::vector<Term> fire_triggers(WorkingMemory& wm, const DomainDescription& domain, Time t);

}  // namespace ecr

#endif  // ECR_ENGINE_HPP
