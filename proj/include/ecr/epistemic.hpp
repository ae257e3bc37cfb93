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

#ifndef ECR_EPISTEMIC_HPP
#define ECR_EPISTEMIC_HPP

#include <map>
#include <string>
#include <vector>

#include "ecr/engine.hpp"

namespace ecr {

enum class Knowledge { KnownTrue, KnownFalse, Unknown };
std::string_view to_string(Knowledge k);

struct KLiteral {
  Term fluent;
  bool positive = true;

  KLiteral negated() const { return {fluent, !positive}; }
  std::string to_string() const { return (positive ? "" : "~") + fluent.to_string(); }

  friend bool operator==(const KLiteral&, const KLiteral&) = default;
  friend auto operator<=>(const KLiteral& a, const KLiteral& b) {
    if (auto c = a.fluent <=> b.fluent; c != 0) return c;
    return a.positive <=> b.positive;
  }
};

// Hidden causal dependency: a disjunction of fluent literals, kept sorted.
struct Hcd {
  std::vector<KLiteral> clause;
  Time born = 0;

  std::string to_string() const;
};

struct PotentialEvent {
  Term event;
  // Unknown literals that would have to hold for the event to occur.
  std::vector<KLiteral> context;

  std::string to_string() const;
};

class EpistemicState {
 public:
  // With a closed world, fluents never mentioned are known false.
  explicit EpistemicState(bool closed_world = false) : closed_world_(closed_world) {}

  Knowledge knows(const Term& fluent) const;
  void set(const Term& fluent, bool value);
  void forget(const Term& fluent);

  bool closed_world() const noexcept { return closed_world_; }
  const FluentSet& known_true() const noexcept { return true_; }
  const FluentSet& known_false() const noexcept { return false_; }
  const FluentSet& unknown() const noexcept { return unknown_; }

  bool has_clause(std::vector<KLiteral> clause) const;
  // Adds a clause unless it is tautological, satisfied or already present.
  bool add_clause(std::vector<KLiteral> clause, Time born);

  std::vector<Hcd> hcds;
  std::map<Time, std::vector<PotentialEvent>> potentials;

 private:
  bool closed_world_;
  FluentSet true_;
  FluentSet false_;
  FluentSet unknown_;
};

Knowledge knows(const EpistemicState& es, const Term& fluent);

// Matching view: known atoms are determined, everything else is Unknown.
class EpistemicWorld : public MatchWorld {
 public:
  EpistemicWorld(const EpistemicState& es, const std::vector<Term>& events) : es_(es), events_(events) {}

  Status fluent(const Term& f, Time t) const override;
  bool released(const Term& f, Time t) const override;
  void fluent_candidates(const std::string& functor, Time t, std::vector<Term>& out) const override;
  void released_candidates(const std::string& functor, Time t, std::vector<Term>& out) const override;
  const std::vector<Term>& events(Time t) const override;

 private:
  const EpistemicState& es_;
  const std::vector<Term>& events_;
};

// Knowledge at t+1 from knowledge at t, the actual events of t and the
// potential events recorded at t.
EpistemicState epistemic_step(const EpistemicState& es, const DomainDescription& domain,
                              const std::vector<Term>& narrative, Time t);

// Adds the sensed literal and propagates. Throws KnowledgeInconsistency when
// it contradicts what is known.
void sense(EpistemicState& es, const Term& fluent, bool value, Time t);

// Unit propagation over the HCDs to a fixpoint; returns the promoted literals.
std::vector<KLiteral> resolve(EpistemicState& es);

// Fires triggers at t: known bodies append actual events to wm's narrative,
// bodies with unknown atoms are recorded as potential events.
std::vector<Term> fire_epistemic_triggers(EpistemicState& es, WorkingMemory& wm, const DomainDescription& domain,
                                          Time t);

}  // namespace ecr

#endif  // ECR_EPISTEMIC_HPP
