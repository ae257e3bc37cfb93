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

#include "ecr/epistemic.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "ecr/error.hpp"

namespace ecr {

std::string_view to_string(Knowledge k) {
  switch (k) {
    case Knowledge::KnownTrue: return "known-true";
    case Knowledge::KnownFalse: return "known-false";
    case Knowledge::Unknown: return "unknown";
  }
  return "?";
}

std::string Hcd::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < clause.size(); ++i) {
    if (i) out += " v ";
    out += clause[i].to_string();
  }
  return out;
}

std::string PotentialEvent::to_string() const {
  std::string out = event.name() + "_pot";
  if (event.arity() == 0) return out;
  out += "(";
  for (std::size_t i = 0; i < event.arity(); ++i) {
    if (i) out += ", ";
    out += event.args()[i].to_string();
  }
  return out + ")";
}

Knowledge EpistemicState::knows(const Term& fluent) const {
  if (unknown_.contains(fluent)) return Knowledge::Unknown;
  if (true_.contains(fluent)) return Knowledge::KnownTrue;
  if (false_.contains(fluent)) return Knowledge::KnownFalse;
  return closed_world_ ? Knowledge::KnownFalse : Knowledge::Unknown;
}

void EpistemicState::set(const Term& fluent, bool value) {
  unknown_.erase(fluent);
  if (value) {
    false_.erase(fluent);
    true_.insert(fluent);
  } else {
    true_.erase(fluent);
    if (!closed_world_) false_.insert(fluent);
  }
}

void EpistemicState::forget(const Term& fluent) {
  true_.erase(fluent);
  false_.erase(fluent);
  unknown_.insert(fluent);
}

namespace {

void normalize(std::vector<KLiteral>& clause) {
  std::sort(clause.begin(), clause.end());
  clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
}

bool literal_known(const EpistemicState& es, const KLiteral& l, bool value) {
  Knowledge k = es.knows(l.fluent);
  if (k == Knowledge::Unknown) return false;
  return (k == Knowledge::KnownTrue) == (l.positive == value);
}

}  // namespace

bool EpistemicState::has_clause(std::vector<KLiteral> clause) const {
  normalize(clause);
  return std::any_of(hcds.begin(), hcds.end(), [&](const Hcd& h) { return h.clause == clause; });
}

bool EpistemicState::add_clause(std::vector<KLiteral> clause, Time born) {
  normalize(clause);
  for (std::size_t i = 0; i + 1 < clause.size(); ++i) {
    if (clause[i].fluent == clause[i + 1].fluent) return false;
  }
  if (clause.size() < 2) return false;
  if (std::any_of(clause.begin(), clause.end(), [&](const KLiteral& l) { return literal_known(*this, l, true); })) {
    return false;
  }
  if (has_clause(clause)) return false;
  hcds.push_back({std::move(clause), born});
  return true;
}

Knowledge knows(const EpistemicState& es, const Term& fluent) { return es.knows(fluent); }

Status EpistemicWorld::fluent(const Term& f, Time) const {
  switch (es_.knows(f)) {
    case Knowledge::KnownTrue: return Status::Satisfied;
    case Knowledge::KnownFalse: return Status::Violated;
    case Knowledge::Unknown: return Status::Unknown;
  }
  return Status::Unknown;
}

bool EpistemicWorld::released(const Term&, Time) const { return false; }

void EpistemicWorld::fluent_candidates(const std::string& functor, Time, std::vector<Term>& out) const {
  if (const auto* b = es_.known_true().with_functor(functor)) out.insert(out.end(), b->begin(), b->end());
  if (const auto* b = es_.unknown().with_functor(functor)) out.insert(out.end(), b->begin(), b->end());
}

void EpistemicWorld::released_candidates(const std::string&, Time, std::vector<Term>&) const {}

const std::vector<Term>& EpistemicWorld::events(Time) const { return events_; }

namespace {

struct Cause {
  bool release = false;
  KLiteral effect;
  std::vector<KLiteral> context;
};

std::vector<KLiteral> to_context(const std::vector<Literal>& unknowns) {
  std::vector<KLiteral> out;
  for (const Literal& l : unknowns) out.push_back({l.subject, l.positive});
  return out;
}

}  // namespace

EpistemicState epistemic_step(const EpistemicState& es, const DomainDescription& domain,
                              const std::vector<Term>& narrative, Time t) {
  std::map<Term, std::vector<Cause>> causes;
  EpistemicWorld world(es, narrative);
  auto collect = [&](const Term& ev, const std::vector<KLiteral>& extra) {
    for (std::size_t idx : domain.sigma_for_event(ev.name())) {
      const Axiom& ax = domain.sigma[idx];
      auto seed = unify(ax.head.event, ev);
      if (!seed) continue;
      match_body(domain, ax, world, t, *seed, [&](const Substitution& sub, const std::vector<Literal>& unknowns) {
        Cause c;
        Term f = apply(sub, ax.head.subject);
        c.release = ax.cls == AxiomClass::Release;
        c.effect = {f, ax.cls == AxiomClass::PositiveEffect};
        c.context = extra;
        auto more = to_context(unknowns);
        c.context.insert(c.context.end(), more.begin(), more.end());
        normalize(c.context);
        causes[f].push_back(std::move(c));
      });
    }
  };
  for (const Term& ev : narrative) collect(ev, {});
  if (auto it = es.potentials.find(t); it != es.potentials.end()) {
    for (const PotentialEvent& p : it->second) collect(p.event, p.context);
  }

  EpistemicState next = es;
  std::set<Term> affected;
  for (const auto& [f, cs] : causes) affected.insert(f);
  std::vector<std::pair<std::vector<KLiteral>, std::vector<KLiteral>>> fresh;  // clause, context

  for (const auto& [f, cs] : causes) {
    std::optional<bool> known_value;
    bool known_release = false;
    for (const Cause& c : cs) {
      if (!c.context.empty()) continue;
      if (c.release) {
        known_release = true;
        continue;
      }
      if (known_value && *known_value != c.effect.positive) {
        throw Error(ErrorCode::Inconsistency, f.to_string() + " is both initiated and terminated at " + std::to_string(t));
      }
      known_value = c.effect.positive;
    }
    if (known_release) {
      next.forget(f);
      continue;
    }
    std::optional<bool> baseline = known_value;
    if (!baseline) {
      Knowledge k = es.knows(f);
      if (k != Knowledge::Unknown) baseline = k == Knowledge::KnownTrue;
    }
    std::vector<const Cause*> relevant;
    bool uncertain_release = false;
    for (const Cause& c : cs) {
      if (c.context.empty()) continue;
      if (c.release) {
        uncertain_release = true;
        continue;
      }
      if (baseline && *baseline == c.effect.positive) continue;
      relevant.push_back(&c);
    }
    if (relevant.empty() && !uncertain_release && baseline) {
      next.set(f, *baseline);
      continue;
    }
    next.forget(f);
    for (const Cause* c : relevant) {
      std::vector<KLiteral> clause{c->effect};
      for (const KLiteral& u : c->context) clause.push_back(u.negated());
      fresh.emplace_back(std::move(clause), c->context);
    }
    if (baseline && relevant.size() == 1 && !uncertain_release) {
      const Cause* c = relevant.front();
      for (const KLiteral& u : c->context) fresh.emplace_back(std::vector<KLiteral>{c->effect.negated(), u}, c->context);
    }
  }

  // Dependencies on fluents that changed at this step no longer describe t+1.
  std::erase_if(next.hcds, [&](const Hcd& h) {
    return std::any_of(h.clause.begin(), h.clause.end(), [&](const KLiteral& l) { return affected.count(l.fluent) != 0; });
  });
  for (auto& [clause, context] : fresh) {
    bool stale = std::any_of(context.begin(), context.end(), [&](const KLiteral& u) { return affected.count(u.fluent) != 0; });
    if (!stale) next.add_clause(std::move(clause), t + 1);
  }
  resolve(next);
  return next;
}

void sense(EpistemicState& es, const Term& fluent, bool value, Time) {
  Knowledge k = es.knows(fluent);
  if (k != Knowledge::Unknown && (k == Knowledge::KnownTrue) != value) {
    throw Error(ErrorCode::KnowledgeInconsistency,
                "sensed " + std::string(value ? "" : "~") + fluent.to_string() + " contradicts what is known");
  }
  es.set(fluent, value);
  resolve(es);
}

std::vector<KLiteral> resolve(EpistemicState& es) {
  std::vector<KLiteral> promoted;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < es.hcds.size();) {
      const Hcd& h = es.hcds[i];
      bool satisfied = false;
      std::vector<const KLiteral*> open;
      for (const KLiteral& l : h.clause) {
        if (literal_known(es, l, true)) {
          satisfied = true;
          break;
        }
        if (!literal_known(es, l, false)) open.push_back(&l);
      }
      if (satisfied) {
        es.hcds.erase(es.hcds.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        continue;
      }
      if (open.empty()) throw Error(ErrorCode::KnowledgeInconsistency, "clause " + h.to_string() + " is falsified");
      if (open.size() == 1) {
        KLiteral l = *open.front();
        es.set(l.fluent, l.positive);
        promoted.push_back(l);
        es.hcds.erase(es.hcds.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        continue;
      }
      ++i;
    }
  }
  return promoted;
}

std::vector<Term> fire_epistemic_triggers(EpistemicState& es, WorkingMemory& wm, const DomainDescription& domain,
                                          Time t) {
  std::vector<Term> fired;
  std::vector<PotentialEvent> potentials;
  bool changed = true;
  while (changed) {
    changed = false;
    potentials.clear();
    for (const Axiom& ax : domain.delta2) {
      std::vector<std::pair<Term, std::vector<KLiteral>>> heads;
      EpistemicWorld world(es, wm.narrative(t));
      match_body(domain, ax, world, t, {}, [&](const Substitution& sub, const std::vector<Literal>& unknowns) {
        heads.emplace_back(apply(sub, ax.head.subject), to_context(unknowns));
      });
      for (auto& [e, ctx] : heads) {
        if (ctx.empty()) {
          if (wm.add_event(t, e)) {
            fired.push_back(e);
            changed = true;
          }
          continue;
        }
        normalize(ctx);
        bool dup = std::any_of(potentials.begin(), potentials.end(),
                               [&](const PotentialEvent& p) { return p.event == e && p.context == ctx; });
        if (!dup) potentials.push_back({e, std::move(ctx)});
      }
    }
  }
  const auto& actual = wm.narrative(t);
  std::erase_if(potentials, [&](const PotentialEvent& p) {
    return std::find(actual.begin(), actual.end(), p.event) != actual.end();
  });
  if (!potentials.empty()) es.potentials[t] = std::move(potentials);
  else es.potentials.erase(t);
  return fired;
}

}  // namespace ecr
