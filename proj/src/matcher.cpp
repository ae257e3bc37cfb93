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

#include "ecr/matcher.hpp"

#include <algorithm>

namespace ecr {

namespace {

bool literal_ground(const Literal& l) {
  if (l.is_comparison()) return l.lhs.is_ground() && l.rhs.is_ground();
  return l.subject.is_ground();
}

class Solver {
 public:
  Solver(const DomainDescription& d, const Axiom& ax, const MatchWorld& w, Time now, const MatchCallback& cb)
      : d_(d), ax_(ax), w_(w), now_(now), cb_(cb), done_(ax.body.size(), 0) {
    collect_variables(ax.head, head_vars_);
  }

  void run(const Substitution& seed) { solve(seed); }

 private:
  Status eval_ground(const Literal& l) const {
    Time t = l.time.resolve(now_);
    switch (l.kind) {
      case AtomKind::Comparison:
        return evaluate_comparison(d_, l.op, l.lhs, l.rhs) ? Status::Satisfied : Status::Violated;
      case AtomKind::HoldsAt: {
        Status s = w_.fluent(l.subject, t);
        if (l.positive || s == Status::Unknown) return s;
        return s == Status::Satisfied ? Status::Violated : Status::Satisfied;
      }
      case AtomKind::ReleasedAt:
        return w_.released(l.subject, t) == l.positive ? Status::Satisfied : Status::Violated;
      case AtomKind::Happens: {
        const auto& ev = w_.events(t);
        bool in = std::find(ev.begin(), ev.end(), l.subject) != ev.end();
        return in == l.positive ? Status::Satisfied : Status::Violated;
      }
      default: return Status::Violated;
    }
  }

  void candidates(const Literal& l, std::vector<Term>& out) const {
    Time t = l.time.resolve(now_);
    const std::string& f = l.subject.name();
    switch (l.kind) {
      case AtomKind::HoldsAt: w_.fluent_candidates(f, t, out); break;
      case AtomKind::ReleasedAt: w_.released_candidates(f, t, out); break;
      case AtomKind::Happens:
        for (const Term& e : w_.events(t)) {
          if (e.name() == f) out.push_back(e);
        }
        break;
      default: break;
    }
  }

  bool used_elsewhere(const std::string& var, std::size_t skip, const Substitution& sub) const {
    if (!sub.contains(var) && std::find(head_vars_.begin(), head_vars_.end(), var) != head_vars_.end()) return true;
    std::vector<std::string> vs;
    for (std::size_t j = 0; j < ax_.body.size(); ++j) {
      if (j == skip || done_[j]) continue;
      vs.clear();
      collect_variables(ax_.body[j], vs);
      if (std::find(vs.begin(), vs.end(), var) != vs.end()) return true;
    }
    return false;
  }

  const SortDecl* finite_sort(const std::string& var) const {
    auto it = ax_.var_sorts.find(var);
    if (it == ax_.var_sorts.end() || it->second == kIntegerSort) return nullptr;
    return d_.find_sort(it->second);
  }

  void descend(std::size_t i, const Substitution& sub, const Literal* unknown) {
    done_[i] = 1;
    if (unknown) unknowns_.push_back(*unknown);
    solve(sub);
    if (unknown) unknowns_.pop_back();
    done_[i] = 0;
  }

  void solve(const Substitution& sub) {
    const std::size_t n = ax_.body.size();
    // Ground literals first: they either prune or pass through cheaply.
    for (std::size_t i = 0; i < n; ++i) {
      if (done_[i]) continue;
      Literal l = apply(sub, ax_.body[i]);
      if (!literal_ground(l)) continue;
      Status s = eval_ground(l);
      if (s == Status::Violated) return;
      descend(i, sub, s == Status::Unknown ? &l : nullptr);
      return;
    }
    // Positive atoms act as generators over the candidate facts.
    for (std::size_t i = 0; i < n; ++i) {
      if (done_[i]) continue;
      const Literal& raw = ax_.body[i];
      if (!raw.positive || raw.is_comparison()) continue;
      Literal l = apply(sub, raw);
      std::vector<Term> cands;
      candidates(l, cands);
      for (const Term& c : cands) {
        Substitution s2 = sub;
        if (!unify_into(l.subject, c, s2)) continue;
        Literal g = apply(s2, raw);
        Status st = raw.kind == AtomKind::HoldsAt ? w_.fluent(c, l.time.resolve(now_)) : Status::Satisfied;
        if (st == Status::Violated) continue;
        descend(i, s2, st == Status::Unknown ? &g : nullptr);
      }
      return;
    }
    // Negative atoms whose free variables occur nowhere else: not-exists.
    for (std::size_t i = 0; i < n; ++i) {
      if (done_[i]) continue;
      const Literal& raw = ax_.body[i];
      if (raw.positive || raw.is_comparison()) continue;
      Literal l = apply(sub, raw);
      std::vector<std::string> vars;
      collect_variables(l, vars);
      bool local = std::none_of(vars.begin(), vars.end(), [&](const std::string& v) {
        return used_elsewhere(v, i, sub) && finite_sort(v) != nullptr;
      });
      if (!local) continue;
      std::vector<Term> cands;
      candidates(l, cands);
      std::vector<Literal> unk;
      for (const Term& c : cands) {
        Substitution s2 = sub;
        if (!unify_into(l.subject, c, s2)) continue;
        Status st = raw.kind == AtomKind::HoldsAt ? w_.fluent(c, l.time.resolve(now_)) : Status::Satisfied;
        if (st == Status::Satisfied) return;
        Literal g = l;
        g.subject = c;
        unk.push_back(std::move(g));
      }
      done_[i] = 1;
      unknowns_.insert(unknowns_.end(), unk.begin(), unk.end());
      solve(sub);
      unknowns_.resize(unknowns_.size() - unk.size());
      done_[i] = 0;
      return;
    }
    // Remaining literals need a variable enumerated over its sort.
    for (std::size_t i = 0; i < n; ++i) {
      if (done_[i]) continue;
      Literal l = apply(sub, ax_.body[i]);
      std::vector<std::string> vars;
      collect_variables(l, vars);
      for (const std::string& v : vars) {
        const SortDecl* s = finite_sort(v);
        if (!s) continue;
        for (const std::string& c : s->constants) {
          Substitution s2 = sub;
          s2.bind(v, Term::constant(c));
          solve(s2);
        }
        return;
      }
      // Unbound integer variable with no generator: cannot be grounded.
      return;
    }
    finish_head(sub, 0);
  }

  void finish_head(const Substitution& sub, std::size_t k) {
    for (; k < head_vars_.size(); ++k) {
      const std::string& v = head_vars_[k];
      if (sub.contains(v)) continue;
      const SortDecl* s = finite_sort(v);
      if (!s) return;
      for (const std::string& c : s->constants) {
        Substitution s2 = sub;
        s2.bind(v, Term::constant(c));
        finish_head(s2, k + 1);
      }
      return;
    }
    cb_(sub, unknowns_);
  }

  const DomainDescription& d_;
  const Axiom& ax_;
  const MatchWorld& w_;
  Time now_;
  const MatchCallback& cb_;
  std::vector<char> done_;
  std::vector<std::string> head_vars_;
  std::vector<Literal> unknowns_;
};

}  // namespace

void match_body(const DomainDescription& domain, const Axiom& axiom, const MatchWorld& world, Time now,
                const Substitution& seed, const MatchCallback& cb) {
  Solver(domain, axiom, world, now, cb).run(seed);
}

bool body_holds(const DomainDescription& domain, const Axiom& axiom, const MatchWorld& world, Time now,
                const Substitution& sub) {
  bool found = false;
  match_body(domain, axiom, world, now, sub, [&](const Substitution&, const std::vector<Literal>& unknowns) {
    if (unknowns.empty()) found = true;
  });
  return found;
}

}  // namespace ecr
