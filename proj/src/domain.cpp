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

#include "ecr/domain.hpp"

#include <algorithm>
#include <set>

#include "ecr/error.hpp"

namespace ecr {

std::string TimeExpr::to_string() const {
  switch (kind) {
    case Kind::Var: return "?" + var;
    case Kind::Offset: return "?" + var + "-" + std::to_string(value);
    case Kind::Absolute: return std::to_string(value);
  }
  return {};
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "<>";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

std::string_view to_string(AxiomClass c) {
  switch (c) {
    case AxiomClass::PositiveEffect: return "PositiveEffect";
    case AxiomClass::NegativeEffect: return "NegativeEffect";
    case AxiomClass::Release: return "Release";
    case AxiomClass::StateConstraint: return "StateConstraint";
    case AxiomClass::Trigger: return "Trigger";
  }
  return "?";
}

Literal Literal::holds_at(Term fluent, TimeExpr t, bool positive) {
  Literal l;
  l.positive = positive;
  l.kind = AtomKind::HoldsAt;
  l.subject = std::move(fluent);
  l.time = std::move(t);
  return l;
}

Literal Literal::happens(Term event, TimeExpr t, bool positive) {
  Literal l = holds_at(std::move(event), std::move(t), positive);
  l.kind = AtomKind::Happens;
  return l;
}

Literal Literal::released_at(Term fluent, TimeExpr t, bool positive) {
  Literal l = holds_at(std::move(fluent), std::move(t), positive);
  l.kind = AtomKind::ReleasedAt;
  return l;
}

Literal Literal::effect(AtomKind kind, Term event, Term fluent, TimeExpr t) {
  Literal l = holds_at(std::move(fluent), std::move(t), true);
  l.kind = kind;
  l.event = std::move(event);
  return l;
}

Literal Literal::comparison(CmpOp op, Term lhs, Term rhs) {
  Literal l;
  l.kind = AtomKind::Comparison;
  l.op = op;
  l.lhs = std::move(lhs);
  l.rhs = std::move(rhs);
  return l;
}

std::string Literal::to_string() const {
  std::string neg = positive ? "" : "~";
  switch (kind) {
    case AtomKind::HoldsAt: return neg + "HoldsAt(" + subject.to_string() + ", " + time.to_string() + ")";
    case AtomKind::Happens: return neg + "Happens(" + subject.to_string() + ", " + time.to_string() + ")";
    case AtomKind::ReleasedAt: return neg + "ReleasedAt(" + subject.to_string() + ", " + time.to_string() + ")";
    case AtomKind::Initiates:
    case AtomKind::Terminates:
    case AtomKind::Releases: {
      const char* name = kind == AtomKind::Initiates ? "Initiates" : kind == AtomKind::Terminates ? "Terminates" : "Releases";
      return std::string(name) + "(" + event.to_string() + ", " + subject.to_string() + ", " + time.to_string() + ")";
    }
    case AtomKind::Comparison:
      return "{" + lhs.to_string() + " " + std::string(ecr::to_string(op)) + " " + rhs.to_string() + "}";
  }
  return {};
}

Literal apply(const Substitution& sub, const Literal& lit) {
  Literal out = lit;
  if (lit.is_comparison()) {
    out.lhs = apply(sub, lit.lhs);
    out.rhs = apply(sub, lit.rhs);
  } else {
    out.subject = apply(sub, lit.subject);
    if (lit.is_effect()) out.event = apply(sub, lit.event);
  }
  return out;
}

void collect_variables(const Literal& lit, std::vector<std::string>& out) {
  if (lit.is_comparison()) {
    collect_variables(lit.lhs, out);
    collect_variables(lit.rhs, out);
    return;
  }
  if (lit.is_effect()) collect_variables(lit.event, out);
  collect_variables(lit.subject, out);
}

std::string Axiom::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out += " ^ ";
    out += body[i].to_string();
  }
  if (!body.empty()) out += " => ";
  return out + head.to_string();
}

std::string GroundFact::to_string() const {
  switch (kind) {
    case Kind::Happens: return "Happens(" + term.to_string() + ", " + std::to_string(time) + ")";
    case Kind::Holds:
      return std::string(value ? "" : "~") + "HoldsAt(" + term.to_string() + ", " + std::to_string(time) + ")";
    case Kind::Released: return "ReleasedAt(" + term.to_string() + ", " + std::to_string(time) + ")";
  }
  return {};
}

std::string Diagnostic::to_string() const {
  return std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
         (severity == Severity::Error ? "error: " : "warning: ") + message;
}

void DomainDescription::rebuild_index() {
  sort_index_.clear();
  template_index_.clear();
  constant_index_.clear();
  sigma_by_event_.clear();
  for (std::size_t i = 0; i < sorts.size(); ++i) {
    sort_index_.emplace(sorts[i].name, i);
    for (std::size_t c = 0; c < sorts[i].constants.size(); ++c) {
      constant_index_.emplace(sorts[i].constants[c], std::make_pair(sorts[i].name, c));
    }
  }
  for (std::size_t i = 0; i < templates.size(); ++i) template_index_.emplace(templates[i].name, i);
  for (std::size_t i = 0; i < sigma.size(); ++i) sigma_by_event_[sigma[i].head.event.name()].push_back(i);
}

const SortDecl* DomainDescription::find_sort(const std::string& name) const {
  auto it = sort_index_.find(name);
  return it == sort_index_.end() ? nullptr : &sorts[it->second];
}

const TemplateDecl* DomainDescription::find_template(const std::string& name) const {
  auto it = template_index_.find(name);
  return it == template_index_.end() ? nullptr : &templates[it->second];
}

std::optional<std::pair<std::string, std::size_t>> DomainDescription::constant_info(const std::string& name) const {
  auto it = constant_index_.find(name);
  if (it == constant_index_.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::size_t>& DomainDescription::sigma_for_event(const std::string& functor) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = sigma_by_event_.find(functor);
  return it == sigma_by_event_.end() ? kEmpty : it->second;
}

void DomainDescription::add_fact(GroundFact fact) {
  auto& target = fact.kind == GroundFact::Kind::Happens ? delta1 : gamma;
  target[fact.time].push_back(std::move(fact));
}

std::size_t DomainDescription::fact_count() const {
  std::size_t n = 0;
  for (const auto& [t, v] : gamma) n += v.size();
  for (const auto& [t, v] : delta1) n += v.size();
  return n;
}

std::vector<Term> ground_instances(const TemplateDecl& tpl, const std::vector<SortDecl>& sorts) {
  std::vector<const SortDecl*> domains;
  for (const std::string& s : tpl.arg_sorts) {
    auto it = std::find_if(sorts.begin(), sorts.end(), [&](const SortDecl& d) { return d.name == s; });
    if (it == sorts.end()) throw Error(ErrorCode::UnknownSort, "sort '" + s + "' is not declared (template " + tpl.name + ")");
    domains.push_back(&*it);
  }
  std::vector<Term> out;
  std::vector<std::size_t> idx(domains.size(), 0);
  for (const SortDecl* d : domains) {
    if (d->constants.empty()) return out;
  }
  while (true) {
    std::vector<Term> args;
    args.reserve(domains.size());
    for (std::size_t i = 0; i < domains.size(); ++i) args.push_back(Term::constant(domains[i]->constants[idx[i]]));
    out.push_back(Term::compound(tpl.name, std::move(args)));
    // Odometer increment, last position fastest.
    std::size_t pos = domains.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < domains[pos]->constants.size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
    if (domains.empty()) return out;
  }
}

bool evaluate_comparison(const DomainDescription& domain, CmpOp op, const Term& lhs, const Term& rhs) {
  if (op == CmpOp::Eq) return lhs == rhs;
  if (op == CmpOp::Ne) return !(lhs == rhs);
  long long a = 0;
  long long b = 0;
  if (lhs.is_integer() && rhs.is_integer()) {
    a = lhs.value();
    b = rhs.value();
  } else if (lhs.is_constant() && rhs.is_constant()) {
    auto ia = domain.constant_info(lhs.name());
    auto ib = domain.constant_info(rhs.name());
    if (!ia || !ib || ia->first != ib->first) return false;
    a = static_cast<long long>(ia->second);
    b = static_cast<long long>(ib->second);
  } else {
    return false;
  }
  switch (op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
    default: return false;
  }
}

namespace {

class Validator {
 public:
  explicit Validator(DomainDescription& d) : d_(d) {}

  std::vector<Diagnostic> run() {
    check_declarations();
    d_.rebuild_index();
    for (auto* set : {&d_.sigma, &d_.psi, &d_.delta2}) {
      for (Axiom& ax : *set) check_axiom(ax);
    }
    for (auto* facts : {&d_.gamma, &d_.delta1}) {
      for (auto& [t, v] : *facts) {
        for (const GroundFact& f : v) check_fact(f);
      }
    }
    return std::move(diags_);
  }

 private:
  void error(const std::string& msg, const SourceSpan& span = {}) {
    diags_.push_back({Diagnostic::Severity::Error, msg, span});
  }
  void warning(const std::string& msg, const SourceSpan& span = {}) {
    diags_.push_back({Diagnostic::Severity::Warning, msg, span});
  }

  bool sort_known(const std::string& s) const {
    return s == kIntegerSort || std::any_of(d_.sorts.begin(), d_.sorts.end(), [&](const SortDecl& x) { return x.name == s; });
  }

  void check_declarations() {
    std::set<std::string> sort_names;
    std::map<std::string, std::string> const_owner;
    for (const SortDecl& s : d_.sorts) {
      if (s.name == kIntegerSort) error("sort name 'integer' is reserved");
      if (!sort_names.insert(s.name).second) error("duplicate sort '" + s.name + "'");
      std::set<std::string> seen;
      for (const std::string& c : s.constants) {
        if (!seen.insert(c).second) error("duplicate constant '" + c + "' in sort '" + s.name + "'");
        auto [it, fresh] = const_owner.emplace(c, s.name);
        if (!fresh && it->second != s.name) {
          warning("constant '" + c + "' is declared in sorts '" + it->second + "' and '" + s.name + "'");
        }
      }
    }
    std::set<std::string> tpl_names;
    for (const TemplateDecl& t : d_.templates) {
      if (!tpl_names.insert(t.name).second) error("duplicate template '" + t.name + "'");
      for (const std::string& s : t.arg_sorts) {
        if (!sort_known(s)) error("template '" + t.name + "' uses undeclared sort '" + s + "'");
      }
    }
  }

  // Checks a fluent/event term against its template, recording variable sorts.
  void check_pattern(const Term& term, TemplateKind kind, Axiom* ax, const SourceSpan& span) {
    const char* kind_name = kind == TemplateKind::Fluent ? "fluent" : "event";
    if (!term.is_compound()) {
      error(std::string("expected a ") + kind_name + " term, got '" + term.to_string() + "'", span);
      return;
    }
    const TemplateDecl* tpl = d_.find_template(term.name());
    if (!tpl) {
      error(std::string("undeclared ") + kind_name + " '" + term.name() + "'", span);
      return;
    }
    if (tpl->kind != kind) {
      error("'" + term.name() + "' is declared as " + (tpl->kind == TemplateKind::Fluent ? "a fluent" : "an event") +
                ", used as " + (kind == TemplateKind::Fluent ? "a fluent" : "an event"),
            span);
      return;
    }
    if (tpl->arg_sorts.size() != term.arity()) {
      error("arity mismatch for '" + term.name() + "': expected " + std::to_string(tpl->arg_sorts.size()) + ", got " +
                std::to_string(term.arity()),
            span);
      return;
    }
    for (std::size_t i = 0; i < term.arity(); ++i) {
      const Term& arg = term.args()[i];
      const std::string& sort = tpl->arg_sorts[i];
      switch (arg.kind()) {
        case Term::Kind::Variable: {
          if (!ax) {
            error("facts must be ground: '" + term.to_string() + "'", span);
            break;
          }
          auto [it, fresh] = ax->var_sorts.emplace(arg.name(), sort);
          if (!fresh && it->second != sort) {
            error("variable ?" + arg.name() + " used with sorts '" + it->second + "' and '" + sort + "'", span);
          }
          break;
        }
        case Term::Kind::Integer:
          if (sort != kIntegerSort) error("integer argument in position of sort '" + sort + "' of '" + term.name() + "'", span);
          break;
        case Term::Kind::Constant: {
          if (sort == kIntegerSort) {
            error("constant '" + arg.name() + "' in integer position of '" + term.name() + "'", span);
            break;
          }
          const SortDecl* sd = d_.find_sort(sort);
          if (sd && std::find(sd->constants.begin(), sd->constants.end(), arg.name()) == sd->constants.end()) {
            error("constant '" + arg.name() + "' is not of sort '" + sort + "'", span);
          }
          break;
        }
        case Term::Kind::Compound:
          error("nested compound argument '" + arg.to_string() + "' is not supported", span);
          break;
      }
    }
  }

  void check_literal_terms(const Literal& lit, Axiom& ax) {
    switch (lit.kind) {
      case AtomKind::HoldsAt:
      case AtomKind::ReleasedAt: check_pattern(lit.subject, TemplateKind::Fluent, &ax, ax.span); break;
      case AtomKind::Happens: check_pattern(lit.subject, TemplateKind::Event, &ax, ax.span); break;
      case AtomKind::Initiates:
      case AtomKind::Terminates:
      case AtomKind::Releases:
        check_pattern(lit.event, TemplateKind::Event, &ax, ax.span);
        check_pattern(lit.subject, TemplateKind::Fluent, &ax, ax.span);
        break;
      case AtomKind::Comparison:
        for (const Term* t : {&lit.lhs, &lit.rhs}) {
          if (t->is_compound()) error("comparison operands must be constants, integers or variables", ax.span);
        }
        break;
    }
  }

  void check_axiom(Axiom& ax) {
    ax.var_sorts.clear();
    const Literal& head = ax.head;
    if (head.time.kind != TimeExpr::Kind::Var) {
      error("axiom head must use a time variable: " + head.to_string(), ax.span);
      return;
    }
    const std::string& tvar = head.time.var;
    if (!head.positive && !(ax.cls == AxiomClass::StateConstraint && head.kind == AtomKind::HoldsAt)) {
      error("only state-constraint heads may be negated", ax.span);
    }
    check_literal_terms(head, ax);
    for (const Literal& lit : ax.body) {
      if (lit.is_effect()) {
        error("Initiates/Terminates/Releases may only appear in a head", ax.span);
        continue;
      }
      check_literal_terms(lit, ax);
      if (lit.is_comparison()) continue;
      if ((lit.time.kind == TimeExpr::Kind::Var || lit.time.kind == TimeExpr::Kind::Offset) && lit.time.var != tvar) {
        error("time variable ?" + lit.time.var + " differs from the head's ?" + tvar, ax.span);
      }
      if (lit.time.kind == TimeExpr::Kind::Offset && lit.time.value <= 0) {
        error("time offsets must be positive: " + lit.to_string(), ax.span);
      }
      if (ax.cls == AxiomClass::StateConstraint) {
        if (lit.kind == AtomKind::Happens) error("state constraints may not mention events", ax.span);
        if (lit.time.kind != TimeExpr::Kind::Var) error("state constraints relate fluents at a single timepoint", ax.span);
      }
    }
    if (tvar.empty()) return;
    if (ax.var_sorts.count(tvar)) error("?" + tvar + " is used both as a time and as an object variable", ax.span);

    // Variables bound by generators: positive body atoms and the head event.
    std::vector<std::string> bound;
    for (const Literal& lit : ax.body) {
      if (lit.positive && !lit.is_comparison()) collect_variables(lit.subject, bound);
    }
    if (head.is_effect()) collect_variables(head.event, bound);
    auto finite = [&](const std::string& v) {
      auto it = ax.var_sorts.find(v);
      return it != ax.var_sorts.end() && it->second != kIntegerSort;
    };
    auto is_bound = [&](const std::string& v) { return std::find(bound.begin(), bound.end(), v) != bound.end(); };
    std::vector<std::string> head_vars;
    collect_variables(head.subject, head_vars);
    for (const std::string& v : head_vars) {
      if (!is_bound(v) && !finite(v)) {
        error("range restriction: head variable ?" + v + " is not bound by the body or the head event", ax.span);
      }
    }
    for (const Literal& lit : ax.body) {
      if (!lit.is_comparison()) continue;
      std::vector<std::string> vs;
      collect_variables(lit, vs);
      for (const std::string& v : vs) {
        if (!is_bound(v) && !finite(v)) error("comparison variable ?" + v + " is unbound", ax.span);
      }
    }
  }

  void check_fact(const GroundFact& f) {
    if (f.time < 0 && f.time != kNextTick) error("invalid timepoint in fact " + f.to_string());
    if (!f.term.is_ground()) {
      error("facts must be ground: " + f.to_string());
      return;
    }
    check_pattern(f.term, f.kind == GroundFact::Kind::Happens ? TemplateKind::Event : TemplateKind::Fluent, nullptr, {});
  }

  DomainDescription& d_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(DomainDescription& domain) { return Validator(domain).run(); }

std::optional<std::string> check_ground_term(const DomainDescription& domain, const Term& term, TemplateKind kind) {
  if (!term.is_compound()) return "expected a compound term";
  if (!term.is_ground()) return "term must be ground";
  const TemplateDecl* tpl = domain.find_template(term.name());
  if (!tpl) return "undeclared template '" + term.name() + "'";
  if (tpl->kind != kind) return "'" + term.name() + "' has the wrong kind";
  if (tpl->arg_sorts.size() != term.arity()) return "arity mismatch for '" + term.name() + "'";
  for (std::size_t i = 0; i < term.arity(); ++i) {
    const Term& a = term.args()[i];
    const std::string& sort = tpl->arg_sorts[i];
    if (sort == kIntegerSort) {
      if (!a.is_integer()) return "expected an integer in position " + std::to_string(i + 1) + " of " + term.name();
      continue;
    }
    auto info = a.is_constant() ? domain.constant_info(a.name()) : std::nullopt;
    const SortDecl* sd = domain.find_sort(sort);
    if (!info || !sd || std::find(sd->constants.begin(), sd->constants.end(), a.name()) == sd->constants.end()) {
      return "'" + a.to_string() + "' is not a constant of sort '" + sort + "'";
    }
  }
  return std::nullopt;
}

bool uses_past_time(const DomainDescription& domain) {
  for (const auto* set : {&domain.sigma, &domain.psi, &domain.delta2}) {
    for (const Axiom& ax : *set) {
      for (const Literal& lit : ax.body) {
        if (!lit.is_comparison() && lit.time.kind != TimeExpr::Kind::Var) return true;
      }
    }
  }
  return false;
}

}  // namespace ecr
