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

#ifndef ECR_DOMAIN_HPP
#define ECR_DOMAIN_HPP

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ecr/term.hpp"

namespace ecr {

// Name of the implicit sort of integer payloads (e.g. milliseconds in events).
inline constexpr const char* kIntegerSort = "integer";

struct SortDecl {
  std::string name;
  std::vector<std::string> constants;

  friend bool operator==(const SortDecl&, const SortDecl&) = default;
};

enum class TemplateKind { Fluent, Event };

struct TemplateDecl {
  TemplateKind kind = TemplateKind::Fluent;
  std::string name;
  std::vector<std::string> arg_sorts;

  friend bool operator==(const TemplateDecl&, const TemplateDecl&) = default;
};

// Time argument of an atom: ?t, ?t-k, or an absolute timepoint.
struct TimeExpr {
  enum class Kind { Var, Offset, Absolute };
  Kind kind = Kind::Var;
  std::string var;
  Time value = 0;

  static TimeExpr variable(std::string v) { return {Kind::Var, std::move(v), 0}; }
  static TimeExpr offset(std::string v, Time k) { return {Kind::Offset, std::move(v), k}; }
  static TimeExpr absolute(Time t) { return {Kind::Absolute, {}, t}; }

  Time resolve(Time now) const noexcept {
    switch (kind) {
      case Kind::Var: return now;
      case Kind::Offset: return now - value;
      case Kind::Absolute: return value;
    }
    return now;
  }
  std::string to_string() const;

  friend bool operator==(const TimeExpr&, const TimeExpr&) = default;
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
std::string_view to_string(CmpOp op);

enum class AtomKind { HoldsAt, Happens, ReleasedAt, Initiates, Terminates, Releases, Comparison };

struct Literal {
  bool positive = true;
  AtomKind kind = AtomKind::HoldsAt;
  // Fluent for HoldsAt/ReleasedAt/effect heads, event for Happens.
  Term subject;
  // Event term of Initiates/Terminates/Releases heads.
  Term event;
  TimeExpr time;
  CmpOp op = CmpOp::Eq;
  Term lhs;
  Term rhs;

  static Literal holds_at(Term fluent, TimeExpr t, bool positive = true);
  static Literal happens(Term event, TimeExpr t, bool positive = true);
  static Literal released_at(Term fluent, TimeExpr t, bool positive = true);
  static Literal effect(AtomKind kind, Term event, Term fluent, TimeExpr t);
  static Literal comparison(CmpOp op, Term lhs, Term rhs);

  bool is_comparison() const noexcept { return kind == AtomKind::Comparison; }
  bool is_effect() const noexcept {
    return kind == AtomKind::Initiates || kind == AtomKind::Terminates || kind == AtomKind::Releases;
  }
  std::string to_string() const;

  friend bool operator==(const Literal&, const Literal&) = default;
};

Literal apply(const Substitution& sub, const Literal& lit);
void collect_variables(const Literal& lit, std::vector<std::string>& out);

struct SourceSpan {
  int line = 0;
  int column = 0;
  int end_line = 0;
  int end_column = 0;
};

enum class AxiomClass { PositiveEffect, NegativeEffect, Release, StateConstraint, Trigger };
std::string_view to_string(AxiomClass c);

struct Axiom {
  AxiomClass cls = AxiomClass::PositiveEffect;
  std::vector<Literal> body;
  Literal head;
  SourceSpan span;
  // Filled by validation: sort of every variable that occurs in a template position.
  std::map<std::string, std::string> var_sorts;

  std::string to_string() const;

  friend bool operator==(const Axiom& a, const Axiom& b) {
    return a.cls == b.cls && a.body == b.body && a.head == b.head;
  }
};

struct GroundFact {
  enum class Kind { Happens, Holds, Released };
  Kind kind = Kind::Happens;
  Term term;
  bool value = true;
  Time time = 0;

  static GroundFact happens(Term event, Time t) { return {Kind::Happens, std::move(event), true, t}; }
  static GroundFact holds(Term fluent, bool value, Time t) { return {Kind::Holds, std::move(fluent), value, t}; }
  static GroundFact released(Term fluent, Time t) { return {Kind::Released, std::move(fluent), true, t}; }

  std::string to_string() const;

  friend bool operator==(const GroundFact&, const GroundFact&) = default;
};

// The compiled theory: sorts and templates (with unique names), effect and
// release axioms, state constraints, triggers, observations and narrative.
struct DomainDescription {
  std::vector<SortDecl> sorts;
  std::vector<TemplateDecl> templates;
  std::vector<Axiom> sigma;
  std::vector<Axiom> psi;
  std::vector<Axiom> delta2;
  std::map<Time, std::vector<GroundFact>> gamma;
  std::map<Time, std::vector<GroundFact>> delta1;

  // Lookup tables; call rebuild_index() after editing the vectors above.
  void rebuild_index();
  const SortDecl* find_sort(const std::string& name) const;
  const TemplateDecl* find_template(const std::string& name) const;
  // Sort and declaration ordinal of a constant, if declared.
  std::optional<std::pair<std::string, std::size_t>> constant_info(const std::string& name) const;
  // Effect axioms indexed by head event functor.
  const std::vector<std::size_t>& sigma_for_event(const std::string& functor) const;

  void add_fact(GroundFact fact);
  std::size_t fact_count() const;

  friend bool operator==(const DomainDescription& a, const DomainDescription& b) {
    return a.sorts == b.sorts && a.templates == b.templates && a.sigma == b.sigma && a.psi == b.psi &&
           a.delta2 == b.delta2 && a.gamma == b.gamma && a.delta1 == b.delta1;
  }

 private:
  std::unordered_map<std::string, std::size_t> sort_index_;
  std::unordered_map<std::string, std::size_t> template_index_;
  std::unordered_map<std::string, std::pair<std::string, std::size_t>> constant_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> sigma_by_event_;
};

struct Diagnostic {
  enum class Severity { Error, Warning };
  Severity severity = Severity::Error;
  std::string message;
  SourceSpan span;

  std::string to_string() const;
};

// Cartesian product of the template's argument sorts, in declaration order.
// Throws UnknownSort for undeclared sorts and for the integer sort.
std::vector<Term> ground_instances(const TemplateDecl& tpl, const std::vector<SortDecl>& sorts);

// Checks declarations, arities, argument sorts, head shapes and range
// restriction; fills Axiom::var_sorts. Returns diagnostics (empty if valid).
std::vector<Diagnostic> validate(DomainDescription& domain);

// Validates a single ground fluent or event term against the domain.
std::optional<std::string> check_ground_term(const DomainDescription& domain, const Term& term, TemplateKind kind);

// True iff some axiom body refers to a time other than the head's time variable.
bool uses_past_time(const DomainDescription& domain);

// Evaluates a comparison between two ground terms (constants of one sort by
// declaration order, integers numerically).
bool evaluate_comparison(const DomainDescription& domain, CmpOp op, const Term& lhs, const Term& rhs);

}  // namespace ecr

#endif  // ECR_DOMAIN_HPP
