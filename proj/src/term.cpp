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

#include "ecr/term.hpp"

#include <algorithm>

#include "ecr/error.hpp"

namespace ecr {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSort: return "UnknownSort";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::RejectPast: return "RejectPast";
    case ErrorCode::HistoryUnavailable: return "HistoryUnavailable";
    case ErrorCode::Inconsistency: return "Inconsistency";
    case ErrorCode::ConstraintContradiction: return "ConstraintContradiction";
    case ErrorCode::ModeUnavailable: return "ModeUnavailable";
    case ErrorCode::GlobalInconsistency: return "GlobalInconsistency";
    case ErrorCode::BranchCapExceeded: return "BranchCapExceeded";
    case ErrorCode::KnowledgeInconsistency: return "KnowledgeInconsistency";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IncompleteCPT: return "IncompleteCPT";
    case ErrorCode::CycleError: return "CycleError";
    case ErrorCode::ZeroEvidence: return "ZeroEvidence";
    case ErrorCode::PhaseNotEntered: return "PhaseNotEntered";
    case ErrorCode::UnknownExplanation: return "UnknownExplanation";
    case ErrorCode::MissingNetwork: return "MissingNetwork";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::SessionNotFound: return "SessionNotFound";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Term::Term(Kind kind, std::string name, std::int64_t value, std::vector<Term> args)
    : kind_(kind), ground_(kind != Kind::Variable), name_(std::move(name)), value_(value), args_(std::move(args)) {
  std::size_t h = std::hash<std::string>{}(name_);
  h = mix(h, static_cast<std::size_t>(kind_));
  h = mix(h, std::hash<std::int64_t>{}(value_));
  for (const Term& a : args_) {
    h = mix(h, a.hash_);
    ground_ = ground_ && a.ground_;
  }
  hash_ = h;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) noexcept {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  if (a.kind_ == Term::Kind::Integer) return a.value_ <=> b.value_;
  if (auto c = a.name_.compare(b.name_); c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  const std::size_t n = std::min(a.args_.size(), b.args_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.args_[i] <=> b.args_[i]; c != 0) return c;
  }
  return a.args_.size() <=> b.args_.size();
}

std::string Term::to_string() const {
  switch (kind_) {
    case Kind::Constant: return name_;
    case Kind::Variable: return "?" + name_;
    case Kind::Integer: return std::to_string(value_);
    case Kind::Compound: {
      if (args_.empty()) return name_;
      std::string out = name_ + "(";
      for (std::size_t i = 0; i < args_.size(); ++i) {
        if (i) out += ", ";
        out += args_[i].to_string();
      }
      return out + ")";
    }
  }
  return name_;
}

Substitution::Substitution(std::initializer_list<Binding> bindings) {
  for (const auto& [var, value] : bindings) {
    if (!bind(var, value)) throw Error(ErrorCode::InvalidArgument, "conflicting binding for ?" + var);
  }
}

const Term* Substitution::find(const std::string& var) const noexcept {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), var,
                             [](const Binding& b, const std::string& v) { return b.first < v; });
  if (it != bindings_.end() && it->first == var) return &it->second;
  return nullptr;
}

bool Substitution::bind(const std::string& var, const Term& value) {
  auto it = std::lower_bound(bindings_.begin(), bindings_.end(), var,
                             [](const Binding& b, const std::string& v) { return b.first < v; });
  if (it != bindings_.end() && it->first == var) return it->second == value;
  bindings_.insert(it, Binding(var, value));
  return true;
}

bool unify_into(const Term& pattern, const Term& fact, Substitution& into) {
  switch (pattern.kind()) {
    case Term::Kind::Variable:
      return into.bind(pattern.name(), fact);
    case Term::Kind::Constant:
    case Term::Kind::Integer:
      return pattern == fact;
    case Term::Kind::Compound: {
      if (!fact.is_compound() || fact.name() != pattern.name() || fact.arity() != pattern.arity()) return false;
      if (pattern.is_ground()) return pattern == fact;
      for (std::size_t i = 0; i < pattern.arity(); ++i) {
        if (!unify_into(pattern.args()[i], fact.args()[i], into)) return false;
      }
      return true;
    }
  }
  return false;
}

std::optional<Substitution> unify(const Term& pattern, const Term& fact) {
  Substitution sub;
  if (!unify_into(pattern, fact, sub)) return std::nullopt;
  return sub;
}

Term apply(const Substitution& sub, const Term& term) {
  if (term.is_ground()) return term;
  if (term.is_variable()) {
    if (const Term* bound = sub.find(term.name())) return *bound;
    return term;
  }
  std::vector<Term> args;
  args.reserve(term.arity());
  for (const Term& a : term.args()) args.push_back(apply(sub, a));
  return Term::compound(term.name(), std::move(args));
}

void collect_variables(const Term& term, std::vector<std::string>& out) {
  if (term.is_variable()) {
    if (std::find(out.begin(), out.end(), term.name()) == out.end()) out.push_back(term.name());
    return;
  }
  for (const Term& a : term.args()) collect_variables(a, out);
}

}  // namespace ecr
