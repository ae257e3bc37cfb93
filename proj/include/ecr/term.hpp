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

#ifndef ECR_TERM_HPP
#define ECR_TERM_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ecr {

using Time = std::int64_t;

// Input facts may carry this time to mean "the tick after the current clock".
inline constexpr Time kNextTick = -1;

// Immutable first-order term. Compound terms are fluent or event applications;
// their arguments are constants, variables or integers (depth 1).
class Term {
 public:
  enum class Kind : std::uint8_t { Constant, Variable, Integer, Compound };

  Term() : Term(Kind::Constant, std::string(), 0, {}) {}

  static Term constant(std::string name) { return Term(Kind::Constant, std::move(name), 0, {}); }
  static Term variable(std::string name) { return Term(Kind::Variable, std::move(name), 0, {}); }
  static Term integer(std::int64_t value) { return Term(Kind::Integer, std::string(), value, {}); }
  static Term compound(std::string functor, std::vector<Term> args = {}) {
    return Term(Kind::Compound, std::move(functor), 0, std::move(args));
  }

  Kind kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return kind_ == Kind::Constant; }
  bool is_variable() const noexcept { return kind_ == Kind::Variable; }
  bool is_integer() const noexcept { return kind_ == Kind::Integer; }
  bool is_compound() const noexcept { return kind_ == Kind::Compound; }

  // Constant name, variable name (without '?') or functor.
  const std::string& name() const noexcept { return name_; }
  std::int64_t value() const noexcept { return value_; }
  const std::vector<Term>& args() const noexcept { return args_; }
  std::size_t arity() const noexcept { return args_.size(); }

  bool is_ground() const noexcept { return ground_; }
  std::size_t hash() const noexcept { return hash_; }

  // Canonical surface syntax: Closed(S1), ?x, 42, Heads.
  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b) noexcept {
    return a.hash_ == b.hash_ && a.kind_ == b.kind_ && a.value_ == b.value_ && a.name_ == b.name_ &&
           a.args_ == b.args_;
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) noexcept;

 private:
  Term(Kind kind, std::string name, std::int64_t value, std::vector<Term> args);

  Kind kind_;
  bool ground_;
  std::string name_;
  std::int64_t value_;
  std::vector<Term> args_;
  std::size_t hash_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept { return t.hash(); }
};

// Variable bindings, kept sorted by variable name. Bound values are ground.
class Substitution {
 public:
  using Binding = std::pair<std::string, Term>;

  Substitution() = default;
  Substitution(std::initializer_list<Binding> bindings);

  const Term* find(const std::string& var) const noexcept;
  bool contains(const std::string& var) const noexcept { return find(var) != nullptr; }
  // Binds var to value; returns false if var is already bound to a different term.
  bool bind(const std::string& var, const Term& value);
  std::size_t size() const noexcept { return bindings_.size(); }
  bool empty() const noexcept { return bindings_.empty(); }
  const std::vector<Binding>& bindings() const noexcept { return bindings_; }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::vector<Binding> bindings_;
};

// Most-general matcher of pattern against a ground fact. Variables already
// bound in `into` must agree with the fact.
bool unify_into(const Term& pattern, const Term& fact, Substitution& into);
std::optional<Substitution> unify(const Term& pattern, const Term& fact);

Term apply(const Substitution& sub, const Term& term);

// Appends the distinct variable names of a term in first-occurrence order.
void collect_variables(const Term& term, std::vector<std::string>& out);

}  // namespace ecr

template <>
struct std::hash<ecr::Term> {
  std::size_t operator()(const ecr::Term& t) const noexcept { return t.hash(); }
};

#endif  // ECR_TERM_HPP
