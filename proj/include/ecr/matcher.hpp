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

#ifndef ECR_MATCHER_HPP
#define ECR_MATCHER_HPP

#include <functional>
#include <string>
#include <vector>

#include "ecr/domain.hpp"

namespace ecr {

enum class Status { Satisfied, Violated, Unknown };

// Three-valued view of a knowledge base that axiom bodies are matched against.
class MatchWorld {
 public:
  virtual ~MatchWorld() = default;

  // Satisfied = true, Violated = false, Unknown = value not determined.
  virtual Status fluent(const Term& fluent, Time t) const = 0;
  virtual bool released(const Term& fluent, Time t) const = 0;
  // Ground fluents of `functor` that are true or unknown at t.
  virtual void fluent_candidates(const std::string& functor, Time t, std::vector<Term>& out) const = 0;
  virtual void released_candidates(const std::string& functor, Time t, std::vector<Term>& out) const = 0;
  virtual const std::vector<Term>& events(Time t) const = 0;
};

// Receives a substitution grounding the head plus the ground body literals
// whose truth is Unknown in the world (empty when fully determined).
using MatchCallback = std::function<void(const Substitution&, const std::vector<Literal>&)>;

// Enumerates all groundings of the axiom body at time `now` extending `seed`
// that are not violated. Head variables left unbound by the body range over
// their sort.
void match_body(const DomainDescription& domain, const Axiom& axiom, const MatchWorld& world, Time now,
                const Substitution& seed, const MatchCallback& cb);

// Convenience: satisfied-only matching of a body literal list (no unknowns).
bool body_holds(const DomainDescription& domain, const Axiom& axiom, const MatchWorld& world, Time now,
                const Substitution& sub);

}  // namespace ecr

#endif  // ECR_MATCHER_HPP
