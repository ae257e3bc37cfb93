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

#ifndef ECR_TESTS_ORACLES_HPP
#define ECR_TESTS_ORACLES_HPP

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ecr/ebn.hpp"
#include "ecr/epistemic.hpp"
#include "ecr/pool.hpp"

namespace oracle {

// A propositional domain with fluents P0..Pn-1 and events E0..Em-1, kept in a
// form the reference semantics below can evaluate without the library.
struct PropLiteral {
  int fluent = 0;
  bool positive = true;
};

struct PropAxiom {
  enum Kind { Initiates, Terminates, Releases, Constraint, Trigger } kind = Initiates;
  int event = 0;     // effect axioms and triggers
  int fluent = 0;    // effect and constraint heads
  bool positive = true;  // constraint head sign
  std::vector<PropLiteral> body;
};

struct PropObservation {
  int time = 0;
  int fluent = 0;
  bool value = true;
};

struct PropDomain {
  int fluents = 0;
  int events = 0;
  int horizon = 0;
  std::vector<PropAxiom> axioms;
  std::vector<int> initially_true;
  std::vector<int> initially_released;
  std::map<int, std::vector<int>> narrative;
  std::vector<PropObservation> observations;

  std::string source() const;
};

struct GenOptions {
  int max_fluents = 6;
  int max_events = 3;
  int max_horizon = 4;
  bool releases = true;
  bool constraints = true;
  bool triggers = true;
  bool observations = true;
};

PropDomain random_prop_domain(std::mt19937& rng, const GenOptions& opt);

// (holds, released) bitmasks over the fluents.
using PropState = std::pair<std::uint32_t, std::uint32_t>;

// Reference semantics: for every timepoint 0..horizon, the set of states some
// model of the domain can be in. Enumerates all assignments per step and keeps
// those satisfying inertia, effects, constraints and observations.
std::vector<std::set<PropState>> reachable_states(const PropDomain& d);

// Current states of the pool's models projected onto P0..Pn-1.
std::set<PropState> pool_states(const ecr::ModelPool& pool);

// Full-joint-table conditional probability Pr(target | obs) with a private
// evaluator of the CPTs.
double full_joint_posterior(const ecr::Ebn& net, const std::string& target, const std::map<std::string, bool>& obs);

// Random acyclic network over `nodes` nodes with a single activity target.
ecr::Ebn random_network(std::mt19937& rng, int nodes, int max_parents = 3);

// Truth-table entailment: do the clauses plus the unit literals entail `lit`?
bool entails(const std::vector<std::vector<ecr::KLiteral>>& clauses, const std::vector<ecr::KLiteral>& units,
             const ecr::KLiteral& lit);
bool satisfiable(const std::vector<std::vector<ecr::KLiteral>>& clauses, const std::vector<ecr::KLiteral>& units);

// Random first-order domain source text for parser round-trips.
std::string random_domain_source(std::mt19937& rng);

}  // namespace oracle

#endif  // ECR_TESTS_ORACLES_HPP
