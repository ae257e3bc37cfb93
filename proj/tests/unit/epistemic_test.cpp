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
#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ecr/epistemic.hpp"
#include "ecr/error.hpp"
#include "ecr/parser.hpp"
#include "ecr/pool.hpp"
#include "oracles.hpp"

namespace ecr {
namespace {

Term T(const char* s) { return parse_term(s); }
KLiteral L(const char* s, bool positive = true) { return {T(s), positive}; }

ModelPool epistemic_circuit() {
  ParseResult r = parse_domain_path(std::string(ECR_DATA_DIR) + "/circuit_epistemic.ec");
  EXPECT_TRUE(r.ok()) << r.error_text();
  return ModelPool(*r.domain, {KbMode::NonDestructive, ReasoningMode::Epistemic, 1024});
}

bool has_potential(const EpistemicState& es, Time t, const char* event) {
  auto it = es.potentials.find(t);
  if (it == es.potentials.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const PotentialEvent& p) { return p.event == T(event); });
}

bool has_clause(const EpistemicState& es, std::vector<KLiteral> clause) {
  std::sort(clause.begin(), clause.end());
  return std::any_of(es.hcds.begin(), es.hcds.end(), [&](const Hcd& h) { return h.clause == clause; });
}

TEST(Epistemic, InitialKnowledge) {
  ModelPool pool = epistemic_circuit();
  EXPECT_EQ(pool.knows(T("Closed(S3)")), Knowledge::Unknown);
  EXPECT_EQ(pool.knows(T("Closed(S2)")), Knowledge::KnownTrue);
  EXPECT_EQ(pool.knows(T("Lit(L)")), Knowledge::KnownFalse);
}

TEST(Epistemic, SenseSetsKnowledge) {
  EpistemicState es;
  EXPECT_EQ(es.knows(T("Closed(S3)")), Knowledge::Unknown);
  sense(es, T("Closed(S3)"), false, 0);
  EXPECT_EQ(es.knows(T("Closed(S3)")), Knowledge::KnownFalse);
  EXPECT_THROW(sense(es, T("Closed(S3)"), true, 0), Error);
}

TEST(Epistemic, PotentialActivateAtOne) {
  ModelPool pool = epistemic_circuit();
  EXPECT_FALSE(has_potential(pool.epistemic_state(), 0, "Activate(R)"));
  pool.tick();
  EXPECT_TRUE(has_potential(pool.epistemic_state(), 1, "Activate(R)"));
  const auto& pots = pool.epistemic_state().potentials.at(1);
  auto it = std::find_if(pots.begin(), pots.end(), [](const PotentialEvent& p) { return p.event == T("Activate(R)"); });
  EXPECT_EQ(it->context, (std::vector<KLiteral>{L("Closed(S3)")}));
  EXPECT_EQ(it->to_string().rfind("Activate_pot(R)", 0), 0u);
}

TEST(Epistemic, KnownEffectsAreKnown) {
  ModelPool pool = epistemic_circuit();
  pool.tick();
  EXPECT_EQ(pool.knows(T("Closed(S1)")), Knowledge::KnownTrue);
}

TEST(Epistemic, HiddenCausalDependencyAtTwo) {
  ModelPool pool = epistemic_circuit();
  pool.run_narrative(2);
  EXPECT_TRUE(has_clause(pool.epistemic_state(), {L("Closed(S3)"), L("Activated(R)", false)}));
  EXPECT_EQ(pool.knows(T("Activated(R)")), Knowledge::Unknown);
}

TEST(Epistemic, SensingS3RevealsRelay) {
  ModelPool pool = epistemic_circuit();
  pool.submit_statement("HoldsAt(Closed(S3), 1)");
  pool.run_narrative(2);
  EXPECT_EQ(pool.knows(T("Activated(R)")), Knowledge::KnownTrue);

  ModelPool neg = epistemic_circuit();
  neg.submit_statement("~HoldsAt(Closed(S3), 1)");
  neg.run_narrative(2);
  EXPECT_EQ(neg.knows(T("Activated(R)")), Knowledge::KnownFalse);
}

TEST(Epistemic, SenseKnownIsIdempotent) {
  EpistemicState es;
  es.set(T("A"), true);
  es.add_clause({L("A", false), L("B")}, 0);
  resolve(es);
  std::size_t before = es.hcds.size();
  sense(es, T("A"), true, 1);
  EXPECT_EQ(es.knows(T("A")), Knowledge::KnownTrue);
  EXPECT_EQ(es.hcds.size(), before);
}

TEST(Epistemic, SenseThroughHcd) {
  EpistemicState es;
  es.add_clause({L("Closed(S3)"), L("Activated(R)", false)}, 2);
  sense(es, T("Closed(S3)"), false, 2);
  EXPECT_EQ(es.knows(T("Activated(R)")), Knowledge::KnownFalse);
}

TEST(Epistemic, UnitPropagation) {
  EpistemicState es;
  es.add_clause({L("A"), L("B")}, 0);
  es.set(T("A"), false);
  auto promoted = resolve(es);
  EXPECT_EQ(promoted, (std::vector<KLiteral>{L("B")}));
  EXPECT_EQ(es.knows(T("B")), Knowledge::KnownTrue);
}

TEST(Epistemic, UnitPropagationCascade) {
  EpistemicState es;
  es.add_clause({L("A"), L("B")}, 0);
  es.add_clause({L("B", false), L("C")}, 0);
  es.set(T("A"), false);
  resolve(es);
  EXPECT_EQ(es.knows(T("B")), Knowledge::KnownTrue);
  EXPECT_EQ(es.knows(T("C")), Knowledge::KnownTrue);
  EXPECT_TRUE(es.hcds.empty());
}

TEST(Epistemic, SatisfiedClauseDiscarded) {
  EpistemicState es;
  es.add_clause({L("A"), L("B")}, 0);
  es.set(T("A"), true);
  resolve(es);
  EXPECT_TRUE(es.hcds.empty());
  EXPECT_EQ(es.knows(T("B")), Knowledge::Unknown);
}

TEST(Epistemic, TautologiesAreNotStored) {
  EpistemicState es;
  EXPECT_FALSE(es.add_clause({L("A"), L("A", false)}, 0));
  EXPECT_TRUE(es.add_clause({L("A"), L("B")}, 0));
  EXPECT_FALSE(es.add_clause({L("B"), L("A")}, 0));
}

TEST(Epistemic, PropagationIsSound) {
  std::mt19937 rng(31);
  const char* atoms[] = {"A", "B", "C", "D", "E"};
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<std::vector<KLiteral>> clauses;
    int nc = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int c = 0; c < nc; ++c) {
      std::vector<KLiteral> clause;
      int len = std::uniform_int_distribution<int>(2, 3)(rng);
      for (int k = 0; k < len; ++k) clause.push_back(L(atoms[rng() % 5], rng() % 2));
      clauses.push_back(clause);
    }
    std::vector<KLiteral> units;
    int nu = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int u = 0; u < nu; ++u) {
      KLiteral l = L(atoms[rng() % 5], rng() % 2);
      if (std::none_of(units.begin(), units.end(), [&](const KLiteral& x) { return x.fluent == l.fluent; })) units.push_back(l);
    }
    EpistemicState es;
    for (const auto& c : clauses) es.add_clause(c, 0);
    for (const auto& u : units) es.set(u.fluent, u.positive);
    bool sat = oracle::satisfiable(clauses, units);
    std::vector<KLiteral> promoted;
    try {
      promoted = resolve(es);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::KnowledgeInconsistency);
      EXPECT_FALSE(sat);
      continue;
    }
    if (!sat) continue;
    for (const KLiteral& p : promoted) EXPECT_TRUE(oracle::entails(clauses, units, p)) << p.to_string();
    // Anything still stored must not be decided by the current knowledge alone.
    for (const Hcd& h : es.hcds) {
      int open = 0;
      for (const KLiteral& l : h.clause) open += es.knows(l.fluent) == Knowledge::Unknown;
      EXPECT_GE(open, 2);
    }
  }
}

}  // namespace
}  // namespace ecr
