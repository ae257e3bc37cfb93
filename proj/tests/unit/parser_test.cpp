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

#include <random>

#include "ecr/error.hpp"
#include "ecr/parser.hpp"
#include "oracles.hpp"

namespace ecr {
namespace {

DomainDescription parse_ok(std::string_view src) {
  ParseResult r = parse_domain(src);
  if (!r.ok()) ADD_FAILURE() << r.error_text();
  return r.ok() ? *r.domain : DomainDescription{};
}

constexpr const char* kObjects =
    "sort: object(O1,O2).\nfluent: F1(object,object).\nevent: E1(object).\nInitiates(E1(?o2), F1(?o2,?o1), ?t).";

TEST(Parser, DeclarationsAndEffect) {
  DomainDescription d = parse_ok(kObjects);
  ASSERT_EQ(d.sorts.size(), 1u);
  EXPECT_EQ(d.sorts[0].constants, (std::vector<std::string>{"O1", "O2"}));
  EXPECT_EQ(d.templates.size(), 2u);
  ASSERT_EQ(d.sigma.size(), 1u);
  EXPECT_EQ(d.sigma[0].cls, AxiomClass::PositiveEffect);
  EXPECT_EQ(d.sigma[0].head.event, parse_term("E1(?o2)"));
  EXPECT_EQ(d.sigma[0].head.subject, parse_term("F1(?o2, ?o1)"));
  EXPECT_TRUE(d.psi.empty());
  EXPECT_TRUE(d.delta2.empty());
}

TEST(Parser, BodyWithComparisonAndNegatedEvent) {
  DomainDescription d = parse_ok(
      "sort: object(O1,O2).\nfluent: F1(object,object).\nevent: E1(object).\nevent: E2(object).\n"
      "HoldsAt(F1(?o1,?o2),?t) ^ {?o1 <> ?o2} ^ ~Happens(E2(O1),?t) => Initiates(E1(?o2), F1(?o2,?o1), ?t).");
  ASSERT_EQ(d.sigma.size(), 1u);
  const auto& body = d.sigma[0].body;
  ASSERT_EQ(body.size(), 3u);
  EXPECT_EQ(body[0].kind, AtomKind::HoldsAt);
  EXPECT_TRUE(body[0].positive);
  EXPECT_EQ(body[1].kind, AtomKind::Comparison);
  EXPECT_EQ(body[1].op, CmpOp::Ne);
  EXPECT_EQ(body[2].kind, AtomKind::Happens);
  EXPECT_FALSE(body[2].positive);
  EXPECT_EQ(body[2].subject, parse_term("E2(O1)"));
}

TEST(Parser, SentinelFactInSource) {
  DomainDescription d = parse_ok(
      "sort: user(Ned).\nsort: door(HallBedroom).\nevent: DoorOpens(user, door, integer).\n"
      "Happens(DoorOpens(Ned,HallBedroom,0), -1).");
  ASSERT_EQ(d.delta1.count(kNextTick), 1u);
  EXPECT_EQ(d.delta1.at(kNextTick)[0].term, parse_term("DoorOpens(Ned, HallBedroom, 0)"));
}

TEST(Parser, StatementSentinel) {
  GroundFact f = parse_statement("Happens(DoorOpens(Ned,HallBedroom,0), -1)", 4);
  EXPECT_EQ(f.kind, GroundFact::Kind::Happens);
  EXPECT_EQ(f.time, 5);
  GroundFact g = parse_statement("Happens(Close(S1), -1)", 4);
  EXPECT_EQ(g.term, parse_term("Close(S1)"));
  EXPECT_EQ(g.time, 5);
}

TEST(Parser, StatementObservationBeforeInit) {
  GroundFact f = parse_statement("HoldsAt(Closed(S2), 0)", -1);
  EXPECT_EQ(f.kind, GroundFact::Kind::Holds);
  EXPECT_TRUE(f.value);
  EXPECT_EQ(f.time, 0);
  GroundFact n = parse_statement("~HoldsAt(Lit(L), 6)", 4);
  EXPECT_FALSE(n.value);
}

TEST(Parser, StatementRejectsPast) {
  try {
    parse_statement("Happens(Close(S1), 2)", 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RejectPast);
  }
}

TEST(Parser, StatementAlertPayload) {
  GroundFact f = parse_statement("Happens(TriggerAlert(NoActivity,340), -1)", 0);
  EXPECT_EQ(f.term.args().back(), Term::integer(340));
}

TEST(Parser, StatementChecksTemplates) {
  DomainDescription d = parse_ok(kObjects);
  EXPECT_THROW(parse_statement("Happens(E9(O1), -1)", 0, &d), Error);
  EXPECT_THROW(parse_statement("Happens(E1(O1, O2), -1)", 0, &d), Error);
  EXPECT_NO_THROW(parse_statement("Happens(E1(O1), -1)", 0, &d));
}

TEST(Parser, ClassifiesHeads) {
  DomainDescription d = parse_ok(
      "fluent: A.\nfluent: B.\nevent: E.\n"
      "Initiates(E, A, ?t).\nTerminates(E, A, ?t).\nReleases(E, B, ?t).\n"
      "HoldsAt(A, ?t) => HoldsAt(B, ?t).\nHoldsAt(A, ?t) => ~HoldsAt(B, ?t).\n"
      "HoldsAt(A, ?t) => Happens(E, ?t).\nHoldsAt(A, 0).\nHappens(E, 2).\n");
  ASSERT_EQ(d.sigma.size(), 3u);
  EXPECT_EQ(d.sigma[1].cls, AxiomClass::NegativeEffect);
  EXPECT_EQ(d.sigma[2].cls, AxiomClass::Release);
  ASSERT_EQ(d.psi.size(), 2u);
  EXPECT_FALSE(d.psi[1].head.positive);
  ASSERT_EQ(d.delta2.size(), 1u);
  EXPECT_EQ(d.gamma.at(0).size(), 1u);
  EXPECT_EQ(d.delta1.at(2).size(), 1u);
}

TEST(Parser, CommentsAndWhitespace) {
  DomainDescription a = parse_ok("fluent: A.\n// a comment\nevent:   E .\nInitiates( E ,A, ?t ).");
  DomainDescription b = parse_ok("fluent: A. event: E. Initiates(E, A, ?t).");
  EXPECT_EQ(a, b);
}

TEST(Parser, ColonConstants) {
  DomainDescription d = parse_ok("sort: explanation(TS2:Morning, TS8:NoShowerYet).\nfluent: P(explanation).\nHoldsAt(P(TS2:Morning), 0).");
  EXPECT_EQ(d.gamma.at(0)[0].term.args()[0].name(), "TS2:Morning");
}

struct BadCase {
  const char* name;
  const char* source;
};

class ParserRejects : public ::testing::TestWithParam<BadCase> {};

TEST_P(ParserRejects, WithDiagnostics) {
  ParseResult r = parse_domain(GetParam().source);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.diagnostics.empty());
}

INSTANTIATE_TEST_SUITE_P(
    Invalid, ParserRejects,
    ::testing::Values(BadCase{"syntax", "fluent: A\nevent: E."},
                      BadCase{"undeclared_fluent", "event: E.\nInitiates(E, A, ?t)."},
                      BadCase{"arity", "sort: s(X).\nfluent: A(s).\nevent: E.\nInitiates(E, A, ?t)."},
                      BadCase{"wrong_sort", "sort: s(X).\nsort: r(Y).\nfluent: A(s).\nevent: E.\nInitiates(E, A(Y), ?t)."},
                      BadCase{"negated_effect_head", "fluent: A.\nevent: E.\nHoldsAt(A, ?t) => ~Happens(E, ?t)."},
                      BadCase{"event_in_constraint", "fluent: A.\nfluent: B.\nevent: E.\nHappens(E, ?t) => HoldsAt(B, ?t)."},
                      BadCase{"future_offset", "fluent: A.\nevent: E.\nHoldsAt(A, ?t+1) => Initiates(E, A, ?t)."},
                      BadCase{"nonground_fact", "sort: s(X).\nfluent: A(s).\nHoldsAt(A(?x), 0)."},
                      BadCase{"duplicate_sort", "sort: s(X).\nsort: s(Y)."},
                      BadCase{"integer_range", "event: E(integer).\nfluent: A.\nHappens(E(?n), ?t) => Happens(E(?m), ?t)."}),
    [](const ::testing::TestParamInfo<BadCase>& info) { return std::string(info.param.name); });

TEST(Parser, EmptyDomainPrintsEmpty) { EXPECT_EQ(pretty_print(DomainDescription{}), ""); }

TEST(Parser, PrettyPrintCanonicalOrder) {
  DomainDescription d = parse_ok("Initiates(E1(?o2), F1(?o2,?o1), ?t).\nevent: E1(object).\nfluent: F1(object,object).\nsort: object(O1,O2).");
  std::string text = pretty_print(d);
  auto sort = text.find("sort:");
  auto fluent = text.find("fluent:");
  auto event = text.find("event:");
  auto axiom = text.find("Initiates");
  EXPECT_LT(sort, fluent);
  EXPECT_LT(fluent, event);
  EXPECT_LT(event, axiom);
  EXPECT_EQ(parse_ok(text), d);
}

TEST(Parser, PrettyPrintConstraintForm) {
  DomainDescription d = parse_ok("fluent: A.\nfluent: B.\nHoldsAt(A, ?t) => ~HoldsAt(B, ?t).");
  std::string text = pretty_print(d);
  EXPECT_NE(text.find("HoldsAt(A, ?t) => ~HoldsAt(B, ?t)."), std::string::npos) << text;
}

TEST(Parser, RoundTripProperty) {
  std::mt19937 rng(12345);
  for (int i = 0; i < 200; ++i) {
    std::string src = oracle::random_domain_source(rng);
    ParseResult r = parse_domain(src);
    ASSERT_TRUE(r.ok()) << src << "\n" << r.error_text();
    std::string printed = pretty_print(*r.domain);
    ParseResult again = parse_domain(printed);
    ASSERT_TRUE(again.ok()) << printed << "\n" << again.error_text();
    EXPECT_EQ(*again.domain, *r.domain) << src << "\n---\n" << printed;
    EXPECT_EQ(pretty_print(*again.domain), printed);
  }
}

TEST(Parser, ShippedDomainsParse) {
  for (const char* f : {"circuit.ec", "circuit_epistemic.ec", "coin.ec", "home"}) {
    ParseResult r = parse_domain_path(std::string(ECR_DATA_DIR) + "/" + f);
    EXPECT_TRUE(r.ok()) << f << ": " << r.error_text();
  }
}

TEST(Parser, PastTimeDetection) {
  ParseResult r = parse_domain("fluent: A.\nevent: E.\nHoldsAt(A, ?t-1) => Initiates(E, A, ?t).");
  ASSERT_TRUE(r.ok()) << r.error_text();
  EXPECT_TRUE(r.uses_past_time);
  EXPECT_FALSE(parse_domain(kObjects).uses_past_time);
}

}  // namespace
}  // namespace ecr
