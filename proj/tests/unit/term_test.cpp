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

#include "ecr/domain.hpp"
#include "ecr/error.hpp"
#include "ecr/parser.hpp"
#include "ecr/term.hpp"

namespace ecr {
namespace {

Term C(const char* n) { return Term::constant(n); }
Term V(const char* n) { return Term::variable(n); }

TEST(Term, UnifyPositional) {
  auto s = unify(parse_term("F1(?o2, ?o1)"), parse_term("F1(O2, O1)"));
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(*s->find("o2"), C("O2"));
  EXPECT_EQ(*s->find("o1"), C("O1"));
}

TEST(Term, UnifyRepeatedVariableClash) {
  EXPECT_FALSE(unify(parse_term("F1(?x, ?x)"), parse_term("F1(O1, O2)")).has_value());
  EXPECT_TRUE(unify(parse_term("F1(?x, ?x)"), parse_term("F1(O1, O1)")).has_value());
}

TEST(Term, UnifyClosed) {
  auto s = unify(parse_term("Closed(?s)"), parse_term("Closed(S1)"));
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->size(), 1u);
  EXPECT_EQ(*s->find("s"), C("S1"));
}

TEST(Term, UnifyRespectsExistingBindings) {
  Substitution into{{"s", C("S2")}};
  EXPECT_FALSE(unify_into(parse_term("Closed(?s)"), parse_term("Closed(S1)"), into));
}

TEST(Term, FunctorAndArityMustMatch) {
  EXPECT_FALSE(unify(parse_term("Closed(?s)"), parse_term("Open(S1)")).has_value());
  EXPECT_FALSE(unify(parse_term("F(?a)"), parse_term("F(A, B)")).has_value());
}

TEST(Term, ApplyLiteral) {
  Literal lit = Literal::holds_at(parse_term("Closed(?s)"), TimeExpr::variable("t"));
  Literal out = apply(Substitution{{"s", C("S1")}}, lit);
  EXPECT_EQ(out.subject, parse_term("Closed(S1)"));
  EXPECT_EQ(out.time, TimeExpr::variable("t"));
  EXPECT_EQ(apply(Substitution{}, lit), lit);
}

TEST(Term, ApplyComparisonEvaluates) {
  auto parsed = parse_domain("sort: object(O1, O2).");
  ASSERT_TRUE(parsed.ok());
  Literal cmp = Literal::comparison(CmpOp::Ne, V("o1"), V("o2"));
  Literal g = apply(Substitution{{"o1", C("O1")}, {"o2", C("O2")}}, cmp);
  EXPECT_EQ(g.lhs, C("O1"));
  EXPECT_EQ(g.rhs, C("O2"));
  EXPECT_TRUE(evaluate_comparison(*parsed.domain, g.op, g.lhs, g.rhs));
  EXPECT_FALSE(evaluate_comparison(*parsed.domain, CmpOp::Ne, C("O1"), C("O1")));
  EXPECT_TRUE(evaluate_comparison(*parsed.domain, CmpOp::Lt, C("O1"), C("O2")));
  EXPECT_TRUE(evaluate_comparison(*parsed.domain, CmpOp::Ge, Term::integer(7), Term::integer(7)));
}

TEST(Term, GroundInstances) {
  std::vector<SortDecl> sorts{{"object", {"O1", "O2"}}};
  auto f = ground_instances({TemplateKind::Fluent, "F1", {"object", "object"}}, sorts);
  std::vector<std::string> got;
  for (const Term& t : f) got.push_back(t.to_string());
  EXPECT_EQ(got, (std::vector<std::string>{"F1(O1, O1)", "F1(O1, O2)", "F1(O2, O1)", "F1(O2, O2)"}));
  auto e = ground_instances({TemplateKind::Event, "E1", {"object"}}, sorts);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].to_string(), "E1(O1)");
  auto h = ground_instances({TemplateKind::Fluent, "Heads", {}}, sorts);
  ASSERT_EQ(h.size(), 1u);
  EXPECT_EQ(h[0].name(), "Heads");
}

TEST(Term, GroundInstancesUnknownSort) {
  try {
    ground_instances({TemplateKind::Fluent, "F", {"nosuch"}}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSort);
  }
}

TEST(Term, OrderingAndHashAreConsistent) {
  Term a = parse_term("F(A, 1)");
  Term b = parse_term("F(A, 1)");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a <=> b, std::strong_ordering::equal);
  EXPECT_NE(parse_term("F(A, 1)"), parse_term("F(A, 2)"));
  EXPECT_TRUE(a.is_ground());
  EXPECT_FALSE(parse_term("F(?x)").is_ground());
}

}  // namespace
}  // namespace ecr
