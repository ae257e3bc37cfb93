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

#include "ecr/error.hpp"
#include "ecr/hybrid.hpp"
#include "ecr/parser.hpp"
#include "oracles.hpp"

namespace ecr {
namespace {

const std::string kData = ECR_DATA_DIR;

DomainDescription home() {
  ParseResult r = parse_domain_path(kData + "/home");
  EXPECT_TRUE(r.ok()) << r.error_text();
  return *r.domain;
}

HybridSession home_session(double threshold = 0.5) {
  HybridConfig cfg;
  cfg.threshold = threshold;
  return HybridSession(home(), load_repository(kData + "/networks"), ExplanationCatalog::load(kData + "/home/explanations.txt"),
                       cfg);
}

std::vector<GroundFact> round_trace(const HybridSession& s, int rounds = 1) {
  return ingest_trace(kData + "/traces/round.jsonl", rounds, 15000, &s.pool().domain());
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

TEST(Hybrid, TraceIngestion) {
  HybridSession s = home_session();
  auto facts = round_trace(s);
  ASSERT_EQ(facts.size(), 6u);
  EXPECT_EQ(facts[0].term, parse_term("DoorOpens(Ned, HallBedroom, 0)"));
  EXPECT_EQ(facts[0].time, kNextTick);
  EXPECT_EQ(facts[2].term, parse_term("TriggerAlert(NoActivity, 340)"));
  auto two = round_trace(s, 2);
  ASSERT_EQ(two.size(), 12u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(two[i + 6].term.args().back().value(), two[i].term.args().back().value() + 15000);
    EXPECT_EQ(two[i + 6].term.name(), two[i].term.name());
  }
  EXPECT_TRUE(parse_trace("").empty());
  EXPECT_EQ(code_of([] { parse_trace("{\"event\": 3}"); }), ErrorCode::FormatError);
  EXPECT_EQ(code_of([] { parse_trace("not json"); }), ErrorCode::FormatError);
}

TEST(Hybrid, PossActivitiesAfterBathroom) {
  HybridSession s = home_session();
  auto facts = round_trace(s);
  for (const GroundFact& f : facts) s.run_cycle({f});
  std::vector<PossActivity> at12 = collect_poss_activities(s.pool(), 12, &s.catalog());
  std::vector<PossActivity> want{{"Ned", "BrushTeeth", "BT3:Morning", 3},
                                 {"Ned", "TakeShower", "TS2:Morning", 2},
                                 {"Ned", "TakeShower", "TS8:NoShowerYet", 2}};
  EXPECT_EQ(at12, want);
  EXPECT_EQ(want[1].fluent(), parse_term("PossActivity(Ned, TakeShower, TS2:Morning, 2)"));
}

TEST(Hybrid, ThreeTicksPerCycle) {
  HybridSession s = home_session();
  Time start = s.pool().clock();
  for (const GroundFact& f : round_trace(s)) {
    Time before = s.pool().clock();
    CycleReport r = s.run_cycle({f});
    EXPECT_EQ(s.pool().clock(), before + 3);
    EXPECT_EQ(r.start, before);
    EXPECT_EQ(r.end, before + 3);
    EXPECT_EQ(r.ticks.size(), 3u);
  }
  EXPECT_EQ(s.pool().clock(), start + 18);
  EXPECT_EQ(s.history().size(), 6u);
}

TEST(Hybrid, EmptyCycle) {
  HybridSession s = home_session();
  CycleReport r = s.run_cycle({});
  EXPECT_EQ(r.end, r.start + 3);
  EXPECT_TRUE(r.poss.empty());
  EXPECT_TRUE(r.confidence.empty());
  EXPECT_TRUE(r.actions.empty());
}

TEST(Hybrid, RecognizesTakeShower) {
  HybridSession s = home_session();
  auto facts = round_trace(s);
  s.run_cycle({facts[0]});
  CycleReport r = s.run_cycle({facts[1]});
  EXPECT_EQ(r.poss.size(), 3u);
  ASSERT_TRUE(r.confidence.count("TakeShower"));
  const Ebn& net = s.repertoire().at("TakeShower").recognition;
  double oracle_value = oracle::full_joint_posterior(net, "tsh", {{"gob", true}, {"tb", false}});
  EXPECT_NEAR(r.confidence.at("TakeShower"), oracle_value, 1e-9);
  EXPECT_GE(r.confidence.at("TakeShower"), 0.5);
  EXPECT_LT(r.confidence.at("BrushTeeth"), 0.5);
  ASSERT_EQ(r.recognized.size(), 1u);
  EXPECT_EQ(r.recognized[0].activity, "TakeShower");
  EXPECT_EQ(r.recognized[0].user, "Ned");
  EXPECT_TRUE(s.pool().query_holds(parse_term("Recognized(Ned, TakeShower)"), s.pool().clock()).value);
  auto it = std::find_if(r.actions.begin(), r.actions.end(), [](const DoAction& a) { return a.kind == DoActionKind::DeviceCommand; });
  ASSERT_NE(it, r.actions.end());
  EXPECT_EQ(it->payload, "WaterHeaterOn");
  EXPECT_EQ(it->cause.activity, "TakeShower");
}

TEST(Hybrid, HighThresholdRecognizesNothing) {
  HybridSession s = home_session(0.95);
  for (const GroundFact& f : round_trace(s)) s.run_cycle({f});
  EXPECT_TRUE(s.recognized().empty());
  for (const CycleReport& r : s.history()) EXPECT_TRUE(r.actions.empty());
}

TEST(Hybrid, InactivityAlert) {
  HybridSession s = home_session();
  std::vector<DoAction> fired;
  s.set_actuator([&](const DoAction& a) { fired.push_back(a); });
  auto facts = round_trace(s);
  s.run_cycle({facts[0]});
  s.run_cycle({facts[1]});
  CycleReport r = s.run_cycle({facts[2]});
  auto it = std::find_if(r.actions.begin(), r.actions.end(), [](const DoAction& a) { return a.kind == DoActionKind::Alert; });
  ASSERT_NE(it, r.actions.end());
  EXPECT_EQ(it->payload, "CheckOnUser");
  EXPECT_EQ(it->fluent, parse_term("DoAction(Alert, Ned, TakeShower, CheckOnUser)"));
  EXPECT_TRUE(std::find(fired.begin(), fired.end(), *it) != fired.end());
}

TEST(Hybrid, NoRulesetsNoPossActivities) {
  ParseResult r = parse_domain_path(kData + "/circuit.ec");
  ModelPool pool(*r.domain);
  pool.run_narrative(3);
  EXPECT_TRUE(collect_poss_activities(pool, 3).empty());
}

TEST(Hybrid, WeightOutOfRange) {
  ParseResult r = parse_domain(
      "sort: user(Ned).\nsort: activity(A).\nsort: explanation(X).\nfluent: PossActivity(user, activity, explanation, integer).\n"
      "event: E(user).\nInitiates(E(?u), PossActivity(?u, A, X, 6), ?t).");
  ASSERT_TRUE(r.ok()) << r.error_text();
  EXPECT_EQ(code_of([&] { check_poss_activity_weights(*r.domain); }), ErrorCode::ValidationError);
  EXPECT_NO_THROW(check_poss_activity_weights(home()));
}

TEST(Hybrid, ScoreGating) {
  HybridSession s = home_session();
  PoolSensorView view(s.pool());
  HybridConfig cfg;
  ScoreResult none = score({}, view, s.repertoire(), cfg);
  EXPECT_TRUE(none.confidence.empty());
  EXPECT_TRUE(none.evaluated.empty());
  ScoreResult one = score({{"Ned", "TakeShower", "TS2:Morning", 2}}, view, s.repertoire(), cfg);
  EXPECT_EQ(one.evaluated, (std::vector<std::string>{"TakeShower"}));
  cfg.gating[2] = Gate::Skip;
  EXPECT_TRUE(score({{"Ned", "TakeShower", "TS2:Morning", 2}}, view, s.repertoire(), cfg).evaluated.empty());
  EXPECT_EQ(code_of([&] { score({{"Ned", "Cook", "X", 1}}, view, s.repertoire(), HybridConfig{}); }),
            ErrorCode::MissingNetwork);
}

TEST(Hybrid, ScoreMatchesOracleOnLiveView) {
  HybridSession s = home_session();
  auto facts = round_trace(s);
  s.run_cycle({facts[0]});
  s.run_cycle({facts[1]});
  PoolSensorView view(s.pool());
  const ActivityNetwork& an = s.repertoire().at("TakeShower");
  Substitution ned{{"user", Term::constant("Ned")}};
  ObservationVector obs = build_observation_vector(an, view, ned);
  ScoreResult r = score({{"Ned", "TakeShower", "TS2:Morning", 2}}, view, s.repertoire(), HybridConfig{});
  EXPECT_NEAR(r.confidence.at("TakeShower"), oracle::full_joint_posterior(an.recognition, "tsh", obs), 1e-9);
}

TEST(Hybrid, ExplanationCatalog) {
  ExplanationCatalog c = ExplanationCatalog::parse("# comment\nTS2:Morning = in the morning\n\nX = y = z\n");
  EXPECT_EQ(c.text("TS2:Morning"), "in the morning");
  EXPECT_EQ(c.text("X"), "y = z");
  EXPECT_EQ(code_of([&] { c.text("nope"); }), ErrorCode::UnknownExplanation);
}

TEST(Hybrid, ConfigCheck) {
  HybridConfig c;
  c.threshold = 0;
  EXPECT_THROW(c.check(), Error);
  c.threshold = 1.2;
  EXPECT_THROW(c.check(), Error);
  c.threshold = 0.5;
  EXPECT_NO_THROW(c.check());
  c.gating[4] = Gate::Skip;
  EXPECT_FALSE(c.evaluates(4));
  EXPECT_TRUE(c.evaluates(3));
}

TEST(Hybrid, CycleRejectsPastFacts) {
  HybridSession s = home_session();
  s.run_cycle({});
  EXPECT_THROW(s.run_cycle({GroundFact::happens(parse_term("DoorOpens(Ned, HallBedroom, 0)"), 1)}), Error);
}

}  // namespace
}  // namespace ecr
