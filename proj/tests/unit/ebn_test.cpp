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

#include <cmath>
#include <functional>
#include <random>
#include <set>

#include "ecr/ebn.hpp"
#include "ecr/error.hpp"
#include "ecr/parser.hpp"
#include "oracles.hpp"

namespace ecr {
namespace {

ActivityNetwork take_shower() { return load_ebn_file(std::string(ECR_DATA_DIR) + "/networks/TakeShower.xml"); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

// Scripted sensor readings.
class FakeView : public SensorView {
 public:
  double now_s = 1000;
  std::map<Term, bool> fluents;
  std::map<Term, double> held_for;
  std::vector<std::pair<Term, double>> events;
  std::set<std::string> event_functors;

  double now() const override { return now_s; }
  bool is_event(const std::string& functor) const override { return event_functors.count(functor) != 0; }
  std::optional<bool> fluent_now(const Term& f) const override {
    auto it = fluents.find(f);
    if (it == fluents.end()) return std::nullopt;
    return it->second;
  }
  std::vector<double> occurrences(const Term& pattern) const override {
    std::vector<double> out;
    for (const auto& [e, w] : events) {
      if (unify(pattern, e)) out.push_back(w);
    }
    return out;
  }
  std::optional<double> true_for(const Term& f) const override {
    auto it = held_for.find(f);
    if (it == held_for.end()) return std::nullopt;
    return it->second;
  }
  bool true_within(const Term& f, double) const override { return fluent_now(f).value_or(false); }
};

TEST(Ebn, LoadsTakeShower) {
  ActivityNetwork an = take_shower();
  EXPECT_EQ(an.activity, "TakeShower");
  const Ebn& r = an.recognition;
  EXPECT_EQ(r.target, "tsh");
  const EbnNode* g1 = r.find("g1");
  ASSERT_NE(g1, nullptr);
  EXPECT_EQ(g1->cls, NodeClass::Grouping);
  EXPECT_EQ(g1->parents, (std::vector<std::string>{"gob", "gt", "tb"}));
  // Bit 0 is gob: gob true, gt false, tb false.
  EXPECT_DOUBLE_EQ(g1->cpt.at(0b001), 0.6);
  ASSERT_EQ(an.monitoring.size(), 1u);
  EXPECT_EQ(an.monitoring[0].entry, "inb");
  EXPECT_LT(r.index_of("gob"), r.index_of("g1"));
  EXPECT_LT(r.index_of("g1"), r.index_of("tsh"));
}

TEST(Ebn, SingleRoot) {
  ActivityNetwork an = load_ebn(
      R"(<network activity="Solo" kind="recognition" target="p"><node label="p" class="Activity"><cpt><row pattern="" p="0.7"/></cpt></node></network>)");
  ASSERT_EQ(an.recognition.nodes.size(), 1u);
  EXPECT_DOUBLE_EQ(joint(an.recognition, {{"p", true}}), 0.7);
  EXPECT_NEAR(joint(an.recognition, {{"p", false}}), 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(infer(an.recognition, "p", {}), 0.7);
}

TEST(Ebn, MissingRowIsIncomplete) {
  const char* xml = R"(<network activity="A" kind="recognition" target="t">
    <node label="a" class="StateFluent"><cpt><row pattern="" p="0.5"/></cpt></node>
    <node label="t" class="Activity"><parents>a</parents><cpt><row pattern="a" p="0.5"/></cpt></node></network>)";
  EXPECT_EQ(code_of([&] { load_ebn(xml); }), ErrorCode::IncompleteCPT);
}

TEST(Ebn, RejectsCyclesAndBadProbabilities) {
  const char* cyc = R"(<network activity="A" kind="recognition" target="t">
    <node label="a" class="StateFluent"><parents>t</parents><cpt><row pattern="t" p="0.5"/><row pattern="!t" p="0.5"/></cpt></node>
    <node label="t" class="Activity"><parents>a</parents><cpt><row pattern="a" p="0.5"/><row pattern="!a" p="0.5"/></cpt></node></network>)";
  EXPECT_EQ(code_of([&] { load_ebn(cyc); }), ErrorCode::CycleError);
  const char* bad = R"(<network activity="A" kind="recognition" target="t">
    <node label="t" class="Activity"><cpt><row pattern="" p="1.5"/></cpt></node></network>)";
  EXPECT_EQ(code_of([&] { load_ebn(bad); }), ErrorCode::SchemaError);
}

TEST(Ebn, FiveFactorProduct) {
  const Ebn& r = take_shower().recognition;
  Assignment a{{"tsh", true}, {"gob", true}, {"gt", true}, {"tb", false}, {"g1", true}};
  double hand = 0.9 * 0.8 * 0.7 * 0.5 * (1 - 0.4);
  EXPECT_NEAR(joint(r, a), hand, 1e-15);
  EXPECT_EQ(code_of([&] { joint(r, {{"tsh", true}}); }), ErrorCode::InvalidArgument);
}

TEST(Ebn, LocalMarkov) {
  const Ebn& r = take_shower().recognition;
  EXPECT_NEAR(infer(r, "tsh", {{"g1", true}}), 0.9, 1e-12);
  EXPECT_NEAR(infer(r, "tsh", {{"g1", false}, {"gob", true}}), 0.2, 1e-12);
}

TEST(Ebn, TakeShowerMatchesOracle) {
  const Ebn& r = take_shower().recognition;
  std::vector<ObservationVector> cases{{},
                                       {{"gob", true}, {"tb", false}},
                                       {{"gob", true}, {"gt", false}, {"tb", false}},
                                       {{"gt", true}},
                                       {{"gob", false}, {"gt", true}, {"tb", true}}};
  for (const auto& obs : cases) {
    EXPECT_NEAR(infer(r, "tsh", obs), oracle::full_joint_posterior(r, "tsh", obs), 1e-12);
  }
}

TEST(Ebn, DenominatorTerms) {
  const Ebn& r = take_shower().recognition;
  ObservationVector obs{{"gob", true}, {"tb", false}};
  auto terms = enumerate_joint_terms(r, "tsh", obs);
  ASSERT_EQ(terms.size(), 8u);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const JointTerm& t = terms[i];
    EXPECT_EQ(t.assignment.at("tsh"), i < 4);
    EXPECT_TRUE(t.assignment.at("gob"));
    EXPECT_FALSE(t.assignment.at("tb"));
    ASSERT_EQ(t.factors.size(), 5u);
    double product = 1;
    for (const JointFactor& f : t.factors) product *= f.probability;
    EXPECT_NEAR(product, t.value, 1e-15);
    den += t.value;
    if (i < 4) num += t.value;
  }
  EXPECT_NEAR(num / den, infer(r, "tsh", obs), 1e-12);
}

TEST(Ebn, InferErrors) {
  const Ebn& r = take_shower().recognition;
  EXPECT_EQ(code_of([&] { infer(r, "nope", {}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { infer(r, "tsh", {{"tsh", true}}); }), ErrorCode::InvalidArgument);
  ActivityNetwork z = load_ebn(R"(<network activity="Z" kind="recognition" target="t">
    <node label="a" class="StateFluent"><cpt><row pattern="" p="0"/></cpt></node>
    <node label="t" class="Activity"><parents>a</parents><cpt><row pattern="a" p="0.5"/><row pattern="!a" p="0.5"/></cpt></node></network>)");
  EXPECT_EQ(code_of([&] { infer(z.recognition, "t", {{"a", true}}); }), ErrorCode::ZeroEvidence);
}

TEST(Ebn, RandomNetworksMatchOracle) {
  std::mt19937 rng(4242);
  int checked = 0;
  for (int iter = 0; iter < 100; ++iter) {
    int n = std::uniform_int_distribution<int>(1, 10)(rng);
    Ebn net = oracle::random_network(rng, n, 3);
    finalize_ebn(net);
    ObservationVector obs;
    for (const EbnNode& node : net.nodes) {
      if (node.label != net.target && rng() % 3 == 0) obs[node.label] = rng() % 2;
    }
    double want = oracle::full_joint_posterior(net, net.target, obs);
    if (want < 0) {
      EXPECT_EQ(code_of([&] { infer(net, net.target, obs); }), ErrorCode::ZeroEvidence);
      continue;
    }
    EXPECT_NEAR(infer(net, net.target, obs), want, 1e-9);
    ++checked;
  }
  EXPECT_GT(checked, 80);
}

NodeConstraint C(ConstraintOp op, const char* subject, long long x = 0) { return {op, subject, x}; }

TEST(Ebn, CountConstraint) {
  FakeView v;
  v.event_functors = {"E"};
  for (double w : {900.0, 950.0, 990.0}) v.events.push_back({parse_term("E"), w});
  EbnNode n;
  n.constraints = {C(ConstraintOp::MoreThanXTimes, "E", 2)};
  EXPECT_EQ(evaluate_constraints(n, v), ConstraintStatus::Satisfied);
  n.constraints = {C(ConstraintOp::MoreThanXTimes, "E", 3)};
  EXPECT_EQ(evaluate_constraints(n, v), ConstraintStatus::Violated);
  n.constraints = {C(ConstraintOp::LessThanXTimes, "E", 4)};
  EXPECT_EQ(evaluate_constraints(n, v), ConstraintStatus::Satisfied);
  n.constraints = {C(ConstraintOp::MoreThanXTimes, "E", 1), C(ConstraintOp::InTheLastXSec, "E", 60)};
  EXPECT_EQ(evaluate_constraints(n, v), ConstraintStatus::Satisfied);
  n.constraints = {C(ConstraintOp::MoreThanXTimes, "E", 1), C(ConstraintOp::InTheLastXSec, "E", 20)};
  EXPECT_EQ(evaluate_constraints(n, v), ConstraintStatus::Violated);
}

TEST(Ebn, DurationConstraint) {
  FakeView v;
  Term f = parse_term("InRoom(Ned, Bathroom)");
  v.fluents[f] = true;
  v.held_for[f] = 30;
  EbnNode n;
  n.constraints = {C(ConstraintOp::ForAtLeastXSec, "InRoom(Ned, Bathroom)", 60)};
  EXPECT_EQ(evaluate_constraints(n, v), ConstraintStatus::Violated);
  v.held_for[f] = 90;
  EXPECT_EQ(evaluate_constraints(n, v), ConstraintStatus::Satisfied);
}

TEST(Ebn, WindowedDoorConstraint) {
  FakeView v;
  v.event_functors = {"DoorOpens"};
  v.events.push_back({parse_term("DoorOpens(Ned, HallBedroom, 900000)"), 900});
  EbnNode n;
  n.constraints = {C(ConstraintOp::InTheLastXSec, "DoorOpens(?user, HallBedroom, ?ms)", 600),
                   C(ConstraintOp::MoreThanXTimes, "DoorOpens(?user, HallBedroom, ?ms)", 0)};
  EXPECT_EQ(evaluate_constraints(n, v, Substitution{{"user", Term::constant("Ned")}}), ConstraintStatus::Satisfied);
  v.now_s = 2000;
  EXPECT_EQ(evaluate_constraints(n, v, Substitution{{"user", Term::constant("Ned")}}), ConstraintStatus::Violated);
}

TEST(Ebn, FluentConstraints) {
  FakeView v;
  v.fluents[parse_term("A")] = false;
  EbnNode n;
  n.constraints = {C(ConstraintOp::FluentNotHolds, "A")};
  EXPECT_EQ(evaluate_constraints(n, v), ConstraintStatus::Satisfied);
  n.constraints = {C(ConstraintOp::FluentHolds, "A")};
  EXPECT_EQ(evaluate_constraints(n, v), ConstraintStatus::Violated);
  n.constraints = {C(ConstraintOp::FluentHolds, "B")};
  EXPECT_EQ(evaluate_constraints(n, v), ConstraintStatus::NoData);
}

TEST(Ebn, ObservationRouting) {
  ActivityNetwork an = take_shower();
  FakeView v;
  v.event_functors = {"DoorOpens"};
  v.events.push_back({parse_term("DoorOpens(Ned, HallBedroom, 900000)"), 900});
  v.fluents[parse_term("TookBreakfast(Ned)")] = false;
  Substitution ned{{"user", Term::constant("Ned")}};
  ObservationVector obs = build_observation_vector(an.recognition, v, ned);
  EXPECT_EQ(obs, (ObservationVector{{"gob", true}, {"tb", false}}));

  FakeView empty;
  empty.event_functors = {"DoorOpens"};
  // A window with no occurrences is a violation; the fluent was never observed.
  EXPECT_EQ(build_observation_vector(an.recognition, empty, ned), (ObservationVector{{"gob", false}}));
  EXPECT_NEAR(infer(an.recognition, "tsh", {}), oracle::full_joint_posterior(an.recognition, "tsh", {}), 1e-12);
}

TEST(Ebn, ExampleEvidence) {
  ActivityNetwork an = take_shower();
  ObservationVector obs{{"gob", true}, {"tb", false}};
  double p = infer(an.recognition, "tsh", obs);
  EXPECT_NEAR(p, oracle::full_joint_posterior(an.recognition, "tsh", obs), 1e-12);
  EXPECT_GT(p, 0.5);
}

ActivityNetwork two_action_phase() {
  return load_ebn(R"(<activity name="M">
    <network kind="recognition" target="t"><node label="t" class="Activity"><cpt><row pattern="" p="0.5"/></cpt></node></network>
    <network kind="monitoring" entry="e" exit="a2">
      <node label="e" class="StateFluent"><cpt><row pattern="" p="0.5"/></cpt></node>
      <node label="a1" class="Action"><parents>e</parents><cpt><row pattern="e" p="0.7"/><row pattern="!e" p="0.1"/></cpt></node>
      <node label="a2" class="Action"><parents>e,a1</parents><cpt>
        <row pattern="e,a1" p="0.8"/><row pattern="e,!a1" p="0.3"/><row pattern="!e,a1" p="0.2"/><row pattern="!e,!a1" p="0.1"/></cpt></node>
    </network></activity>)");
}

TEST(Ebn, MonitorRemainingActions) {
  ActivityNetwork an = two_action_phase();
  auto m = monitor(an, 0, {{"e", true}, {"a1", true}});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_NEAR(m.at("a2"), oracle::full_joint_posterior(an.monitoring[0], "a2", {{"e", true}, {"a1", true}}), 1e-12);
  EXPECT_NEAR(m.at("a2"), 0.8, 1e-12);
  auto all = monitor(an, 0, {{"e", true}});
  EXPECT_EQ(all.size(), 2u);
  EXPECT_TRUE(monitor(an, 0, {{"e", true}, {"a1", true}, {"a2", false}}).empty());
}

TEST(Ebn, MonitorRequiresEntry) {
  ActivityNetwork an = two_action_phase();
  EXPECT_EQ(code_of([&] { monitor(an, 0, {}); }), ErrorCode::PhaseNotEntered);
  EXPECT_EQ(code_of([&] { monitor(an, 0, {{"e", false}}); }), ErrorCode::PhaseNotEntered);
  EXPECT_EQ(code_of([&] { monitor(an, 3, {{"e", true}}); }), ErrorCode::InvalidArgument);
}

TEST(Ebn, Repository) {
  auto repo = load_repository(std::string(ECR_DATA_DIR) + "/networks");
  EXPECT_EQ(repo.size(), 2u);
  EXPECT_TRUE(repo.count("TakeShower"));
  EXPECT_TRUE(repo.count("BrushTeeth"));
}

}  // namespace
}  // namespace ecr
