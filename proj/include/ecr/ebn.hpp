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

#ifndef ECR_EBN_HPP
#define ECR_EBN_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecr/domain.hpp"
#include "ecr/engine.hpp"

namespace ecr {

enum class NodeClass { StateFluent, Activity, Action, Grouping };
std::string_view to_string(NodeClass c);

enum class ConstraintOp { MoreThanXTimes, LessThanXTimes, InTheLastXSec, ForAtLeastXSec, FluentHolds, FluentNotHolds };
std::string_view to_string(ConstraintOp op);

struct NodeConstraint {
  ConstraintOp op = ConstraintOp::FluentHolds;
  // Term pattern over the reasoner's vocabulary; may mention ?user.
  std::string subject;
  long long x = 0;
};

struct EbnNode {
  std::string label;
  NodeClass cls = NodeClass::StateFluent;
  std::vector<std::string> parents;
  // Pr(node | parents), indexed by a bitmask with bit i set when parents[i] is true.
  std::vector<double> cpt;
  std::vector<NodeConstraint> constraints;
  // Reasoner fluent or event this node observes; empty for latent nodes.
  std::string sentence;
};

enum class EbnKind { Recognition, Monitoring };

struct Ebn {
  EbnKind kind = EbnKind::Recognition;
  std::string activity;
  std::string target;
  std::string entry;
  std::vector<std::string> exits;
  // Topologically ordered.
  std::vector<EbnNode> nodes;

  const EbnNode* find(std::string_view label) const;
  int index_of(std::string_view label) const;
};

struct ActivityNetwork {
  std::string activity;
  Ebn recognition;
  std::vector<Ebn> monitoring;
};

using Assignment = std::map<std::string, bool>;
using ObservationVector = Assignment;

// Checks labels, CPT completeness and acyclicity; reorders nodes topologically.
void finalize_ebn(Ebn& ebn);

// Loads either a <network> document or an <activity> document wrapping
// one recognition network and any number of monitoring networks.
ActivityNetwork load_ebn(std::string_view xml);
ActivityNetwork load_ebn_file(const std::filesystem::path& path);
// Every *.xml file of a directory; networks with the same activity are merged.
std::map<std::string, ActivityNetwork> load_repository(const std::filesystem::path& dir);

double joint(const Ebn& ebn, const Assignment& full);

// Exact Pr(target | obs) by enumeration over the unobserved nodes.
// Throws ZeroEvidence when the observations have probability zero.
double infer(const Ebn& ebn, const std::string& target, const ObservationVector& obs);

struct JointFactor {
  std::string label;
  bool value = true;
  double probability = 0;
};

struct JointTerm {
  Assignment assignment;
  std::vector<JointFactor> factors;
  double value = 0;
};

// The denominator terms of the enumeration, target-true terms first.
std::vector<JointTerm> enumerate_joint_terms(const Ebn& ebn, const std::string& target, const ObservationVector& obs);

enum class ConstraintStatus { Satisfied, Violated, NoData };
std::string_view to_string(ConstraintStatus s);

// What the probabilistic layer may ask the reasoner. Times are wall-clock seconds.
class SensorView {
 public:
  virtual ~SensorView() = default;

  virtual double now() const = 0;
  virtual bool is_event(const std::string& functor) const = 0;
  // nullopt when the fluent was never observed or derived.
  virtual std::optional<bool> fluent_now(const Term& fluent) const = 0;
  // Wall times of the events matching the pattern.
  virtual std::vector<double> occurrences(const Term& pattern) const = 0;
  // Length of the fluent's current uninterrupted true interval (nullopt if not true).
  virtual std::optional<double> true_for(const Term& fluent) const = 0;
  // Whether the fluent was true at some point in [now - seconds, now].
  virtual bool true_within(const Term& fluent, double seconds) const = 0;
};

// View over one working memory. Wall time comes from the integer last
// argument of events (milliseconds).
class MemorySensorView : public SensorView {
 public:
  MemorySensorView(const WorkingMemory& wm, const DomainDescription& domain) : wm_(wm), domain_(domain) {}

  double now() const override;
  bool is_event(const std::string& functor) const override;
  std::optional<bool> fluent_now(const Term& fluent) const override;
  std::vector<double> occurrences(const Term& pattern) const override;
  std::optional<double> true_for(const Term& fluent) const override;
  bool true_within(const Term& fluent, double seconds) const override;

  double wall_at(Time t) const;

 private:
  const WorkingMemory& wm_;
  const DomainDescription& domain_;
};

// Builds the subject term of a constraint or sentence with ?user bound.
Term bind_sentence(const std::string& pattern, const Substitution& bindings);

ConstraintStatus evaluate_constraints(const EbnNode& node, const SensorView& view, const Substitution& bindings = {});

ObservationVector build_observation_vector(const Ebn& ebn, const SensorView& view, const Substitution& bindings = {});
ObservationVector build_observation_vector(const ActivityNetwork& an, const SensorView& view,
                                           const Substitution& bindings = {});

// Probabilities of the phase's actions not yet observed. Throws
// PhaseNotEntered unless the entry node is observed true.
std::map<std::string, double> monitor(const ActivityNetwork& an, std::size_t phase, const ObservationVector& obs);

}  // namespace ecr

#endif  // ECR_EBN_HPP
