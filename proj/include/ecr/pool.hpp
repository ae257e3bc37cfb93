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

#ifndef ECR_POOL_HPP
#define ECR_POOL_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecr/domain.hpp"
#include "ecr/engine.hpp"
#include "ecr/epistemic.hpp"

namespace ecr {

enum class ReasoningMode { Classical, Epistemic };
std::string_view to_string(ReasoningMode m);

enum class QueryMode { Skeptical, Credulous, PerModel };

struct Model {
  std::string id;
  std::optional<std::string> parent;
  Time born_at = 0;
  WorkingMemory wm;
  std::optional<EpistemicState> epistemic;
  // Number of children ever spawned; used to derive lineage ids.
  std::size_t spawned = 0;
};

struct Tombstone {
  std::string id;
  std::string reason;
  // The violating observation or constraint, if any.
  std::string detail;
  Time at = 0;
};

struct ModelTiming {
  std::string id;
  double micros = 0;
};

struct TickReport {
  Time time = 0;
  std::vector<std::string> surviving;
  std::vector<std::string> created;
  std::vector<Tombstone> eliminated;
  std::vector<ModelTiming> timing;
  // External events scheduled for `time`, and events fired by triggers there.
  std::vector<Term> events;
  std::vector<Term> triggered;
  std::size_t fact_count = 0;
  std::size_t rule_firings = 0;
  double elapsed_ms = 0;
};

struct PoolOptions {
  KbMode kb_mode = KbMode::NonDestructive;
  ReasoningMode mode = ReasoningMode::Classical;
  std::size_t branch_cap = 1024;
};

struct QueryAnswer {
  bool value = false;
  std::map<std::string, Truth> per_model;
};

// The set of models consistent with the narrative, observations and state
// constraints. Construction commits timepoint 0 from the domain's t=0 facts.
class ModelPool {
 public:
  explicit ModelPool(DomainDescription domain, PoolOptions options = {});

  const DomainDescription& domain() const noexcept { return domain_; }
  const PoolOptions& options() const noexcept { return options_; }
  Time clock() const noexcept { return clock_; }
  const std::vector<Model>& models() const noexcept { return models_; }
  const Model* find_model(std::string_view id) const;
  bool failed() const noexcept { return failed_; }
  const std::vector<Tombstone>& graveyard() const noexcept { return graveyard_; }
  const TickReport& initial_report() const noexcept { return initial_; }

  // Queues a fact for its tick; the sentinel time -1 means clock + 1.
  void submit(GroundFact fact);
  GroundFact submit_statement(std::string_view line);
  std::size_t pending_count() const;

  // Adds an event at the current clock (system feedback) and re-fires triggers.
  void inject_now(const Term& event);

  TickReport tick();
  std::vector<TickReport> run_narrative(Time horizon);

  QueryAnswer query_holds(const Term& fluent, Time t, QueryMode mode = QueryMode::Skeptical) const;
  // Epistemic mode only: knowledge of the fluent at the current clock.
  Knowledge knows(const Term& fluent) const;
  const EpistemicState& epistemic_state() const;

  void flush_before(Time t);

 private:
  struct Outcome;

  void initialize();
  std::vector<Snapshot> branch(Snapshot s, const FluentSet& prefer_true, Time t, std::size_t& budget) const;
  void step_classical(std::vector<Model>& out, Model&& m, Time t, std::size_t& budget, TickReport& report);
  void step_epistemic(std::vector<Model>& out, Model&& m, Time t, TickReport& report);
  void finish_model(Model& m, Time t, TickReport& report);
  void kill(const Model& m, std::string reason, std::string detail, Time t, TickReport& report);

  DomainDescription domain_;
  PoolOptions options_;
  Time clock_ = 0;
  std::vector<Model> models_;
  std::map<Time, std::vector<GroundFact>> pending_events_;
  std::map<Time, std::vector<GroundFact>> pending_obs_;
  std::vector<Tombstone> graveyard_;
  TickReport initial_;
  bool failed_ = false;
};

}  // namespace ecr

#endif  // ECR_POOL_HPP
