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

#ifndef ECR_HYBRID_HPP
#define ECR_HYBRID_HPP

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecr/ebn.hpp"
#include "ecr/pool.hpp"

namespace ecr {

struct PossActivity {
  std::string user;
  std::string activity;
  std::string explanation;
  int weight = 0;

  Term fluent() const;
  friend auto operator<=>(const PossActivity&, const PossActivity&) = default;
};

struct RecognizedActivity {
  std::string user;
  std::string activity;
  double confidence = 0;
  Time at = 0;

  friend bool operator==(const RecognizedActivity&, const RecognizedActivity&) = default;
};

enum class DoActionKind { Notify, Alert, DeviceCommand };
std::string_view to_string(DoActionKind k);

struct DoAction {
  DoActionKind kind = DoActionKind::Notify;
  std::string payload;
  RecognizedActivity cause;
  // The DoAction(kind, user, activity, message) fluent it was read from.
  Term fluent;
  Time at = 0;

  friend bool operator==(const DoAction&, const DoAction&) = default;
};

class ExplanationCatalog {
 public:
  ExplanationCatalog() = default;
  explicit ExplanationCatalog(std::map<std::string, std::string> entries) : entries_(std::move(entries)) {}

  // "id = text" per line; '#' starts a comment line.
  static ExplanationCatalog load(const std::filesystem::path& path);
  static ExplanationCatalog parse(std::string_view text);

  bool contains(const std::string& id) const { return entries_.count(id) != 0; }
  // Throws UnknownExplanation.
  const std::string& text(const std::string& id) const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

enum class Gate { Evaluate, Skip };

struct HybridConfig {
  double threshold = 0.5;
  // Weights missing from the map are evaluated.
  std::map<int, Gate> gating;

  bool evaluates(int weight) const;
  // Throws InvalidArgument unless 0 < threshold < 1.
  void check() const;
};

using Repertoire = std::map<std::string, ActivityNetwork>;

// Rejects PossActivity facts or axiom heads whose weight is not an integer in 1..5.
void check_poss_activity_weights(const DomainDescription& domain);

// PossActivity fluents that hold at t in every model.
std::vector<PossActivity> collect_poss_activities(const ModelPool& pool, Time t,
                                                  const ExplanationCatalog* catalog = nullptr);

// Sensor view over the whole pool: a fluent has a value only if all models agree.
class PoolSensorView : public SensorView {
 public:
  explicit PoolSensorView(const ModelPool& pool);

  double now() const override;
  bool is_event(const std::string& functor) const override;
  std::optional<bool> fluent_now(const Term& fluent) const override;
  std::vector<double> occurrences(const Term& pattern) const override;
  std::optional<double> true_for(const Term& fluent) const override;
  bool true_within(const Term& fluent, double seconds) const override;

 private:
  const ModelPool& pool_;
  std::vector<MemorySensorView> views_;
};

struct ScoreResult {
  // Highest confidence per activity over the users that named it.
  std::map<std::string, double> confidence;
  // Per (user, activity).
  std::map<std::pair<std::string, std::string>, double> by_user;
  std::vector<std::string> evaluated;
};

// Networks are bound with ?user set to the hypothesis' user. Throws MissingNetwork.
ScoreResult score(const std::vector<PossActivity>& poss, const SensorView& view, const Repertoire& repertoire,
                  const HybridConfig& config);

struct CycleReport {
  Time start = 0;
  Time end = 0;
  std::vector<GroundFact> events;
  std::vector<PossActivity> poss;
  std::map<std::string, double> confidence;
  std::vector<RecognizedActivity> recognized;
  std::vector<DoAction> actions;
  std::vector<TickReport> ticks;
};

// Reads a JSON-lines trace ({"event", "args", "payloadMs"} per line) into
// Happens facts at the next-tick sentinel, repeated for `rounds` rounds with
// payloads shifted by round * offset_ms. Throws FormatError.
std::vector<GroundFact> ingest_trace(const std::filesystem::path& path, int rounds = 1, long long offset_ms = 15000,
                                     const DomainDescription* domain = nullptr);
std::vector<GroundFact> parse_trace(std::string_view text, int rounds = 1, long long offset_ms = 15000,
                                    const DomainDescription* domain = nullptr);

// The three-step cycle: filter into PossActivity, score, recognize and act.
class HybridSession {
 public:
  HybridSession(DomainDescription domain, Repertoire repertoire, ExplanationCatalog catalog, HybridConfig config,
                PoolOptions options = {});

  ModelPool& pool() noexcept { return pool_; }
  const ModelPool& pool() const noexcept { return pool_; }
  const Repertoire& repertoire() const noexcept { return repertoire_; }
  const ExplanationCatalog& catalog() const noexcept { return catalog_; }
  const HybridConfig& config() const noexcept { return config_; }
  const std::vector<CycleReport>& history() const noexcept { return history_; }
  const std::vector<RecognizedActivity>& recognized() const noexcept { return recognized_; }

  void set_actuator(std::function<void(const DoAction&)> actuator) { actuator_ = std::move(actuator); }

  // Events and observations must be for the next tick (time -1 or clock + 1).
  CycleReport run_cycle(const std::vector<GroundFact>& external);

 private:
  std::vector<DoAction> harvest(Time t) const;

  ModelPool pool_;
  Repertoire repertoire_;
  ExplanationCatalog catalog_;
  HybridConfig config_;
  std::vector<CycleReport> history_;
  std::vector<RecognizedActivity> recognized_;
  std::function<void(const DoAction&)> actuator_;
};

}  // namespace ecr

#endif  // ECR_HYBRID_HPP
