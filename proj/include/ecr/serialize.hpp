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

#ifndef ECR_SERIALIZE_HPP
#define ECR_SERIALIZE_HPP

#include <nlohmann/json.hpp>

#include "ecr/error.hpp"
#include "ecr/hybrid.hpp"
#include "ecr/pool.hpp"

namespace ecr {

using Json = nlohmann::ordered_json;

Json to_json(const Term& t);
Json to_json(const std::vector<Term>& terms);
Json to_json(const FluentSet& set);
Json to_json(const GroundFact& f);
Json to_json(const Tombstone& t);
Json to_json(const TickReport& r);
Json to_json(const EpistemicState& es);
Json to_json(const PossActivity& p);
Json to_json(const RecognizedActivity& r);
Json to_json(const DoAction& d);
Json to_json(const CycleReport& r);
Json error_json(const Error& e);

// Statistics row of a tick: fact count, rule firings, models alive, elapsed time.
Json stats_json(const TickReport& r);

// Live models and tombstones with parent links.
Json model_tree_json(const ModelPool& pool);

// Per-tick holds/released sets of one model over [from, to].
Json fluent_timeline_json(const Model& m, Time from, Time to);

}  // namespace ecr

#endif  // ECR_SERIALIZE_HPP
