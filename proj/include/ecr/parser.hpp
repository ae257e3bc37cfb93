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

#ifndef ECR_PARSER_HPP
#define ECR_PARSER_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecr/domain.hpp"
#include "ecr/error.hpp"

namespace ecr {

// Grammar of the .ec surface syntax:
//
//   domain     := stmt*
//   stmt       := sortDecl | fluentDecl | eventDecl | axiom | fact
//   sortDecl   := "sort:" ID "(" ID ("," ID)* ")" "."
//   fluentDecl := "fluent:" ID ["(" [ID ("," ID)*] ")"] "."
//   eventDecl  := "event:" ID ["(" [ID ("," ID)*] ")"] "."
//   axiom      := [body "=>"] head "."
//   body       := cond ("^" cond)*
//   cond       := ["~"] atom | "{" term CMP term "}"
//   atom       := ("HoldsAt" | "Happens" | "ReleasedAt") "(" term "," timeExpr ")"
//   head       := ("Initiates" | "Terminates" | "Releases") "(" term "," term "," timeVar ")"
//               | "Happens" "(" term "," timeVar ")" | ["~"] "HoldsAt" "(" term "," timeVar ")"
//   timeExpr   := timeVar | timeVar "-" INT | ["-"] INT
//
// Variables are "?"ID, constants start with an uppercase letter and may
// contain ':' (TS2:Morning), comments run from "//" to end of line. A
// body-less HoldsAt/Happens/ReleasedAt statement over a ground term with an
// integer time is a fact; "~HoldsAt(...)" facts are negative observations.
struct ParseResult {
  std::optional<DomainDescription> domain;
  std::vector<Diagnostic> diagnostics;
  bool uses_past_time = false;
  // Set when the source failed to parse, before validation ran.
  bool syntax_error = false;

  bool ok() const noexcept { return domain.has_value(); }
  ErrorCode error_code() const noexcept { return syntax_error ? ErrorCode::ParseError : ErrorCode::ValidationError; }
  std::string error_text() const;
};

ParseResult parse_domain(std::string_view source);

// Parses every *.ec file of a directory in lexicographic order, or a single file.
ParseResult parse_domain_path(const std::filesystem::path& path);
// Files and directories in the given order, as one domain.
ParseResult parse_domain_paths(const std::vector<std::filesystem::path>& paths);

std::string pretty_print(const DomainDescription& domain);

// Parses one runtime statement such as "Happens(Close(S1), -1)". The sentinel
// time -1 resolves to clock + 1; any other resolved time <= clock is rejected
// with RejectPast. Pass clock = -1 before the first tick. The optional domain
// checks the term against declared templates.
GroundFact parse_statement(std::string_view line, Time clock, const DomainDescription* domain = nullptr);

// Parses a single term (e.g. "DoorOpens(?user, HallBathroom, ?ms)").
Term parse_term(std::string_view text);

}  // namespace ecr

#endif  // ECR_PARSER_HPP
