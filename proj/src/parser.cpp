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

#include "ecr/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ecr/error.hpp"

namespace ecr {

namespace {

enum class Tok {
  Ident, Var, Int, KwSort, KwFluent, KwEvent,
  LParen, RParen, Comma, Dot, Caret, Tilde, LBrace, RBrace, Arrow, Cmp, Minus, End, Bad,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long long value = 0;
  CmpOp op = CmpOp::Eq;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        lex_ident(t);
      } else if (c == '?') {
        advance();
        t.kind = Tok::Var;
        t.text = read_word(false);
        if (t.text.empty()) t.kind = Tok::Bad;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.kind = Tok::Int;
        std::string digits;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) digits += advance();
        t.text = digits;
        t.value = std::stoll(digits);
      } else {
        lex_punct(t);
      }
      out.push_back(t);
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  char peek(std::size_t off = 0) const { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  static bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string read_word(bool allow_colon) {
    std::string w;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (word_char(c)) {
        w += advance();
      } else if (allow_colon && c == ':' && word_char(peek(1))) {
        w += advance();
      } else {
        break;
      }
    }
    return w;
  }

  void lex_ident(Token& t) {
    std::string w = read_word(false);
    if (peek() == ':' && (w == "sort" || w == "fluent" || w == "event")) {
      advance();
      t.kind = w == "sort" ? Tok::KwSort : w == "fluent" ? Tok::KwFluent : Tok::KwEvent;
      t.text = w + ":";
      return;
    }
    while (peek() == ':' && word_char(peek(1))) {
      w += advance();
      w += read_word(false);
    }
    t.kind = Tok::Ident;
    t.text = w;
  }

  void lex_punct(Token& t) {
    char c = advance();
    t.text = std::string(1, c);
    switch (c) {
      case '(': t.kind = Tok::LParen; return;
      case ')': t.kind = Tok::RParen; return;
      case ',': t.kind = Tok::Comma; return;
      case '.': t.kind = Tok::Dot; return;
      case '^': t.kind = Tok::Caret; return;
      case '~':
      case '!': t.kind = Tok::Tilde; return;
      case '{': t.kind = Tok::LBrace; return;
      case '}': t.kind = Tok::RBrace; return;
      case '-': t.kind = Tok::Minus; return;
      case '=':
        if (peek() == '>') {
          advance();
          t.kind = Tok::Arrow;
          t.text = "=>";
        } else {
          t.kind = Tok::Cmp;
          t.op = CmpOp::Eq;
        }
        return;
      case '<':
        t.kind = Tok::Cmp;
        if (peek() == '>') {
          advance();
          t.op = CmpOp::Ne;
          t.text = "<>";
        } else if (peek() == '=') {
          advance();
          t.op = CmpOp::Le;
          t.text = "<=";
        } else {
          t.op = CmpOp::Lt;
        }
        return;
      case '>':
        t.kind = Tok::Cmp;
        if (peek() == '=') {
          advance();
          t.op = CmpOp::Ge;
          t.text = ">=";
        } else {
          t.op = CmpOp::Gt;
        }
        return;
      default: t.kind = Tok::Bad; return;
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

struct SyntaxError {
  std::string message;
  int line;
  int column;
};

// One parsed condition or head before classification.
struct Cond {
  Literal lit;
  int line = 0;
  int column = 0;
};

class Parser {
 public:
  Parser(std::string_view src, std::string file, DomainDescription& out, std::vector<Diagnostic>& diags)
      : toks_(Lexer(src).run()), file_(std::move(file)), out_(out), diags_(diags) {}

  void parse_all() {
    while (cur().kind != Tok::End) {
      std::size_t start = pos_;
      try {
        statement();
      } catch (const SyntaxError& e) {
        report(e.message, e.line, e.column);
        // Resynchronize at the next statement terminator.
        if (pos_ == start) ++pos_;
        while (cur().kind != Tok::End && toks_[pos_ - 1].kind != Tok::Dot) {
          if (cur().kind == Tok::Dot) {
            ++pos_;
            break;
          }
          ++pos_;
        }
      }
    }
  }

  // Single-statement mode used for runtime injection; trailing '.' optional.
  Cond single_condition() {
    Cond c = condition();
    if (cur().kind == Tok::Dot) ++pos_;
    if (cur().kind != Tok::End) fail("unexpected '" + cur().text + "' after statement");
    return c;
  }

  Term single_term() {
    Term t = atom_term();
    if (cur().kind != Tok::End) fail("unexpected '" + cur().text + "' after term");
    return t;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError{msg, cur().line, cur().column}; }

  void report(const std::string& msg, int line, int column) {
    Diagnostic d;
    d.severity = Diagnostic::Severity::Error;
    d.message = file_.empty() ? msg : file_ + ": " + msg;
    d.span = {line, column, line, column};
    diags_.push_back(std::move(d));
  }

  const Token& expect(Tok kind, const char* what) {
    if (cur().kind != kind) fail(std::string("expected ") + what + ", got '" + cur().text + "'");
    return toks_[pos_++];
  }

  bool accept(Tok kind) {
    if (cur().kind != kind) return false;
    ++pos_;
    return true;
  }

  void statement() {
    switch (cur().kind) {
      case Tok::KwSort: sort_decl(); return;
      case Tok::KwFluent:
      case Tok::KwEvent: template_decl(); return;
      default: break;
    }
    const Token& first = cur();
    std::vector<Cond> conds;
    conds.push_back(condition());
    while (accept(Tok::Caret)) conds.push_back(condition());
    SourceSpan span{first.line, first.column, 0, 0};
    if (accept(Tok::Arrow)) {
      Cond head = condition();
      span.end_line = cur().line;
      span.end_column = cur().column;
      expect(Tok::Dot, "'.'");
      std::vector<Literal> body;
      for (Cond& c : conds) body.push_back(std::move(c.lit));
      add_axiom(std::move(body), std::move(head.lit), span, head.line, head.column);
      return;
    }
    span.end_line = cur().line;
    span.end_column = cur().column;
    expect(Tok::Dot, "'.' or '=>'");
    if (conds.size() != 1) throw SyntaxError{"a conjunction needs '=>' and a head", first.line, first.column};
    Literal lit = std::move(conds.front().lit);
    if (auto fact = as_fact(lit, first.line, first.column)) {
      out_.add_fact(std::move(*fact));
      return;
    }
    add_axiom({}, std::move(lit), span, first.line, first.column);
  }

  std::optional<GroundFact> as_fact(const Literal& lit, int line, int column) {
    if (lit.is_comparison() || lit.is_effect()) return std::nullopt;
    if (lit.time.kind != TimeExpr::Kind::Absolute) return std::nullopt;
    if (!lit.subject.is_ground()) throw SyntaxError{"facts must be ground: " + lit.to_string(), line, column};
    switch (lit.kind) {
      case AtomKind::Happens:
        if (!lit.positive) throw SyntaxError{"negated event occurrences are not facts", line, column};
        return GroundFact::happens(lit.subject, lit.time.value);
      case AtomKind::HoldsAt: return GroundFact::holds(lit.subject, lit.positive, lit.time.value);
      case AtomKind::ReleasedAt:
        if (!lit.positive) throw SyntaxError{"negated ReleasedAt is not a fact", line, column};
        return GroundFact::released(lit.subject, lit.time.value);
      default: return std::nullopt;
    }
  }

  void add_axiom(std::vector<Literal> body, Literal head, SourceSpan span, int line, int column) {
    Axiom ax;
    ax.body = std::move(body);
    ax.span = span;
    switch (head.kind) {
      case AtomKind::Initiates: ax.cls = AxiomClass::PositiveEffect; break;
      case AtomKind::Terminates: ax.cls = AxiomClass::NegativeEffect; break;
      case AtomKind::Releases: ax.cls = AxiomClass::Release; break;
      case AtomKind::HoldsAt: ax.cls = AxiomClass::StateConstraint; break;
      case AtomKind::Happens: ax.cls = AxiomClass::Trigger; break;
      default: throw SyntaxError{"invalid axiom head: " + head.to_string(), line, column};
    }
    if (head.is_effect() && !head.positive) throw SyntaxError{"effect heads cannot be negated", line, column};
    if (head.kind == AtomKind::Happens && !head.positive) {
      throw SyntaxError{"trigger heads cannot be negated", line, column};
    }
    ax.head = std::move(head);
    switch (ax.cls) {
      case AxiomClass::StateConstraint: out_.psi.push_back(std::move(ax)); break;
      case AxiomClass::Trigger: out_.delta2.push_back(std::move(ax)); break;
      default: out_.sigma.push_back(std::move(ax)); break;
    }
  }

  void sort_decl() {
    ++pos_;
    SortDecl s;
    s.name = expect(Tok::Ident, "sort name").text;
    expect(Tok::LParen, "'('");
    do {
      s.constants.push_back(constant_name());
    } while (accept(Tok::Comma));
    expect(Tok::RParen, "')'");
    expect(Tok::Dot, "'.'");
    out_.sorts.push_back(std::move(s));
  }

  std::string constant_name() {
    const Token& t = expect(Tok::Ident, "constant");
    if (!std::isupper(static_cast<unsigned char>(t.text.front()))) {
      throw SyntaxError{"constants must start with an uppercase letter: '" + t.text + "'", t.line, t.column};
    }
    return t.text;
  }

  void template_decl() {
    TemplateDecl d;
    d.kind = cur().kind == Tok::KwFluent ? TemplateKind::Fluent : TemplateKind::Event;
    ++pos_;
    d.name = expect(Tok::Ident, "template name").text;
    if (accept(Tok::LParen)) {
      if (!accept(Tok::RParen)) {
        do {
          d.arg_sorts.push_back(expect(Tok::Ident, "sort name").text);
        } while (accept(Tok::Comma));
        expect(Tok::RParen, "')'");
      }
    }
    expect(Tok::Dot, "'.'");
    out_.templates.push_back(std::move(d));
  }

  Cond condition() {
    Cond c;
    c.line = cur().line;
    c.column = cur().column;
    if (accept(Tok::LBrace)) {
      Term lhs = arg_term();
      if (cur().kind != Tok::Cmp) fail("expected a comparison operator, got '" + cur().text + "'");
      CmpOp op = toks_[pos_++].op;
      Term rhs = arg_term();
      expect(Tok::RBrace, "'}'");
      c.lit = Literal::comparison(op, std::move(lhs), std::move(rhs));
      return c;
    }
    bool positive = !accept(Tok::Tilde);
    const Token& name = expect(Tok::Ident, "HoldsAt, Happens, ReleasedAt, Initiates, Terminates or Releases");
    expect(Tok::LParen, "'('");
    if (name.text == "HoldsAt" || name.text == "Happens" || name.text == "ReleasedAt") {
      Term subject = atom_term();
      expect(Tok::Comma, "','");
      TimeExpr t = time_expr();
      expect(Tok::RParen, "')'");
      if (name.text == "HoldsAt") c.lit = Literal::holds_at(std::move(subject), std::move(t), positive);
      else if (name.text == "Happens") c.lit = Literal::happens(std::move(subject), std::move(t), positive);
      else c.lit = Literal::released_at(std::move(subject), std::move(t), positive);
      return c;
    }
    AtomKind kind;
    if (name.text == "Initiates") kind = AtomKind::Initiates;
    else if (name.text == "Terminates") kind = AtomKind::Terminates;
    else if (name.text == "Releases") kind = AtomKind::Releases;
    else throw SyntaxError{"unknown predicate '" + name.text + "'", name.line, name.column};
    Term event = atom_term();
    expect(Tok::Comma, "','");
    Term fluent = atom_term();
    expect(Tok::Comma, "','");
    TimeExpr t = time_expr();
    expect(Tok::RParen, "')'");
    c.lit = Literal::effect(kind, std::move(event), std::move(fluent), std::move(t));
    c.lit.positive = positive;
    return c;
  }

  TimeExpr time_expr() {
    if (cur().kind == Tok::Var) {
      std::string v = toks_[pos_++].text;
      if (accept(Tok::Minus)) {
        const Token& k = expect(Tok::Int, "time offset");
        return TimeExpr::offset(std::move(v), k.value);
      }
      return TimeExpr::variable(std::move(v));
    }
    bool neg = accept(Tok::Minus);
    const Token& k = expect(Tok::Int, "timepoint");
    return TimeExpr::absolute(neg ? -k.value : k.value);
  }

  // Fluent or event application; bare identifiers are 0-ary applications.
  Term atom_term() {
    const Token& name = expect(Tok::Ident, "fluent or event");
    std::vector<Term> args;
    if (accept(Tok::LParen)) {
      if (!accept(Tok::RParen)) {
        do {
          args.push_back(arg_term());
        } while (accept(Tok::Comma));
        expect(Tok::RParen, "')'");
      }
    }
    return Term::compound(name.text, std::move(args));
  }

  Term arg_term() {
    switch (cur().kind) {
      case Tok::Var: return Term::variable(toks_[pos_++].text);
      case Tok::Int: return Term::integer(toks_[pos_++].value);
      case Tok::Minus: {
        ++pos_;
        return Term::integer(-expect(Tok::Int, "integer").value);
      }
      case Tok::Ident: {
        std::string name = constant_name();
        if (cur().kind == Tok::LParen) fail("nested compound terms are not supported");
        return Term::constant(std::move(name));
      }
      default: fail("expected a variable, constant or integer, got '" + cur().text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string file_;
  DomainDescription& out_;
  std::vector<Diagnostic>& diags_;
};

bool has_error(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::Error; });
}

ParseResult finish(DomainDescription domain, std::vector<Diagnostic> diags) {
  ParseResult r;
  std::stable_partition(domain.templates.begin(), domain.templates.end(),
                        [](const TemplateDecl& t) { return t.kind == TemplateKind::Fluent; });
  r.syntax_error = has_error(diags);
  if (!r.syntax_error) {
    auto more = validate(domain);
    diags.insert(diags.end(), more.begin(), more.end());
  }
  r.diagnostics = std::move(diags);
  if (!has_error(r.diagnostics)) {
    r.uses_past_time = uses_past_time(domain);
    r.domain = std::move(domain);
  }
  return r;
}

std::string join_args(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += v[i];
  }
  return out;
}

}  // namespace

std::string ParseResult::error_text() const {
  std::string out;
  for (const Diagnostic& d : diagnostics) out += d.to_string() + "\n";
  return out;
}

ParseResult parse_domain(std::string_view source) {
  DomainDescription domain;
  std::vector<Diagnostic> diags;
  Parser(source, {}, domain, diags).parse_all();
  return finish(std::move(domain), std::move(diags));
}

ParseResult parse_domain_paths(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::filesystem::path> files;
  std::vector<Diagnostic> diags;
  for (const auto& path : paths) {
    if (std::filesystem::is_directory(path)) {
      std::vector<std::filesystem::path> found;
      for (const auto& e : std::filesystem::directory_iterator(path)) {
        if (e.is_regular_file() && e.path().extension() == ".ec") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) diags.push_back({Diagnostic::Severity::Error, "no .ec files under " + path.string(), {}});
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(path);
    }
  }
  DomainDescription domain;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) {
      diags.push_back({Diagnostic::Severity::Error, "cannot read " + f.string(), {}});
      continue;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    Parser(text, f.filename().string(), domain, diags).parse_all();
  }
  if (paths.empty()) diags.push_back({Diagnostic::Severity::Error, "no domain files given", {}});
  return finish(std::move(domain), std::move(diags));
}

ParseResult parse_domain_path(const std::filesystem::path& path) {
  return parse_domain_paths(std::vector<std::filesystem::path>{path});
}

std::string pretty_print(const DomainDescription& domain) {
  std::string out;
  for (const SortDecl& s : domain.sorts) out += "sort: " + s.name + "(" + join_args(s.constants) + ").\n";
  for (TemplateKind kind : {TemplateKind::Fluent, TemplateKind::Event}) {
    for (const TemplateDecl& t : domain.templates) {
      if (t.kind != kind) continue;
      out += (kind == TemplateKind::Fluent ? "fluent: " : "event: ") + t.name;
      if (!t.arg_sorts.empty()) out += "(" + join_args(t.arg_sorts) + ")";
      out += ".\n";
    }
  }
  for (const auto* set : {&domain.sigma, &domain.psi, &domain.delta2}) {
    for (const Axiom& ax : *set) out += ax.to_string() + ".\n";
  }
  std::map<Time, std::vector<const GroundFact*>> facts;
  for (const auto* set : {&domain.gamma, &domain.delta1}) {
    for (const auto& [t, v] : *set) {
      for (const GroundFact& f : v) facts[t].push_back(&f);
    }
  }
  for (const auto& [t, v] : facts) {
    for (const GroundFact* f : v) out += f->to_string() + ".\n";
  }
  return out;
}

GroundFact parse_statement(std::string_view line, Time clock, const DomainDescription* domain) {
  DomainDescription scratch;
  std::vector<Diagnostic> diags;
  Parser p(line, {}, scratch, diags);
  Cond c;
  try {
    c = p.single_condition();
  } catch (const SyntaxError& e) {
    throw Error(ErrorCode::ParseError, std::to_string(e.line) + ":" + std::to_string(e.column) + ": " + e.message);
  }
  const Literal& lit = c.lit;
  if (lit.is_comparison() || lit.is_effect() || lit.time.kind != TimeExpr::Kind::Absolute) {
    throw Error(ErrorCode::ParseError, "expected a ground Happens/HoldsAt/ReleasedAt statement with a timepoint");
  }
  if (!lit.subject.is_ground()) throw Error(ErrorCode::ParseError, "statement must be ground: " + lit.to_string());
  Time t = lit.time.value;
  if (t == kNextTick) {
    t = clock + 1;
  } else if (t < 0) {
    throw Error(ErrorCode::ParseError, "invalid timepoint " + std::to_string(t));
  } else if (t <= clock) {
    throw Error(ErrorCode::RejectPast, "time " + std::to_string(t) + " is not after the current clock " + std::to_string(clock));
  }
  GroundFact fact;
  switch (lit.kind) {
    case AtomKind::Happens:
      if (!lit.positive) throw Error(ErrorCode::ParseError, "negated event occurrences cannot be asserted");
      fact = GroundFact::happens(lit.subject, t);
      break;
    case AtomKind::HoldsAt: fact = GroundFact::holds(lit.subject, lit.positive, t); break;
    case AtomKind::ReleasedAt:
      if (!lit.positive) throw Error(ErrorCode::ParseError, "negated ReleasedAt cannot be asserted");
      fact = GroundFact::released(lit.subject, t);
      break;
    default: throw Error(ErrorCode::ParseError, "unsupported statement");
  }
  if (domain) {
    auto kind = fact.kind == GroundFact::Kind::Happens ? TemplateKind::Event : TemplateKind::Fluent;
    if (auto err = check_ground_term(*domain, fact.term, kind)) throw Error(ErrorCode::ValidationError, *err);
  }
  return fact;
}

Term parse_term(std::string_view text) {
  DomainDescription scratch;
  std::vector<Diagnostic> diags;
  Parser p(text, {}, scratch, diags);
  try {
    return p.single_term();
  } catch (const SyntaxError& e) {
    throw Error(ErrorCode::ParseError, e.message);
  }
}

}  // namespace ecr
