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

#include "ecr/ebn.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "ecr/error.hpp"
#include "ecr/parser.hpp"

namespace ecr {

namespace pt = boost::property_tree;

std::string_view to_string(NodeClass c) {
  switch (c) {
    case NodeClass::StateFluent: return "StateFluent";
    case NodeClass::Activity: return "Activity";
    case NodeClass::Action: return "Action";
    case NodeClass::Grouping: return "Grouping";
  }
  return "?";
}

std::string_view to_string(ConstraintOp op) {
  switch (op) {
    case ConstraintOp::MoreThanXTimes: return "moreThanXTimes";
    case ConstraintOp::LessThanXTimes: return "lessThanXTimes";
    case ConstraintOp::InTheLastXSec: return "inTheLastXSec";
    case ConstraintOp::ForAtLeastXSec: return "forAtLeastXSec";
    case ConstraintOp::FluentHolds: return "FluentHolds";
    case ConstraintOp::FluentNotHolds: return "FluentNotHolds";
  }
  return "?";
}

std::string_view to_string(ConstraintStatus s) {
  switch (s) {
    case ConstraintStatus::Satisfied: return "satisfied";
    case ConstraintStatus::Violated: return "violated";
    case ConstraintStatus::NoData: return "no-data";
  }
  return "?";
}

const EbnNode* Ebn::find(std::string_view label) const {
  int i = index_of(label);
  return i < 0 ? nullptr : &nodes[static_cast<std::size_t>(i)];
}

int Ebn::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorCode::SchemaError, msg); }

}  // namespace

void finalize_ebn(Ebn& ebn) {
  std::set<std::string> labels;
  for (const EbnNode& n : ebn.nodes) {
    if (n.label.empty()) schema("node without a label");
    if (!labels.insert(n.label).second) schema("duplicate node label '" + n.label + "'");
  }
  for (const EbnNode& n : ebn.nodes) {
    std::set<std::string> seen;
    for (const std::string& p : n.parents) {
      if (!labels.count(p)) schema("node '" + n.label + "' has unknown parent '" + p + "'");
      if (p == n.label) throw Error(ErrorCode::CycleError, "node '" + n.label + "' is its own parent");
      if (!seen.insert(p).second) schema("node '" + n.label + "' lists parent '" + p + "' twice");
    }
    if (n.parents.size() > 20) schema("node '" + n.label + "' has too many parents");
    if (n.cpt.size() != (std::size_t{1} << n.parents.size())) {
      throw Error(ErrorCode::IncompleteCPT, "node '" + n.label + "' needs " +
                                                std::to_string(std::size_t{1} << n.parents.size()) + " CPT rows");
    }
    for (double p : n.cpt) {
      if (std::isnan(p)) throw Error(ErrorCode::IncompleteCPT, "node '" + n.label + "' is missing a CPT row");
      if (p < 0 || p > 1) schema("node '" + n.label + "' has a probability outside [0, 1]");
    }
    for (const NodeConstraint& c : n.constraints) {
      if (c.x < 0) schema("constraint on '" + n.label + "' has a negative parameter");
    }
  }
  // Kahn's algorithm; stable with respect to the declared order.
  std::vector<EbnNode> sorted;
  std::vector<char> placed(ebn.nodes.size(), 0);
  std::set<std::string> done;
  while (sorted.size() < ebn.nodes.size()) {
    bool progress = false;
    for (std::size_t i = 0; i < ebn.nodes.size(); ++i) {
      if (placed[i]) continue;
      const EbnNode& n = ebn.nodes[i];
      if (std::all_of(n.parents.begin(), n.parents.end(), [&](const std::string& p) { return done.count(p) != 0; })) {
        placed[i] = 1;
        done.insert(n.label);
        sorted.push_back(n);
        progress = true;
      }
    }
    if (!progress) throw Error(ErrorCode::CycleError, "network for '" + ebn.activity + "' contains a cycle");
  }
  ebn.nodes = std::move(sorted);

  if (ebn.kind == EbnKind::Recognition) {
    const EbnNode* target = ebn.find(ebn.target);
    if (!target) schema("recognition network needs a target node");
    if (target->cls != NodeClass::Activity) schema("target '" + ebn.target + "' must be an Activity node");
    for (const EbnNode& g : ebn.nodes) {
      if (g.cls != NodeClass::Grouping) continue;
      for (const EbnNode& c : ebn.nodes) {
        bool child = std::find(c.parents.begin(), c.parents.end(), g.label) != c.parents.end();
        if (child && c.label != ebn.target) schema("grouping node '" + g.label + "' may only feed the target");
      }
    }
  } else {
    if (!ebn.find(ebn.entry)) schema("monitoring network needs an entry node");
    for (const std::string& e : ebn.exits) {
      if (!ebn.find(e)) schema("unknown exit node '" + e + "'");
    }
  }
}

namespace {

NodeClass parse_class(const std::string& s) {
  std::string l = lower(s);
  if (l == "statefluent" || l == "fluent" || l == "state") return NodeClass::StateFluent;
  if (l == "activity") return NodeClass::Activity;
  if (l == "action" || l == "event") return NodeClass::Action;
  if (l == "grouping" || l == "group") return NodeClass::Grouping;
  schema("unknown node class '" + s + "'");
}

ConstraintOp parse_op(const std::string& s) {
  std::string l = lower(s);
  if (l == "morethanxtimes") return ConstraintOp::MoreThanXTimes;
  if (l == "lessthanxtimes") return ConstraintOp::LessThanXTimes;
  if (l == "inthelastxsec") return ConstraintOp::InTheLastXSec;
  if (l == "foratleastxsec") return ConstraintOp::ForAtLeastXSec;
  if (l == "fluentholds") return ConstraintOp::FluentHolds;
  if (l == "fluentnotholds") return ConstraintOp::FluentNotHolds;
  schema("unknown constraint operator '" + s + "'");
}

double parse_probability(const std::string& s, const std::string& label) {
  try {
    std::size_t used = 0;
    double p = std::stod(s, &used);
    if (used != trim(s).size() && used != s.size()) schema("bad probability '" + s + "' on '" + label + "'");
    return p;
  } catch (const std::invalid_argument&) {
    schema("bad probability '" + s + "' on '" + label + "'");
  } catch (const std::out_of_range&) {
    schema("bad probability '" + s + "' on '" + label + "'");
  }
}

EbnNode parse_node(const pt::ptree& tree) {
  EbnNode n;
  n.label = trim(tree.get<std::string>("<xmlattr>.label", ""));
  if (n.label.empty()) schema("node without a label");
  auto cls = tree.get_optional<std::string>("<xmlattr>.class");
  if (!cls) schema("node '" + n.label + "' has no class");
  n.cls = parse_class(*cls);
  n.sentence = trim(tree.get<std::string>("<xmlattr>.sentence", ""));
  if (auto p = tree.get_child_optional("parents")) n.parents = split_list(p->data());
  n.cpt.assign(std::size_t{1} << std::min<std::size_t>(n.parents.size(), 20), std::numeric_limits<double>::quiet_NaN());
  if (auto cpt = tree.get_child_optional("cpt")) {
    for (const auto& [tag, row] : *cpt) {
      if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
      if (tag != "row") schema("unexpected <" + tag + "> in the CPT of '" + n.label + "'");
      auto pattern = row.get_optional<std::string>("<xmlattr>.pattern");
      auto p = row.get_optional<std::string>("<xmlattr>.p");
      if (!pattern || !p) schema("CPT row of '" + n.label + "' needs pattern and p");
      std::size_t mask = 0;
      std::set<std::string> seen;
      for (std::string item : split_list(*pattern)) {
        bool value = true;
        if (item[0] == '!' || item[0] == '~') {
          value = false;
          item = trim(item.substr(1));
        }
        auto it = std::find(n.parents.begin(), n.parents.end(), item);
        if (it == n.parents.end()) schema("CPT row of '" + n.label + "' mentions '" + item + "' which is not a parent");
        if (!seen.insert(item).second) schema("CPT row of '" + n.label + "' mentions '" + item + "' twice");
        if (value) mask |= std::size_t{1} << static_cast<std::size_t>(it - n.parents.begin());
      }
      if (seen.size() != n.parents.size()) schema("CPT row '" + *pattern + "' of '" + n.label + "' must assign every parent");
      if (!std::isnan(n.cpt[mask])) schema("duplicate CPT row '" + *pattern + "' on '" + n.label + "'");
      n.cpt[mask] = parse_probability(*p, n.label);
    }
  }
  for (const auto& [tag, c] : tree) {
    if (tag != "constraint") continue;
    NodeConstraint nc;
    auto op = c.get_optional<std::string>("<xmlattr>.op");
    if (!op) schema("constraint on '" + n.label + "' has no op");
    nc.op = parse_op(*op);
    nc.subject = trim(c.get<std::string>("<xmlattr>.subject", n.sentence));
    if (nc.subject.empty()) schema("constraint on '" + n.label + "' has no subject");
    try {
      nc.x = std::stoll(c.get<std::string>("<xmlattr>.x", "0"));
    } catch (const std::exception&) {
      schema("constraint on '" + n.label + "' has a non-integer parameter");
    }
    n.constraints.push_back(std::move(nc));
  }
  return n;
}

Ebn parse_network(const pt::ptree& tree, const std::string& activity_default) {
  Ebn e;
  e.activity = trim(tree.get<std::string>("<xmlattr>.activity", activity_default));
  if (e.activity.empty()) schema("network without an activity");
  std::string kind = lower(tree.get<std::string>("<xmlattr>.kind", "recognition"));
  if (kind == "recognition") e.kind = EbnKind::Recognition;
  else if (kind == "monitoring") e.kind = EbnKind::Monitoring;
  else schema("unknown network kind '" + kind + "'");
  e.target = trim(tree.get<std::string>("<xmlattr>.target", ""));
  e.entry = trim(tree.get<std::string>("<xmlattr>.entry", ""));
  e.exits = split_list(tree.get<std::string>("<xmlattr>.exit", tree.get<std::string>("<xmlattr>.exits", "")));
  for (const auto& [tag, child] : tree) {
    if (tag == "node") e.nodes.push_back(parse_node(child));
    else if (tag != "<xmlattr>" && tag != "<xmlcomment>") schema("unexpected <" + tag + "> in a network");
  }
  if (e.kind == EbnKind::Recognition && e.target.empty()) {
    for (const EbnNode& n : e.nodes) {
      if (n.cls == NodeClass::Activity && n.label == e.activity) e.target = n.label;
    }
  }
  finalize_ebn(e);
  return e;
}

void add_network(ActivityNetwork& an, Ebn e, bool& has_recognition) {
  if (e.kind == EbnKind::Recognition) {
    if (has_recognition) schema("activity '" + an.activity + "' has more than one recognition network");
    has_recognition = true;
    an.recognition = std::move(e);
  } else {
    an.monitoring.push_back(std::move(e));
  }
}

}  // namespace

ActivityNetwork load_ebn(std::string_view xml) {
  pt::ptree doc;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    schema(std::string("malformed XML: ") + e.what());
  }
  ActivityNetwork an;
  bool has_recognition = false;
  if (auto net = doc.get_child_optional("network")) {
    Ebn e = parse_network(*net, "");
    an.activity = e.activity;
    add_network(an, std::move(e), has_recognition);
  } else if (auto act = doc.get_child_optional("activity")) {
    an.activity = trim(act->get<std::string>("<xmlattr>.name", ""));
    if (an.activity.empty()) schema("<activity> needs a name");
    for (const auto& [tag, child] : *act) {
      if (tag == "network") add_network(an, parse_network(child, an.activity), has_recognition);
      else if (tag != "<xmlattr>" && tag != "<xmlcomment>") schema("unexpected <" + tag + "> in an activity");
    }
  } else {
    schema("document root must be <network> or <activity>");
  }
  return an;
}

ActivityNetwork load_ebn_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::SchemaError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_ebn(ss.str());
}

std::map<std::string, ActivityNetwork> load_repository(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::SchemaError, dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".xml") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, ActivityNetwork> repo;
  std::map<std::string, bool> recognized;
  for (const auto& f : files) {
    ActivityNetwork an = load_ebn_file(f);
    auto& slot = repo[an.activity];
    slot.activity = an.activity;
    bool& has = recognized[an.activity];
    if (!an.recognition.nodes.empty()) add_network(slot, std::move(an.recognition), has);
    for (Ebn& m : an.monitoring) slot.monitoring.push_back(std::move(m));
  }
  for (const auto& [name, has] : recognized) {
    if (!has) schema("activity '" + name + "' has no recognition network");
  }
  return repo;
}

namespace {

// Pr(node = value | parent values) with values indexed like ebn.nodes.
struct Compiled {
  std::vector<std::vector<int>> parents;
  const Ebn* ebn;

  explicit Compiled(const Ebn& e) : ebn(&e) {
    for (const EbnNode& n : e.nodes) {
      std::vector<int> idx;
      for (const std::string& p : n.parents) idx.push_back(e.index_of(p));
      parents.push_back(std::move(idx));
    }
  }

  double factor(std::size_t i, const std::vector<char>& v) const {
    std::size_t mask = 0;
    for (std::size_t k = 0; k < parents[i].size(); ++k) {
      if (v[static_cast<std::size_t>(parents[i][k])]) mask |= std::size_t{1} << k;
    }
    double p = ebn->nodes[i].cpt[mask];
    return v[i] ? p : 1.0 - p;
  }

  double product(const std::vector<char>& v) const {
    double j = 1.0;
    for (std::size_t i = 0; i < v.size() && j != 0.0; ++i) j *= factor(i, v);
    return j;
  }
};

struct Layout {
  std::vector<char> values;
  std::vector<std::size_t> free;
  std::size_t target;
};

Layout layout(const Ebn& ebn, const std::string& target, const ObservationVector& obs) {
  int ti = ebn.index_of(target);
  if (ti < 0) throw Error(ErrorCode::InvalidArgument, "unknown target '" + target + "'");
  Layout l;
  l.target = static_cast<std::size_t>(ti);
  l.values.assign(ebn.nodes.size(), 0);
  std::vector<char> observed(ebn.nodes.size(), 0);
  for (const auto& [label, value] : obs) {
    int i = ebn.index_of(label);
    if (i < 0) throw Error(ErrorCode::InvalidArgument, "observation of unknown node '" + label + "'");
    if (i == ti) throw Error(ErrorCode::InvalidArgument, "the target '" + target + "' cannot be observed");
    observed[static_cast<std::size_t>(i)] = 1;
    l.values[static_cast<std::size_t>(i)] = value ? 1 : 0;
  }
  for (std::size_t i = 0; i < ebn.nodes.size(); ++i) {
    if (!observed[i] && i != l.target) l.free.push_back(i);
  }
  if (l.free.size() > 24) throw Error(ErrorCode::InvalidArgument, "too many unobserved nodes for exact enumeration");
  return l;
}

}  // namespace

double joint(const Ebn& ebn, const Assignment& full) {
  std::vector<char> v(ebn.nodes.size(), 0);
  for (std::size_t i = 0; i < ebn.nodes.size(); ++i) {
    auto it = full.find(ebn.nodes[i].label);
    if (it == full.end()) throw Error(ErrorCode::InvalidArgument, "assignment misses '" + ebn.nodes[i].label + "'");
    v[i] = it->second ? 1 : 0;
  }
  return Compiled(ebn).product(v);
}

double infer(const Ebn& ebn, const std::string& target, const ObservationVector& obs) {
  Layout l = layout(ebn, target, obs);
  Compiled c(ebn);
  double num = 0;
  double den = 0;
  const std::size_t combos = std::size_t{1} << l.free.size();
  for (int tv = 1; tv >= 0; --tv) {
    l.values[l.target] = static_cast<char>(tv);
    for (std::size_t mask = 0; mask < combos; ++mask) {
      for (std::size_t k = 0; k < l.free.size(); ++k) l.values[l.free[k]] = (mask >> k) & 1U;
      double j = c.product(l.values);
      den += j;
      if (tv) num += j;
    }
  }
  if (den <= 0) throw Error(ErrorCode::ZeroEvidence, "the observations have probability zero");
  return std::clamp(num / den, 0.0, 1.0);
}

std::vector<JointTerm> enumerate_joint_terms(const Ebn& ebn, const std::string& target, const ObservationVector& obs) {
  Layout l = layout(ebn, target, obs);
  Compiled c(ebn);
  std::vector<JointTerm> out;
  const std::size_t combos = std::size_t{1} << l.free.size();
  for (int tv = 1; tv >= 0; --tv) {
    l.values[l.target] = static_cast<char>(tv);
    for (std::size_t mask = 0; mask < combos; ++mask) {
      for (std::size_t k = 0; k < l.free.size(); ++k) l.values[l.free[k]] = (mask >> k) & 1U;
      JointTerm term;
      term.value = 1.0;
      for (std::size_t i = 0; i < ebn.nodes.size(); ++i) {
        double f = c.factor(i, l.values);
        term.assignment[ebn.nodes[i].label] = l.values[i] != 0;
        term.factors.push_back({ebn.nodes[i].label, l.values[i] != 0, f});
        term.value *= f;
      }
      out.push_back(std::move(term));
    }
  }
  return out;
}

namespace {

std::optional<long long> last_integer(const Term& e) {
  if (e.arity() == 0 || !e.args().back().is_integer()) return std::nullopt;
  return e.args().back().value();
}

void require_history(const WorkingMemory& wm) {
  if (wm.mode() == KbMode::SemiDestructive) {
    throw Error(ErrorCode::HistoryUnavailable, "interval constraints need fluent history (semi-destructive memory)");
  }
}

}  // namespace

double MemorySensorView::wall_at(Time t) const {
  long long best = 0;
  for (const auto& [when, events] : wm_.narrative()) {
    if (when > t) break;
    for (const Term& e : events) {
      if (auto ms = last_integer(e)) best = std::max(best, *ms);
    }
  }
  return static_cast<double>(best) / 1000.0;
}

double MemorySensorView::now() const { return wall_at(wm_.clock()); }

bool MemorySensorView::is_event(const std::string& functor) const {
  const TemplateDecl* t = domain_.find_template(functor);
  return t && t->kind == TemplateKind::Event;
}

std::optional<bool> MemorySensorView::fluent_now(const Term& fluent) const {
  switch (wm_.current().value(fluent)) {
    case Truth::True: return true;
    case Truth::Released: return std::nullopt;
    case Truth::False: break;
  }
  if (wm_.observed().contains(fluent)) return false;
  return std::nullopt;
}

std::vector<double> MemorySensorView::occurrences(const Term& pattern) const {
  std::vector<double> out;
  for (const auto& [when, events] : wm_.narrative()) {
    if (when > wm_.clock()) break;
    for (const Term& e : events) {
      if (!unify(pattern, e)) continue;
      auto ms = last_integer(e);
      out.push_back(ms ? static_cast<double>(*ms) / 1000.0 : wall_at(when));
    }
  }
  return out;
}

std::optional<double> MemorySensorView::true_for(const Term& fluent) const {
  require_history(wm_);
  if (wm_.current().value(fluent) != Truth::True) return std::nullopt;
  Time start = wm_.clock();
  while (start - 1 >= wm_.floor() && wm_.at(start - 1).value(fluent) == Truth::True) --start;
  return now() - wall_at(start);
}

bool MemorySensorView::true_within(const Term& fluent, double seconds) const {
  require_history(wm_);
  double from = now() - seconds;
  for (Time t = wm_.clock(); t >= wm_.floor(); --t) {
    if (wm_.at(t).value(fluent) == Truth::True) return true;
    if (wall_at(t) < from) break;
  }
  return false;
}

Term bind_sentence(const std::string& pattern, const Substitution& bindings) {
  return apply(bindings, parse_term(pattern));
}

ConstraintStatus evaluate_constraints(const EbnNode& node, const SensorView& view, const Substitution& bindings) {
  std::optional<double> window;
  bool counted = false;
  for (const NodeConstraint& c : node.constraints) {
    if (c.op == ConstraintOp::InTheLastXSec && !window) window = static_cast<double>(c.x);
    if (c.op == ConstraintOp::MoreThanXTimes || c.op == ConstraintOp::LessThanXTimes) counted = true;
  }
  const double now = view.now();
  bool no_data = false;
  auto in_window = [&](double when) { return !window || when >= now - *window; };
  for (const NodeConstraint& c : node.constraints) {
    Term subject = bind_sentence(c.subject, bindings);
    ConstraintStatus s = ConstraintStatus::Satisfied;
    switch (c.op) {
      case ConstraintOp::MoreThanXTimes:
      case ConstraintOp::LessThanXTimes: {
        auto occ = view.occurrences(subject);
        if (occ.empty() && !window) {
          s = ConstraintStatus::NoData;
          break;
        }
        auto n = static_cast<long long>(std::count_if(occ.begin(), occ.end(), in_window));
        bool ok = c.op == ConstraintOp::MoreThanXTimes ? n > c.x : n < c.x;
        s = ok ? ConstraintStatus::Satisfied : ConstraintStatus::Violated;
        break;
      }
      case ConstraintOp::InTheLastXSec: {
        if (counted) break;
        bool hit;
        if (view.is_event(subject.name())) {
          auto occ = view.occurrences(subject);
          hit = std::any_of(occ.begin(), occ.end(), [&](double w) { return w >= now - static_cast<double>(c.x); });
        } else {
          hit = view.true_within(subject, static_cast<double>(c.x));
        }
        s = hit ? ConstraintStatus::Satisfied : ConstraintStatus::Violated;
        break;
      }
      case ConstraintOp::ForAtLeastXSec: {
        if (view.is_event(subject.name())) {
          auto occ = view.occurrences(subject);
          if (occ.empty()) {
            s = ConstraintStatus::NoData;
          } else {
            double last = *std::max_element(occ.begin(), occ.end());
            s = now - last >= static_cast<double>(c.x) ? ConstraintStatus::Satisfied : ConstraintStatus::Violated;
          }
          break;
        }
        auto held = view.true_for(subject);
        if (!held) {
          s = view.fluent_now(subject) ? ConstraintStatus::Violated : ConstraintStatus::NoData;
        } else {
          s = *held >= static_cast<double>(c.x) ? ConstraintStatus::Satisfied : ConstraintStatus::Violated;
        }
        break;
      }
      case ConstraintOp::FluentHolds:
      case ConstraintOp::FluentNotHolds: {
        auto v = view.fluent_now(subject);
        if (!v) {
          s = ConstraintStatus::NoData;
          break;
        }
        bool want = c.op == ConstraintOp::FluentHolds;
        s = *v == want ? ConstraintStatus::Satisfied : ConstraintStatus::Violated;
        break;
      }
    }
    if (s == ConstraintStatus::Violated) return s;
    if (s == ConstraintStatus::NoData) no_data = true;
  }
  return no_data ? ConstraintStatus::NoData : ConstraintStatus::Satisfied;
}

ObservationVector build_observation_vector(const Ebn& ebn, const SensorView& view, const Substitution& bindings) {
  ObservationVector obs;
  for (const EbnNode& n : ebn.nodes) {
    if (n.label == ebn.target || n.cls == NodeClass::Grouping || n.cls == NodeClass::Activity) continue;
    if (n.sentence.empty() && n.constraints.empty()) continue;
    std::optional<bool> sentence = true;
    if (!n.sentence.empty()) {
      Term s = bind_sentence(n.sentence, bindings);
      if (view.is_event(s.name())) {
        sentence = view.occurrences(s).empty() ? std::nullopt : std::optional<bool>(true);
      } else {
        sentence = view.fluent_now(s);
      }
    }
    if (sentence && !*sentence) {
      obs[n.label] = false;
      continue;
    }
    ConstraintStatus cs = n.constraints.empty() ? ConstraintStatus::Satisfied : evaluate_constraints(n, view, bindings);
    if (cs == ConstraintStatus::Violated) {
      obs[n.label] = false;
    } else if (sentence && cs == ConstraintStatus::Satisfied) {
      obs[n.label] = true;
    }
  }
  return obs;
}

ObservationVector build_observation_vector(const ActivityNetwork& an, const SensorView& view, const Substitution& bindings) {
  return build_observation_vector(an.recognition, view, bindings);
}

std::map<std::string, double> monitor(const ActivityNetwork& an, std::size_t phase, const ObservationVector& obs) {
  if (phase >= an.monitoring.size()) {
    throw Error(ErrorCode::InvalidArgument, "activity '" + an.activity + "' has no phase " + std::to_string(phase));
  }
  const Ebn& g = an.monitoring[phase];
  auto entry = obs.find(g.entry);
  if (entry == obs.end() || !entry->second) {
    throw Error(ErrorCode::PhaseNotEntered, "entry '" + g.entry + "' of phase " + std::to_string(phase) + " is not satisfied");
  }
  ObservationVector local;
  for (const auto& [label, value] : obs) {
    if (g.find(label)) local[label] = value;
  }
  std::map<std::string, double> out;
  for (const EbnNode& n : g.nodes) {
    if (n.cls != NodeClass::Action || local.count(n.label)) continue;
    out[n.label] = infer(g, n.label, local);
  }
  return out;
}

}  // namespace ecr
