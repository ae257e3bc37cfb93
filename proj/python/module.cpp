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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ecr/ebn.hpp"
#include "ecr/error.hpp"
#include "ecr/parser.hpp"
#include "ecr/pool.hpp"
#include "ecr/serialize.hpp"
#include "ecr/service.hpp"

namespace py = pybind11;

namespace {

py::object to_python(const ecr::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

ecr::DomainDescription parse_or_throw(const std::string& source) {
  ecr::ParseResult r = ecr::parse_domain(source);
  if (!r.ok()) throw ecr::Error(r.error_code(), r.error_text());
  return std::move(*r.domain);
}

ecr::QueryMode query_mode(const std::string& s) {
  if (s == "skeptical") return ecr::QueryMode::Skeptical;
  if (s == "credulous") return ecr::QueryMode::Credulous;
  throw ecr::Error(ecr::ErrorCode::InvalidArgument, "query mode is skeptical or credulous");
}

}  // namespace

PYBIND11_MODULE(_ecr, m) {
  m.doc() = "Discrete event calculus reasoner bindings";

  static PyObject* error_type = py::exception<ecr::Error>(m, "Error").release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ecr::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(ecr::to_string(e.code()));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<ecr::DomainDescription>(m, "Domain")
      .def_property_readonly("fact_count", &ecr::DomainDescription::fact_count)
      .def_property_readonly("sorts", [](const ecr::DomainDescription& d) {
        std::vector<std::string> out;
        for (const auto& s : d.sorts) out.push_back(s.name);
        return out;
      })
      .def("pretty", [](const ecr::DomainDescription& d) { return ecr::pretty_print(d); })
      .def("__eq__", [](const ecr::DomainDescription& a, const ecr::DomainDescription& b) { return a == b; });

  m.def("parse_domain", &parse_or_throw, py::arg("source"), "Parses and validates .ec source text.");
  m.def("pretty_print", [](const std::string& source) { return ecr::pretty_print(parse_or_throw(source)); },
        py::arg("source"));

  py::class_<ecr::ModelPool>(m, "Pool")
      .def(py::init([](const std::string& source, const std::string& mode, const std::string& kb_mode,
                       std::size_t branch_cap) {
             ecr::PoolOptions o;
             o.mode = ecr::parse_session_mode(mode) == ecr::SessionMode::Epistemic ? ecr::ReasoningMode::Epistemic
                                                                                  : ecr::ReasoningMode::Classical;
             o.kb_mode = ecr::parse_kb_mode(kb_mode);
             o.branch_cap = branch_cap;
             return std::make_unique<ecr::ModelPool>(parse_or_throw(source), o);
           }),
           py::arg("source"), py::arg("mode") = "classical", py::arg("kb_mode") = "non-destructive",
           py::arg("branch_cap") = 1024)
      .def_property_readonly("clock", &ecr::ModelPool::clock)
      .def_property_readonly("model_ids", [](const ecr::ModelPool& p) {
        std::vector<std::string> ids;
        for (const auto& mdl : p.models()) ids.push_back(mdl.id);
        return ids;
      })
      .def("submit", [](ecr::ModelPool& p, const std::string& s) { return p.submit_statement(s).to_string(); },
           py::arg("statement"))
      .def("tick", [](ecr::ModelPool& p) { return to_python(ecr::to_json(p.tick())); })
      .def("run", [](ecr::ModelPool& p, ecr::Time horizon) {
        py::list out;
        for (const auto& r : p.run_narrative(horizon)) out.append(to_python(ecr::to_json(r)));
        return out;
      }, py::arg("horizon"))
      .def("holds", [](const ecr::ModelPool& p, const std::string& f, ecr::Time t, const std::string& mode) {
        return p.query_holds(ecr::parse_term(f), t, query_mode(mode)).value;
      }, py::arg("fluent"), py::arg("time"), py::arg("mode") = "skeptical")
      .def("knows", [](const ecr::ModelPool& p, const std::string& f) {
        return std::string(ecr::to_string(p.knows(ecr::parse_term(f))));
      }, py::arg("fluent"))
      .def("models", [](const ecr::ModelPool& p) { return to_python(ecr::model_tree_json(p)); });

  py::class_<ecr::Ebn>(m, "Network")
      .def_static("from_xml", [](const std::string& xml) { return ecr::load_ebn(xml).recognition; }, py::arg("xml"))
      .def_static("from_file", [](const std::string& path) { return ecr::load_ebn_file(path).recognition; },
                  py::arg("path"))
      .def_readonly("activity", &ecr::Ebn::activity)
      .def_readonly("target", &ecr::Ebn::target)
      .def_property_readonly("labels", [](const ecr::Ebn& e) {
        std::vector<std::string> out;
        for (const auto& n : e.nodes) out.push_back(n.label);
        return out;
      })
      .def("infer", [](const ecr::Ebn& e, const std::map<std::string, bool>& obs, const std::string& target) {
        return ecr::infer(e, target.empty() ? e.target : target, obs);
      }, py::arg("observations"), py::arg("target") = "")
      .def("joint", [](const ecr::Ebn& e, const std::map<std::string, bool>& full) { return ecr::joint(e, full); },
           py::arg("assignment"));

  py::class_<ecr::Service>(m, "Service")
      .def(py::init<>())
      .def("handle", [](ecr::Service& s, const std::string& method, const std::string& path, const std::string& body,
                        const std::map<std::string, std::string>& query) {
        ecr::ApiResponse r;
        {
          py::gil_scoped_release release;
          r = s.handle({method, path, body, query});
        }
        return py::make_tuple(r.status, r.status == 204 ? py::none() : to_python(r.body));
      }, py::arg("method"), py::arg("path"), py::arg("body") = "", py::arg("query") = std::map<std::string, std::string>{});
}
