#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lagskel/energy.hpp"
#include "lagskel/errors.hpp"
#include "lagskel/io.hpp"
#include "lagskel/oracle.hpp"
#include "lagskel/solvers.hpp"

namespace py = pybind11;
using namespace lagskel;

namespace {

py::object fraction_type() {
  static py::object cls = py::module_::import("fractions").attr("Fraction");
  return cls;
}

py::object to_py(const Rational& q) { return fraction_type()(py::str(to_string(q))); }

py::list to_py(const RationalVector& v) {
  py::list out;
  for (const auto& q : v) out.append(to_py(q));
  return out;
}

Rational from_py(const py::handle& obj) {
  if (py::isinstance<py::float_>(obj)) throw py::type_error("floats are not exact; pass int, str or Fraction");
  if (py::isinstance<py::bool_>(obj)) throw py::type_error("expected a number, got bool");
  return parse_rational(py::str(obj).cast<std::string>());
}

RationalVector vector_from_py(const py::iterable& values) {
  RationalVector out;
  for (auto v : values) out.push_back(from_py(v));
  return out;
}

Backend backend_from(const std::string& name) {
  if (name == "mincut") return Backend::kMincut;
  if (name == "brute") return Backend::kBrute;
  throw py::value_error("backend must be 'mincut' or 'brute'");
}

SearchOptions options_from(std::optional<std::size_t> max_calls, std::optional<std::uint64_t> shuffle_seed) {
  SearchOptions o;
  o.max_oracle_calls = max_calls;
  o.shuffle_seed = shuffle_seed;
  return o;
}

py::dict entry_dict(const CharacteristicEntry& e) {
  py::dict d;
  d["labeling"] = std::vector<int>(e.labeling.begin(), e.labeling.end());
  d["f"] = to_py(e.f_value);
  d["H"] = to_py(e.h_value);
  d["lambda"] = to_py(e.witness_lambda);
  return d;
}

py::dict report_dict(const SearchReport& r) {
  py::dict d;
  d["oracle_calls"] = r.oracle_calls;
  d["num_vertices"] = r.num_vertices;
  d["num_minimizers"] = r.num_minimizers;
  d["cut_planes"] = r.cut_planes;
  d["degenerate_vertices"] = r.degenerate_vertices;
  d["tie_minimizers"] = r.tie_minimizers;
  d["coincident_cuts"] = r.coincident_cuts;
  d["general_position"] = r.general_position();
  return d;
}

py::list entries(const CharacteristicSet& set) {
  py::list out;
  for (const auto& e : set.entries()) out.append(entry_dict(e));
  return out;
}

py::dict oracle_dict(const OracleResult& r) {
  py::dict d;
  d["labeling"] = std::vector<int>(r.minimizer.begin(), r.minimizer.end());
  d["f"] = to_py(r.f_value);
  d["H"] = to_py(r.h_value);
  d["slack"] = to_py(r.slack);
  return d;
}

PairwiseEnergy energy_from_py(const py::iterable& unary, const py::iterable& edges, const py::handle& constant) {
  std::vector<UnaryTerm> u;
  for (auto item : unary) {
    auto pair = py::reinterpret_borrow<py::sequence>(item);
    if (pair.size() != 2) throw py::value_error("unary terms are (cost0, cost1)");
    u.push_back({from_py(pair[0]), from_py(pair[1])});
  }
  std::vector<PairwiseTerm> e;
  for (auto item : edges) {
    auto t = py::reinterpret_borrow<py::sequence>(item);
    if (t.size() != 6) throw py::value_error("edges are (u, v, t00, t01, t10, t11)");
    e.push_back({t[0].cast<std::size_t>(), t[1].cast<std::size_t>(), from_py(t[2]), from_py(t[3]), from_py(t[4]),
                 from_py(t[5])});
  }
  return PairwiseEnergy(std::move(u), std::move(e), from_py(constant));
}

}  // namespace

PYBIND11_MODULE(_lagskel, m) {
  m.doc() = "Exact Lagrangian characteristic sets for constrained binary labeling";

  auto& error = py::register_exception<Error>(m, "LagskelError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", error.ptr());

  py::class_<LagrangianProblem>(m, "Problem")
      .def_static("from_json", [](const std::string& text) { return parse_problem(text).problem; })
      .def_static("load", [](const std::filesystem::path& path) { return load_problem(path).problem; })
      .def("to_json", [](const LagrangianProblem& p) { return serialize_problem({p, std::nullopt}); })
      .def_property_readonly("num_variables", &LagrangianProblem::num_variables)
      .def_property_readonly("num_constraints", &LagrangianProblem::num_constraints)
      .def_property_readonly("target", [](const LagrangianProblem& p) { return to_py(p.target()); })
      .def_property_readonly("box",
                             [](const LagrangianProblem& p) {
                               py::list out;
                               for (std::size_t i = 0; i < p.box().size(); ++i)
                                 out.append(py::make_tuple(to_py(p.box().lower()[i]), to_py(p.box().upper()[i])));
                               return out;
                             })
      .def("energy", [](const LagrangianProblem& p, const Labeling& x) { return to_py(evaluate_energy(p.energy(), x)); })
      .def("constraints",
           [](const LagrangianProblem& p, const Labeling& x) { return to_py(evaluate_constraints(p, x)); })
      .def("with_target", [](const LagrangianProblem& p, const py::iterable& b) { return p.with_target(vector_from_py(b)); });

  m.def(
      "minimize",
      [](const py::iterable& unary, const py::iterable& edges, const py::handle& constant, const std::string& backend) {
        const PairwiseEnergy f = energy_from_py(unary, edges, constant);
        const MinimizeResult r = backend_from(backend) == Backend::kMincut ? mincut_minimize(f) : brute_minimize(f);
        return py::make_tuple(std::vector<int>(r.minimizer.begin(), r.minimizer.end()), to_py(r.value));
      },
      py::arg("unary"), py::arg("edges") = py::list(), py::arg("constant") = 0, py::arg("backend") = "mincut");

  m.def(
      "dual_search",
      [](const LagrangianProblem& p, const std::string& backend, std::optional<std::size_t> max_calls,
         std::optional<std::uint64_t> shuffle_seed) {
        const auto r = dual_search(*make_lagrangian_oracle(p, backend_from(backend)), p.box(),
                                   options_from(max_calls, shuffle_seed));
        py::dict d;
        d["entries"] = entries(r.set);
        d["report"] = report_dict(r.report);
        d["skeleton"] = r.skeleton.dump();
        return d;
      },
      py::arg("problem"), py::arg("backend") = "mincut", py::arg("max_calls") = py::none(),
      py::arg("shuffle_seed") = py::none());

  m.def(
      "dual_max",
      [](const LagrangianProblem& p, const std::string& backend, std::optional<std::size_t> max_calls) {
        const auto r = dual_max(*make_lagrangian_oracle(p, backend_from(backend)), p.box(), options_from(max_calls, {}));
        py::dict d = oracle_dict(r.minimizer);
        d["lambda"] = to_py(r.lambda);
        d["dual_value"] = to_py(r.value);
        d["report"] = report_dict(r.report);
        return d;
      },
      py::arg("problem"), py::arg("backend") = "mincut", py::arg("max_calls") = py::none());

  m.def(
      "slack_dual_max",
      [](const LagrangianProblem& p, const py::iterable& k_minus, const py::iterable& k_plus, const std::string& backend) {
        SlackBounds bounds{vector_from_py(k_minus), vector_from_py(k_plus)};
        const auto r = dual_max(*slack_wrap(make_lagrangian_oracle(p, backend_from(backend)), bounds), p.box());
        py::dict d = oracle_dict(r.minimizer);
        RationalVector b_star(r.minimizer.h_value.size());
        for (std::size_t i = 0; i < b_star.size(); ++i) b_star[i] = r.minimizer.h_value[i] + r.minimizer.slack[i];
        d["b_star"] = to_py(b_star);
        d["lambda"] = to_py(r.lambda);
        d["dual_value"] = to_py(r.value);
        return d;
      },
      py::arg("problem"), py::arg("k_minus"), py::arg("k_plus"), py::arg("backend") = "mincut");

  m.def(
      "adapt_search",
      [](const LagrangianProblem& p, const py::iterable& b_hat, const py::iterable& gap_minus,
         const py::iterable& gap_plus, const py::iterable& alpha, const py::iterable& eta, const std::string& penalty,
         const std::string& backend) {
        PenaltySpec spec;
        if (penalty == "squared")
          spec.kind = PenaltyKind::kSquared;
        else if (penalty == "absolute")
          spec.kind = PenaltyKind::kAbsolute;
        else
          throw py::value_error("penalty must be 'squared' or 'absolute'");
        const RationalVector b = vector_from_py(b_hat);
        spec.weights = vector_from_py(eta);
        spec.target = b;
        const auto r = adapt_search(p, b, {vector_from_py(gap_minus), vector_from_py(gap_plus)}, vector_from_py(alpha),
                                    spec, backend_from(backend));
        py::dict d = entry_dict(r.choice);
        d["objective"] = to_py(r.objective);
        d["b_star"] = to_py(r.b_star);
        d["lambda_star"] = to_py(r.lambda_star);
        d["local_set"] = entries(r.local_set);
        return d;
      },
      py::arg("problem"), py::arg("b_hat"), py::arg("gap_minus"), py::arg("gap_plus"), py::arg("alpha"),
      py::arg("eta"), py::arg("penalty") = "squared", py::arg("backend") = "mincut");
}
