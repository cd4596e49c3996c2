#include "thick/dsl.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace thick;

namespace {

QuadratureConfig config(double split_radius, double abs_tol, int max_subdivisions) {
  QuadratureConfig cfg;
  cfg.split_radius = split_radius;
  cfg.abs_tol = abs_tol;
  cfg.max_subdivisions = max_subdivisions;
  cfg.validate();
  return cfg;
}

std::optional<std::string> exact_text(const PairingResult& r) {
  if (!r.exact) return std::nullopt;
  return to_string(*r.exact);
}

}  // namespace

PYBIND11_MODULE(_thickcalc, m) {
  m.doc() = "Pairings of thick distributions with thick test functions";

  auto error = py::register_exception<Error>(m, "ThickError", PyExc_RuntimeError);
  py::register_exception<dsl::ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ThickPointMismatch>(m, "ThickPointMismatch", error.ptr());
  py::register_exception<InsufficientOrder>(m, "InsufficientOrder", error.ptr());
  py::register_exception<QuadratureError>(m, "QuadratureError", error.ptr());
  py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<InvariantViolation>(m, "InvariantViolation", error.ptr());

  py::class_<SeriesTerm>(m, "SeriesTerm")
      .def_readonly("order", &SeriesTerm::order)
      .def_readonly("contribution", &SeriesTerm::contribution);

  py::class_<PairingResult>(m, "PairingResult")
      .def_readonly("value", &PairingResult::value)
      .def_property_readonly("exact", &exact_text)
      .def_readonly("split_radius", &PairingResult::split_radius)
      .def_readonly("quad_error", &PairingResult::quad_error)
      .def_readonly("series_terms", &PairingResult::series_terms)
      .def_readonly("log_term", &PairingResult::log_term)
      .def("__repr__", [](const PairingResult& r) {
        return "PairingResult(value=" + format_double(r.value) +
               (r.exact ? ", exact=" + to_string(*r.exact) : std::string()) + ")";
      });

  py::class_<CheckOutcome>(m, "CheckOutcome")
      .def_readonly("name", &CheckOutcome::name)
      .def_readonly("observed", &CheckOutcome::observed)
      .def_readonly("expected", &CheckOutcome::expected)
      .def_readonly("tolerance", &CheckOutcome::tolerance)
      .def_readonly("passed", &CheckOutcome::pass);

  m.def(
      "pair",
      [](const std::string& dist, const std::string& test, double split_radius, double abs_tol,
         int max_subdivisions) {
        return pair(dsl::parse_distribution(dist), dsl::parse_test_function(test),
                    config(split_radius, abs_tol, max_subdivisions));
      },
      py::arg("dist"), py::arg("test"), py::arg("split_radius") = 1.0, py::arg("abs_tol") = 1e-10,
      py::arg("max_subdivisions") = 2000, "Pair a distribution with a test function, both in DSL syntax.");

  m.def(
      "project",
      [](const std::string& dist, const std::string& test, double split_radius, double abs_tol,
         int max_subdivisions) {
        return pair(project(dsl::parse_distribution(dist)), dsl::parse_test_function(test),
                    config(split_radius, abs_tol, max_subdivisions));
      },
      py::arg("dist"), py::arg("test"), py::arg("split_radius") = 1.0, py::arg("abs_tol") = 1e-10,
      py::arg("max_subdivisions") = 2000, "Pair the classical projection with an ordinary test function.");

  m.def(
      "derive",
      [](const std::string& dist) { return dsl::print(simplify(d_star(dsl::parse_distribution(dist)))); },
      py::arg("dist"), "Normal form of the derivative.");

  m.def(
      "simplify", [](const std::string& dist) { return dsl::print(simplify(dsl::parse_distribution(dist))); },
      py::arg("dist"));

  m.def(
      "expand",
      [](const std::string& test, int order) {
        return render(dsl::parse_test_function(test).expansion().truncated(order));
      },
      py::arg("test"), py::arg("order"), "Expansion at the thick point up to r^order.");

  m.def(
      "normalize_distribution", [](const std::string& text) { return dsl::print(dsl::parse_distribution(text)); },
      py::arg("text"));
  m.def(
      "normalize_test_function", [](const std::string& text) { return dsl::print(dsl::parse_test_function(text)); },
      py::arg("text"));

  m.def(
      "evaluate_test_function", [](const std::string& text, double x) { return dsl::parse_test_function(text)(x); },
      py::arg("text"), py::arg("x"));

  m.def("suite_names", &suite_names);
  m.def(
      "check",
      [](const std::string& suite, double split_radius, double abs_tol, int max_subdivisions) {
        return run_suite(suite, config(split_radius, abs_tol, max_subdivisions));
      },
      py::arg("suite"), py::arg("split_radius") = 1.0, py::arg("abs_tol") = 1e-10,
      py::arg("max_subdivisions") = 2000);

  m.def(
      "run",
      [](const std::string& program, std::optional<std::string> command, bool json, double split_radius,
         double abs_tol, int max_subdivisions) {
        std::optional<dsl::Command> fallback;
        if (command) {
          fallback = dsl::command_from_name(*command);
          if (!fallback) throw DomainError("unknown command '" + *command + "'");
        }
        const dsl::Report report =
            dsl::run(dsl::parse(program, fallback), config(split_radius, abs_tol, max_subdivisions));
        return json ? report.json() : report.text();
      },
      py::arg("program"), py::arg("command") = py::none(), py::arg("json") = false,
      py::arg("split_radius") = 1.0, py::arg("abs_tol") = 1e-10, py::arg("max_subdivisions") = 2000,
      "Run a program and return its report.");
}
