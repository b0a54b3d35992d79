#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "danc/controllers.hpp"
#include "danc/error.hpp"
#include "danc/pipeline.hpp"
#include "danc/scenario.hpp"
#include "danc/sim_engine.hpp"

namespace py = pybind11;
using namespace danc;

namespace {

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kCompleted: return "completed";
    case RunStatus::kNumericBlowup: return "numeric_blowup";
    case RunStatus::kGainSign: return "gain_sign";
  }
  return "unknown";
}

py::dict trace_columns(const SimTrace& trace) {
  py::dict cols;
  for (const auto& name : trace.names()) {
    const auto& c = trace.column(name);
    py::array_t<double> a(static_cast<py::ssize_t>(c.size()));
    std::copy(c.begin(), c.end(), a.mutable_data());
    cols[py::str(name)] = a;
  }
  return cols;
}

py::dict sim_dict(const SimResult& r) {
  py::dict d;
  d["status"] = status_name(r.status);
  d["diagnostic"] = r.diagnostic;
  d["max_incremental_residual"] = r.max_incremental_residual;
  d["columns"] = trace_columns(r.trace);
  return d;
}

py::dict check_dict(const CheckSummary& c) {
  py::dict d;
  d["name"] = c.name;
  d["evaluated"] = c.evaluated;
  d["violations"] = c.violations;
  d["min_margin"] = c.min_margin;
  d["counts"] = c.counts;
  return d;
}

}  // namespace

PYBIND11_MODULE(_danc, m) {
  m.doc() = "Desired-approximation adaptive neural control: simulation and bound checks";

  static py::exception<Error> base(m, "DancError", PyExc_RuntimeError);
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      PyErr_SetString(config.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_static("from_toml", &parse_scenario, py::arg("text"))
      .def_static("load", &load_scenario, py::arg("path"))
      .def("to_toml", &serialize_scenario)
      .def("validate", &validate_scenario)
      .def("with_axis", &with_axis_value, py::arg("axis"), py::arg("value"))
      .def_readonly("plant", &Scenario::plant)
      .def_property_readonly("scheme", [](const Scenario& s) { return to_string(s.scheme); })
      .def_readonly("h", &Scenario::h)
      .def_readonly("horizon", &Scenario::horizon)
      .def_readonly("kappa", &Scenario::kappa)
      .def("__eq__", [](const Scenario& a, const Scenario& b) { return a == b; });

  m.def("sweep_axes", &sweep_axes);

  m.def("simulate", [](const Scenario& s) {
    validate_scenario(s);
    SimResult r;
    {
      py::gil_scoped_release release;
      r = run_closed_loop(s);
    }
    return sim_dict(r);
  }, py::arg("scenario"));

  m.def("verify", [](const Scenario& s, bool lemmas) {
    Verification v;
    {
      py::gil_scoped_release release;
      v = run_verification(s, lemmas);
    }
    py::dict d;
    d["passed"] = v.pass();
    d["failures"] = v.failures;
    d["status"] = status_name(v.sim.status);
    if (v.report) {
      const BoundReport& rep = *v.report;
      d["b_ef"] = rep.b_ef;
      d["eps_total"] = rep.eps_total;
      d["varpi0"] = rep.varpi0;
      d["c1"] = rep.c1;
      d["c2"] = rep.c2;
      d["t_entry"] = rep.t_entry;
      py::list checks;
      for (const auto& c : rep.checks) checks.append(check_dict(c));
      d["checks"] = checks;
    }
    return d;
  }, py::arg("scenario"), py::arg("lemmas") = false);

  m.def("lemma1_suite", [](std::uint64_t seed, int count) {
    py::list out;
    for (const auto& c : lemma1_random_suite(seed, count)) {
      out.append(py::dict(py::arg("description") = c.description,
                          py::arg("positive") = c.positive,
                          py::arg("min_integral") = c.min_integral));
    }
    return out;
  }, py::arg("seed") = 1, py::arg("count") = 10);

  m.def("lemma2_suite", [](std::uint64_t seed, int count) {
    py::list out;
    for (const auto& c : lemma2_random_suite(seed, count)) {
      out.append(py::dict(py::arg("description") = c.description,
                          py::arg("passed") = c.verdict.pass,
                          py::arg("tail_max_s") = c.verdict.tail_max_s));
    }
    return out;
  }, py::arg("seed") = 1, py::arg("count") = 100);

  m.def("sweep", [](const Scenario& s, const std::string& axis,
                    const std::vector<double>& values, int jobs) {
    std::vector<SweepRow> rows;
    {
      py::gil_scoped_release release;
      rows = run_sweep(s, axis, values, jobs);
    }
    py::list out;
    for (const auto& r : rows) {
      out.append(py::dict(py::arg("value") = r.value, py::arg("tail_max_ef") = r.tail_max_ef,
                          py::arg("ms_error") = r.ms_error, py::arg("bound") = r.bound,
                          py::arg("passed") = r.pass, py::arg("note") = r.note));
    }
    return out;
  }, py::arg("scenario"), py::arg("axis"), py::arg("values"), py::arg("jobs") = 1);
}
