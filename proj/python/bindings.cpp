#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "myosolve/bench.hpp"
#include "myosolve/dofmap.hpp"

namespace py = pybind11;

namespace {

myo::bench::Config make_config(const std::map<std::string, std::string>& kv) {
  const auto problems = myo::bench::validate(kv);
  if (!problems.empty()) {
    std::string msg = "invalid config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
  return myo::bench::resolve(kv);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "cardiac mechanics solver core";
  m.attr("__version__") = "0.1.0";

  m.def("default_config", [] { return myo::bench::default_config().values; },
        "every registered key with its default value");

  m.def("validate_config",
        [](const std::map<std::string, std::string>& kv) { return myo::bench::validate(kv); },
        py::arg("config"), "all problems with the given keys; empty means valid");

  m.def("run_bench_json",
        [](const std::map<std::string, std::string>& kv) {
          const auto cfg = make_config(kv);
          py::gil_scoped_release nogil;
          return myo::bench::report_json_string(myo::bench::run_bench(cfg));
        },
        py::arg("config"), "run every sweep combination, returning the report as JSON text");

  m.def("case_info",
        [](const std::map<std::string, std::string>& kv) {
          const auto cs = myo::bench::build_case(make_config(kv));
          std::map<std::string, double> info;
          info["n_nodes"] = cs->mesh.n_nodes();
          info["n_hexes"] = cs->mesh.n_hexes();
          info["n_dofs"] = cs->dofs.n_dofs();
          info["n_subdomains"] = cs->part.n_subdomains;
          if (cs->mesh.kind == myo::MeshKind::shell) info["cavity_volume"] = myo::cavity_volume(cs->mesh);
          return info;
        },
        py::arg("config"), "sizes of the discrete problem a config describes, without solving");
}
