#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "granuflow/error.hpp"
#include "granuflow/families.hpp"
#include "granuflow/jko.hpp"
#include "granuflow/kinetic.hpp"
#include "granuflow/ot1d.hpp"
#include "granuflow/scenario.hpp"
#include "granuflow/validation.hpp"

namespace py = pybind11;
using namespace granuflow;

namespace {

py::dict trajectory_dict(const Trajectory& t) {
  std::vector<double> totals;
  std::vector<std::vector<std::vector<double>>> positions;
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    totals.push_back(t.energies[k].total);
    std::vector<std::vector<double>> species;
    for (const auto& sp : t.states[k].species) species.push_back(sp.positions());
    positions.push_back(std::move(species));
  }
  py::dict d;
  d["times"] = t.times;
  d["energy"] = totals;
  d["positions"] = positions;
  d["velocities"] = t.velocities;
  d["step_distances"] = t.step_distances;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "JKO solver for 1D kinetic granular media";
  py::register_exception<Error>(m, "GranuflowError", PyExc_RuntimeError);

  m.def(
      "wasserstein",
      [](const std::vector<double>& x, const std::vector<double>& wx, const std::vector<double>& y,
         const std::vector<double>& wy, int p) {
        return wasserstein_p(DiscreteMeasure(x, wx), DiscreteMeasure(y, wy), p);
      },
      py::arg("x"), py::arg("wx"), py::arg("y"), py::arg("wy"), py::arg("p") = 2);

  m.def(
      "discrete_labels_run",
      [](std::size_t labels, const std::string& rho0, std::size_t particles, double tau, double horizon) {
        JkoConfig cfg;
        cfg.tau = tau;
        cfg.horizon = horizon;
        cfg.radius_x = 1.0;
        cfg.radius_v = 1.0;
        py::gil_scoped_release release;
        Trajectory t = run(discrete_labels_state(labels, parse_rho0(rho0), particles), cfg);
        py::gil_scoped_acquire acquire;
        return trajectory_dict(t);
      },
      py::arg("labels"), py::arg("rho0") = "uniform", py::arg("particles") = 32, py::arg("tau") = 1e-2,
      py::arg("T") = 1.0);

  m.def(
      "simulate",
      [](const std::string& config_path, bool write) {
        const ScenarioConfig cfg = load_config(config_path);
        SimulationResult r;
        {
          py::gil_scoped_release release;
          r = simulate(cfg);
          if (write) write_outputs(cfg, r);
        }
        py::dict d = trajectory_dict(r.trajectory);
        d["output_dir"] = cfg.output_dir.string();
        if (r.characteristics) d["characteristics_shock_time"] = r.characteristics->shock_time;
        d["burgers_shock_time"] = r.burgers_shock_time;
        return d;
      },
      py::arg("config"), py::arg("write") = true);

  m.def(
      "run_criterion",
      [](int id) {
        CriterionResult r;
        {
          py::gil_scoped_release release;
          r = run_criterion(id);
        }
        py::dict d;
        d["id"] = r.id;
        d["title"] = r.title;
        d["passed"] = r.passed;
        d["detail"] = r.detail;
        d["seconds"] = r.seconds;
        return d;
      },
      py::arg("id"));
  m.def("suite_names", &suite_names);
}
