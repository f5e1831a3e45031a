#include "cli.hpp"

#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "granuflow/error.hpp"
#include "granuflow/kinetic.hpp"
#include "granuflow/parallel.hpp"
#include "granuflow/scenario.hpp"
#include "granuflow/validation.hpp"

namespace granuflow {

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SolverDiverged:
    case ErrorKind::CflViolation:
      return 1;
    default:
      return 2;
  }
}

std::string show(const std::optional<double>& v) {
  if (!v) return "none";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

int do_simulate(const std::string& path, std::ostream& out) {
  const ScenarioConfig cfg = load_config(path);
  const SimulationResult res = simulate(cfg);
  write_outputs(cfg, res);
  const Trajectory& t = res.trajectory;
  out << "steps: " << t.states.size() - 1 << ", J: " << t.energies.front().total << " -> " << t.energies.back().total
      << "\n";
  if (res.characteristics) out << "characteristics shock time: " << show(res.characteristics->shock_time) << "\n";
  if (res.characteristics_distance) out << "max d(JKO, characteristics): " << show(res.characteristics_distance) << "\n";
  if (res.second_order_distance) {
    out << "max d(JKO, second order): " << show(res.second_order_distance)
        << ", first integral residual: " << show(res.second_order_first_integral) << "\n";
  }
  if (cfg.oracles.burgers) out << "Burgers shock time: " << show(res.burgers_shock_time) << "\n";
  out << "outputs written to " << cfg.output_dir.string() << "\n";
  return 0;
}

int do_validate(const std::string& suite, std::ostream& out) {
  std::vector<std::string> suites;
  if (suite == "all") {
    suites = suite_names();
  } else {
    suite_criteria(suite);
    suites = {suite};
  }
  int passed = 0, total = 0;
  for (const auto& s : suites) {
    for (const CriterionResult& r : run_suite(s)) {
      out << format_result(r) << "\n";
      passed += r.passed;
      ++total;
    }
  }
  out << passed << "/" << total << " criteria passed\n";
  return passed == total ? 0 : 1;
}

int do_compare(const std::string& a_path, const std::string& b_path, const std::string& out_dir, std::ostream& out) {
  const ScenarioConfig ca = load_config(a_path);
  const ScenarioConfig cb = load_config(b_path);
  SimulationResult ra, rb;
  if (worker_count() >= 2) {
    std::exception_ptr failure;
    std::thread worker([&] {
      try {
        rb = simulate(cb);
      } catch (...) {
        failure = std::current_exception();
      }
    });
    try {
      ra = simulate(ca);
    } catch (...) {
      worker.join();
      throw;
    }
    worker.join();
    if (failure) std::rethrow_exception(failure);
  } else {
    ra = simulate(ca);
    rb = simulate(cb);
  }
  const double slack = ca.contraction_slack;
  const ComparisonResult c = compare_runs(ra, rb, slack);
  const std::filesystem::path dir = out_dir.empty() ? ca.output_dir : std::filesystem::path(out_dir);
  write_comparison(dir, c, slack);
  out << "d(0) = " << c.d0 << ", max_t d(t)/d(0) = " << c.max_ratio << " (slack " << slack << ")\n";
  out << (c.contraction_holds ? "contraction holds" : "contraction VIOLATED") << "; distance.csv written to "
      << dir.string() << "\n";
  return c.contraction_holds ? 0 : 1;
}

int do_reconstruct(const std::string& traj_path, double t, const std::string& grid_path, const std::string& out_path,
                   std::ostream& out) {
  const std::filesystem::path traj(traj_path);
  const std::filesystem::path grid_file = grid_path.empty() ? traj.parent_path() / "grid.csv" : std::filesystem::path(grid_path);
  const LabelGrid grid = read_grid_csv(grid_file);
  const KineticCloud cloud = reconstruct(read_trajectory_state(traj, grid, t));
  std::ostringstream buf;
  write_cloud_csv(buf, cloud);
  if (out_path.empty()) {
    out << buf.str();
  } else {
    write_file_atomic(out_path, buf.str());
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient-flow solver for 1D kinetic granular media with quadratic kernel", "granuflow"};
  app.require_subcommand(1);

  std::string config_path;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a scenario from a JSON config");
  simulate_cmd->add_option("config", config_path, "Scenario config (schema 1)")->required();

  std::string suite;
  auto* validate_cmd = app.add_subcommand("validate", "Run an acceptance suite");
  validate_cmd->add_option("suite", suite, "ot-oracle | energy-convexity | jko-descent | contraction | "
                                           "cross-validation | shock-bound | all")
      ->required();

  std::string a_path, b_path, compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Run two scenarios and check contraction");
  compare_cmd->add_option("a", a_path, "First config")->required();
  compare_cmd->add_option("b", b_path, "Second config")->required();
  compare_cmd->add_option("--out", compare_out, "Directory for distance.csv (default: output_dir of the first config)");

  std::string traj_path, grid_path, recon_out;
  double time = 0.0;
  auto* recon_cmd = app.add_subcommand("reconstruct", "Phase-space cloud at time t from a trajectory.csv");
  recon_cmd->add_option("trajectory", traj_path, "trajectory.csv written by simulate")->required();
  recon_cmd->add_option("--time", time, "Time t")->required();
  recon_cmd->add_option("--grid", grid_path, "grid.csv (default: next to the trajectory)");
  recon_cmd->add_option("--out", recon_out, "Output CSV (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate_cmd) return do_simulate(config_path, out);
    if (*validate_cmd) return do_validate(suite, out);
    if (*compare_cmd) return do_compare(a_path, b_path, compare_out, out);
    if (*recon_cmd) return do_reconstruct(traj_path, time, grid_path, recon_out, out);
  } catch (const Error& e) {
    err << "granuflow: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "granuflow: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace granuflow
