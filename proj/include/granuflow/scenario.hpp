#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "granuflow/dynamics.hpp"
#include "granuflow/families.hpp"
#include "granuflow/jko.hpp"

namespace granuflow {

struct InitialSpec {
  enum class Kind { DiscreteLabels, GaussianBox, Csv };
  Kind kind = Kind::DiscreteLabels;
  // discrete_labels
  std::size_t labels = 2;
  Rho0 rho0 = Rho0::Uniform;
  std::size_t particles = 64;
  std::vector<double> label_values;
  // gaussian-box
  double radius_x = 1.0;
  double radius_v = 1.0;
  std::size_t samples = 256;
  // gaussian-box and csv
  std::size_t label_count = 8;
  std::filesystem::path path;
};

struct OracleToggles {
  bool characteristics = false;
  bool second_order = false;
  bool burgers = false;
  /// Oracle time step; 0 selects tau / 10.
  double dt = 0.0;
};

struct ScenarioConfig {
  InitialSpec initial;
  JkoConfig jko;
  /// Whether R_x / R_v were given; otherwise they come from the initial data.
  bool radius_x_given = false;
  bool radius_v_given = false;
  OracleToggles oracles;
  std::filesystem::path output_dir = "granuflow-out";
  std::optional<std::uint64_t> seed;
  /// Every `output_stride`-th state goes to trajectory.csv (the last always does).
  std::size_t output_stride = 1;
  double contraction_slack = 5e-2;
};

/// Parses a `schema: 1` JSON document. Unknown keys, a wrong schema, or a
/// missing seed for a sampled family throw Config. Relative paths inside the
/// document resolve against `base_dir`.
ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
/// Io if the file cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

/// The initial ProfileState described by the config, and the JkoConfig with
/// R_x / R_v filled in from the data when not given.
struct PreparedScenario {
  ProfileState initial;
  JkoConfig jko;
};
PreparedScenario prepare(const ScenarioConfig& cfg);

struct SimulationResult {
  PreparedScenario scenario;
  Trajectory trajectory;
  std::optional<CharacteristicsRun> characteristics;
  /// max over JKO output times of d(JKO, characteristics).
  std::optional<double> characteristics_distance;
  std::optional<double> second_order_distance;
  std::optional<double> second_order_first_integral;
  std::optional<double> burgers_shock_time;
};

SimulationResult simulate(const ScenarioConfig& cfg);

/// trajectory.csv, energy.csv, grid.csv, summary.json and the SVG plots,
/// each written to a temporary file and renamed into place.
void write_outputs(const ScenarioConfig& cfg, const SimulationResult& result);

struct ComparisonResult {
  std::vector<double> times;
  std::vector<double> d;
  std::vector<double> d_w;  // NaN where the lifted LP exceeds its atom cap
  double d0 = 0.0;
  double max_ratio = 0.0;
  bool contraction_holds = true;
};

/// Throws GridMismatch unless both runs share LabelGrid, tau and T.
ComparisonResult compare_runs(const SimulationResult& a, const SimulationResult& b, double slack);
void write_comparison(const std::filesystem::path& dir, const ComparisonResult& c, double slack);

/// Writes `contents` to `path` through a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// grid.csv rows `label_index,a,mu,h`.
std::string grid_csv(const LabelGrid& grid);
LabelGrid read_grid_csv(const std::filesystem::path& path);

/// The state stored in trajectory.csv at the recorded time selected by the
/// right-closed convention (smallest recorded t' >= t; t = 0 gives the first).
ProfileState read_trajectory_state(const std::filesystem::path& trajectory_csv, const LabelGrid& grid, double t);

}  // namespace granuflow
