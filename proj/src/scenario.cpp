#include "granuflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "granuflow/csv.hpp"
#include "granuflow/energy.hpp"
#include "granuflow/error.hpp"
#include "granuflow/kinetic.hpp"
#include "granuflow/svg.hpp"

namespace granuflow {

using nlohmann::json;

namespace {

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorKind::Config, where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      throw Error(ErrorKind::Config, "unknown key '" + key + "' in " + where);
    }
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw Error(ErrorKind::Config, where + "." + key + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorKind::Config, where + "." + key + " must be finite");
  return d;
}

std::size_t get_count(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorKind::Config, where + "." + key + " must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

bool get_bool(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw Error(ErrorKind::Config, where + "." + key + " must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw Error(ErrorKind::Config, where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::string fmt(double v) { return csv::format_double(v); }

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("malformed JSON: ") + e.what());
  }
  ScenarioConfig cfg;
  try {
    only_keys(doc, {"schema", "seed", "initial", "jko", "oracles", "output_dir", "output_stride", "contraction_slack"},
              "config");
    if (!doc.contains("schema") || !doc["schema"].is_number_integer() || doc["schema"].get<int>() != 1) {
      throw Error(ErrorKind::Config, "config must declare \"schema\": 1");
    }
    if (doc.contains("seed")) {
      if (!doc["seed"].is_number_unsigned()) throw Error(ErrorKind::Config, "seed must be a nonnegative integer");
      cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (!doc.contains("initial")) throw Error(ErrorKind::Config, "missing \"initial\"");

    const json& init = doc["initial"];
    if (!init.is_object() || !init.contains("kind")) throw Error(ErrorKind::Config, "initial.kind is required");
    const std::string kind = get_string(init, "kind", "initial");
    InitialSpec& in = cfg.initial;
    if (kind == "discrete_labels") {
      only_keys(init, {"kind", "labels", "rho0", "particles", "label_values"}, "initial");
      in.kind = InitialSpec::Kind::DiscreteLabels;
      in.labels = get_count(init, "labels", "initial");
      in.rho0 = init.contains("rho0") ? parse_rho0(get_string(init, "rho0", "initial")) : Rho0::Uniform;
      if (init.contains("particles")) in.particles = get_count(init, "particles", "initial");
      if (init.contains("label_values")) {
        if (!init["label_values"].is_array()) throw Error(ErrorKind::Config, "initial.label_values must be an array");
        for (const json& v : init["label_values"]) {
          if (!v.is_number()) throw Error(ErrorKind::Config, "initial.label_values must hold numbers");
          in.label_values.push_back(v.get<double>());
        }
      }
      if (in.labels == 0 || in.particles == 0) throw Error(ErrorKind::Config, "labels and particles must be positive");
    } else if (kind == "gaussian-box") {
      only_keys(init, {"kind", "R_x", "R_v", "samples", "label_count"}, "initial");
      in.kind = InitialSpec::Kind::GaussianBox;
      in.radius_x = get_number(init, "R_x", "initial");
      in.radius_v = get_number(init, "R_v", "initial");
      in.samples = get_count(init, "samples", "initial");
      if (init.contains("label_count")) in.label_count = get_count(init, "label_count", "initial");
      if (!cfg.seed) throw Error(ErrorKind::Config, "gaussian-box sampling needs a \"seed\"");
    } else if (kind == "csv") {
      only_keys(init, {"kind", "path", "label_count"}, "initial");
      in.kind = InitialSpec::Kind::Csv;
      in.path = resolve(base_dir, get_string(init, "path", "initial"));
      if (init.contains("label_count")) in.label_count = get_count(init, "label_count", "initial");
    } else {
      throw Error(ErrorKind::Config, "unknown initial.kind '" + kind + "'");
    }

    if (doc.contains("jko")) {
      const json& j = doc["jko"];
      only_keys(j, {"tau", "T", "R_x", "R_v", "solver_tol", "max_inner_iters", "particles_per_label"}, "jko");
      if (j.contains("tau")) cfg.jko.tau = get_number(j, "tau", "jko");
      if (j.contains("T")) cfg.jko.horizon = get_number(j, "T", "jko");
      if (j.contains("R_x")) cfg.jko.radius_x = get_number(j, "R_x", "jko"), cfg.radius_x_given = true;
      if (j.contains("R_v")) cfg.jko.radius_v = get_number(j, "R_v", "jko"), cfg.radius_v_given = true;
      if (j.contains("solver_tol")) cfg.jko.solver_tol = get_number(j, "solver_tol", "jko");
      if (j.contains("max_inner_iters")) cfg.jko.max_inner_iters = get_count(j, "max_inner_iters", "jko");
      if (j.contains("particles_per_label")) cfg.jko.particles_per_label = get_count(j, "particles_per_label", "jko");
    }
    if (doc.contains("oracles")) {
      const json& o = doc["oracles"];
      only_keys(o, {"characteristics", "second_order", "burgers", "dt"}, "oracles");
      if (o.contains("characteristics")) cfg.oracles.characteristics = get_bool(o, "characteristics", "oracles");
      if (o.contains("second_order")) cfg.oracles.second_order = get_bool(o, "second_order", "oracles");
      if (o.contains("burgers")) cfg.oracles.burgers = get_bool(o, "burgers", "oracles");
      if (o.contains("dt")) cfg.oracles.dt = get_number(o, "dt", "oracles");
      if (cfg.oracles.dt < 0.0) throw Error(ErrorKind::Config, "oracles.dt must be nonnegative");
    }
    if (doc.contains("output_dir")) cfg.output_dir = resolve(base_dir, get_string(doc, "output_dir", "config"));
    else cfg.output_dir = resolve(base_dir, cfg.output_dir.string());
    if (doc.contains("output_stride")) cfg.output_stride = get_count(doc, "output_stride", "config");
    if (cfg.output_stride == 0) throw Error(ErrorKind::Config, "output_stride must be positive");
    if (doc.contains("contraction_slack")) cfg.contraction_slack = get_number(doc, "contraction_slack", "config");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  try {
    cfg.jko.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

PreparedScenario prepare(const ScenarioConfig& cfg) {
  KineticCloud cloud;
  std::size_t labels = 0;
  const InitialSpec& in = cfg.initial;
  switch (in.kind) {
    case InitialSpec::Kind::DiscreteLabels:
      cloud = discrete_labels_cloud(in.labels, in.rho0, in.particles, in.label_values);
      labels = in.labels;
      break;
    case InitialSpec::Kind::GaussianBox:
      cloud = gaussian_box_cloud(in.radius_x, in.radius_v, in.samples, cfg.seed.value_or(0));
      labels = in.label_count;
      break;
    case InitialSpec::Kind::Csv:
      cloud = read_cloud_csv(in.path);
      labels = in.label_count;
      break;
  }
  PreparedScenario out;
  out.initial = disintegrate_initial(cloud, labels);
  out.jko = cfg.jko;
  if (!cfg.radius_x_given) out.jko.radius_x = cloud.radius_x;
  if (!cfg.radius_v_given) out.jko.radius_v = cloud.radius_v;
  return out;
}

namespace {

std::vector<double> uniform_nodes(double lo, double hi, std::size_t cells) {
  std::vector<double> nodes(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) nodes[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(cells);
  return nodes;
}

}  // namespace

SimulationResult simulate(const ScenarioConfig& cfg) {
  SimulationResult res;
  res.scenario = prepare(cfg);
  const JkoConfig& jko = res.scenario.jko;
  const ProfileState& s0 = res.scenario.initial;
  res.trajectory = run(s0, jko);

  const double dt = cfg.oracles.dt > 0.0 ? cfg.oracles.dt : jko.tau / 10.0;
  const auto record_every = static_cast<std::size_t>(std::max(1.0, std::round(jko.tau / dt)));
  if (cfg.oracles.characteristics) {
    CharacteristicsConfig cc;
    cc.dt = dt;
    cc.horizon = jko.horizon;
    cc.record_every = record_every;
    res.characteristics = integrate_characteristics(s0, cc);
    double worst = 0.0;
    const Trajectory& ct = res.characteristics->trajectory;
    for (std::size_t k = 0; k < ct.states.size(); ++k) {
      if (ct.times[k] > jko.horizon) break;
      worst = std::max(worst, product_distance(interpolate(res.trajectory, ct.times[k]), ct.states[k]));
    }
    res.characteristics_distance = worst;
  }
  if (cfg.oracles.second_order) {
    SecondOrderConfig so;
    so.dt = dt;
    so.horizon = jko.horizon;
    so.record_every = record_every;
    const SecondOrderRun sr = integrate_second_order(reconstruct(s0), so);
    double worst = 0.0;
    for (std::size_t k = 0; k < sr.times.size(); ++k) {
      if (sr.times[k] > jko.horizon) break;
      worst = std::max(worst, product_distance(interpolate(res.trajectory, sr.times[k]), induced_profile(sr, k, s0)));
    }
    res.second_order_distance = worst;
    res.second_order_first_integral = first_integral_residual(sr);
  }
  if (cfg.oracles.burgers) {
    const double radius = jko.support_radius();
    std::vector<double> nodes = uniform_nodes(-radius, radius, 2048);
    BurgersState b;
    if (cfg.initial.kind == InitialSpec::Kind::DiscreteLabels) {
      // The family has a smooth rho0; use its CDF rather than the particles.
      const Rho0 rho0 = cfg.initial.rho0;
      const LabelGrid& grid = s0.grid;
      b = burgers_initial(grid, std::move(nodes), [&](std::size_t i, double x) {
        return grid.masses[i] * grid.quad_weights[i] * rho0_cdf(rho0, x);
      });
    } else {
      b = burgers_from_profile(s0, std::move(nodes));
    }
    const BurgersRun br = run_burgers(std::move(b), jko.horizon);
    res.burgers_shock_time = br.shock_time;
  }
  return res;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

std::string grid_csv(const LabelGrid& grid) {
  std::ostringstream out;
  csv::write_row(out, {"label_index", "a", "mu", "h"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv::write_row(out, {std::to_string(i), fmt(grid.labels[i]), fmt(grid.quad_weights[i]), fmt(grid.masses[i])});
  }
  return out.str();
}

LabelGrid read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + path.string() + "'");
  const auto rows = csv::read(in);
  if (rows.empty()) throw Error(ErrorKind::Io, "'" + path.string() + "' is empty");
  const std::size_t ci = csv::column(rows[0], "label_index"), ca = csv::column(rows[0], "a"),
                    cm = csv::column(rows[0], "mu"), ch = csv::column(rows[0], "h");
  LabelGrid grid;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;
    if (csv::parse_double(rows[r].at(ci)) != static_cast<double>(grid.size())) {
      throw Error(ErrorKind::Io, "grid.csv rows must be in label order");
    }
    grid.labels.push_back(csv::parse_double(rows[r].at(ca)));
    grid.quad_weights.push_back(csv::parse_double(rows[r].at(cm)));
    grid.masses.push_back(csv::parse_double(rows[r].at(ch)));
  }
  grid.validate();
  return grid;
}

namespace {

std::string trajectory_csv(const Trajectory& traj, std::size_t stride) {
  std::ostringstream out;
  csv::write_row(out, {"t", "label_index", "atom_index", "x", "v", "weight"});
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    if (k % stride != 0 && k + 1 != traj.states.size()) continue;
    const ProfileState& s = traj.states[k];
    for (std::size_t i = 0; i < s.species.size(); ++i) {
      for (std::size_t j = 0; j < s.species[i].size(); ++j) {
        csv::write_row(out, {fmt(traj.times[k]), std::to_string(i), std::to_string(j), fmt(s.species[i][j].position),
                             fmt(traj.velocities[k][i][j]), fmt(s.species[i][j].weight)});
      }
    }
  }
  return out.str();
}

std::string energy_csv(const Trajectory& traj) {
  std::ostringstream out;
  csv::write_row(out, {"t", "j0", "j1", "total", "step_distance"});
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const EnergyReport& e = traj.energies[k];
    const double step = k == 0 ? 0.0 : traj.step_distances[k - 1];
    csv::write_row(out, {fmt(traj.times[k]), fmt(e.j0), fmt(e.j1), fmt(e.total), fmt(step)});
  }
  return out.str();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string summary_json(const ScenarioConfig& cfg, const SimulationResult& r) {
  const Trajectory& t = r.trajectory;
  double max_v = 0.0, reach = 0.0, worst_descent = -std::numeric_limits<double>::infinity();
  double dissipated = 0.0;
  for (const auto& v : t.velocities) max_v = std::max(max_v, max_abs(v));
  for (const auto& s : t.states) reach = std::max(reach, s.max_abs_position());
  for (std::size_t k = 0; k + 1 < t.states.size(); ++k) {
    const double lhs = t.step_distances[k] * t.step_distances[k] / (2.0 * t.tau);
    dissipated += lhs;
    worst_descent = std::max(worst_descent, lhs - (t.energies[k].total - t.energies[k + 1].total));
  }
  std::optional<double> char_shock;
  if (r.characteristics) char_shock = r.characteristics->shock_time;
  std::optional<double> detected = char_shock ? char_shock : r.burgers_shock_time;

  json j;
  j["schema"] = 1;
  j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  j["label_count"] = r.scenario.initial.label_count();
  j["atom_count"] = t.states.back().atom_count();
  j["tau"] = t.tau;
  j["T"] = t.horizon;
  j["steps"] = t.states.size() - 1;
  j["R_x"] = r.scenario.jko.radius_x;
  j["R_v"] = r.scenario.jko.radius_v;
  j["support_radius"] = r.scenario.jko.support_radius();
  j["max_abs_position"] = reach;
  j["max_abs_velocity"] = max_v;
  j["velocity_bound"] = r.scenario.jko.radius_v + 2.0;
  j["energy_initial"] = t.energies.front().total;
  j["energy_final"] = t.energies.back().total;
  j["dissipation_sum"] = dissipated;
  j["max_descent_defect"] = t.states.size() > 1 ? json(worst_descent) : json(nullptr);
  j["weak_form_residual"] = t.states.size() > 1 ? json(weak_form_residual(t).max_abs) : json(nullptr);
  j["shock_detected_time"] = optional_number(detected);
  j["characteristics_shock_time"] = optional_number(char_shock);
  j["burgers_shock_time"] = optional_number(r.burgers_shock_time);
  j["characteristics_distance"] = optional_number(r.characteristics_distance);
  j["second_order_distance"] = optional_number(r.second_order_distance);
  j["second_order_first_integral_residual"] = optional_number(r.second_order_first_integral);
  return j.dump(2) + "\n";
}

std::string energy_svg(const Trajectory& t) {
  svg::Series total{"J", {}, {}}, j0{"j0 / 4", {}, {}}, j1{"j1", {}, {}};
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    for (auto* s : {&total, &j0, &j1}) s->x.push_back(t.times[k]);
    total.y.push_back(t.energies[k].total);
    j0.y.push_back(t.energies[k].j0 / 4.0);
    j1.y.push_back(t.energies[k].j1);
  }
  return svg::line_plot("energy along the JKO trajectory", "t", {total, j0, j1});
}

std::string rho_svg(const ProfileState& s, double t) {
  const DiscreteMeasure rho = marginal_rho(s);
  double lo = rho[0].position, hi = rho[rho.size() - 1].position;
  if (!(hi > lo)) lo -= 0.5, hi += 0.5;
  constexpr std::size_t bins = 40;
  const double width = (hi - lo) / bins;
  std::vector<double> edges(bins + 1), heights(bins, 0.0);
  for (std::size_t k = 0; k <= bins; ++k) edges[k] = lo + width * static_cast<double>(k);
  for (const Atom& a : rho.atoms()) {
    const auto k = std::min<std::size_t>(bins - 1, static_cast<std::size_t>((a.position - lo) / width));
    heights[k] += a.weight / width;
  }
  return svg::histogram("rho at t = " + fmt(t), edges, heights);
}

std::string phase_svg(const ProfileState& s, double t) {
  const KineticCloud c = reconstruct(s);
  std::vector<double> x, v;
  for (const PhaseSample& p : c.samples) {
    x.push_back(p.x);
    v.push_back(p.v);
  }
  return svg::scatter_plot("phase space at t = " + fmt(t), "x", "v", x, v);
}

}  // namespace

void write_outputs(const ScenarioConfig& cfg, const SimulationResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + cfg.output_dir.string() + "': " + ec.message());
  const Trajectory& t = result.trajectory;
  const auto& dir = cfg.output_dir;
  write_file_atomic(dir / "trajectory.csv", trajectory_csv(t, cfg.output_stride));
  write_file_atomic(dir / "energy.csv", energy_csv(t));
  write_file_atomic(dir / "grid.csv", grid_csv(result.scenario.initial.grid));
  write_file_atomic(dir / "summary.json", summary_json(cfg, result));
  write_file_atomic(dir / "energy.svg", energy_svg(t));
  write_file_atomic(dir / "rho.svg", rho_svg(t.states.back(), t.times.back()));
  write_file_atomic(dir / "phase.svg", phase_svg(t.states.back(), t.times.back()));
}

ComparisonResult compare_runs(const SimulationResult& a, const SimulationResult& b, double slack) {
  const Trajectory& ta = a.trajectory;
  const Trajectory& tb = b.trajectory;
  require_same_grid(a.scenario.initial, b.scenario.initial);
  if (ta.tau != tb.tau || ta.horizon != tb.horizon || ta.states.size() != tb.states.size()) {
    throw Error(ErrorKind::GridMismatch, "runs use different tau or T");
  }
  ComparisonResult c;
  c.d0 = product_distance(ta.states[0], tb.states[0]);
  for (std::size_t k = 0; k < ta.states.size(); ++k) {
    const double d = product_distance(ta.states[k], tb.states[k]);
    double dw = std::numeric_limits<double>::quiet_NaN();
    if (ta.states[k].atom_count() + tb.states[k].atom_count() <= kWeakDistanceAtomCap) {
      dw = weak_distance(ta.states[k], tb.states[k]);
    }
    c.times.push_back(ta.times[k]);
    c.d.push_back(d);
    c.d_w.push_back(dw);
    if (d > c.d0 * (1.0 + slack) + 1e-12) c.contraction_holds = false;
    if (c.d0 > 0.0) c.max_ratio = std::max(c.max_ratio, d / c.d0);
  }
  return c;
}

void write_comparison(const std::filesystem::path& dir, const ComparisonResult& c, double slack) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());
  std::ostringstream out;
  csv::write_row(out, {"t", "d", "d_w"});
  for (std::size_t k = 0; k < c.times.size(); ++k) {
    csv::write_row(out, {fmt(c.times[k]), fmt(c.d[k]), std::isnan(c.d_w[k]) ? "" : fmt(c.d_w[k])});
  }
  write_file_atomic(dir / "distance.csv", out.str());
  json j;
  j["schema"] = 1;
  j["d0"] = c.d0;
  j["max_d"] = *std::max_element(c.d.begin(), c.d.end());
  j["max_ratio"] = c.max_ratio;
  j["slack"] = slack;
  j["contraction_holds"] = c.contraction_holds;
  write_file_atomic(dir / "comparison.json", j.dump(2) + "\n");
}

ProfileState read_trajectory_state(const std::filesystem::path& trajectory_csv, const LabelGrid& grid, double t) {
  std::ifstream in(trajectory_csv, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read '" + trajectory_csv.string() + "'");
  const auto rows = csv::read(in);
  if (rows.empty()) throw Error(ErrorKind::Io, "'" + trajectory_csv.string() + "' is empty");
  const auto& h = rows[0];
  const std::size_t ct = csv::column(h, "t"), ci = csv::column(h, "label_index"), cx = csv::column(h, "x"),
                    cw = csv::column(h, "weight");
  std::vector<double> times;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;
    const double tr = csv::parse_double(rows[r].at(ct));
    if (times.empty() || times.back() != tr) times.push_back(tr);
  }
  if (times.empty()) throw Error(ErrorKind::Io, "trajectory has no rows");
  if (!(t >= 0.0) || t > times.back() * (1.0 + 1e-12)) {
    throw Error(ErrorKind::OutOfRange, "time outside the recorded range [0, " + fmt(times.back()) + "]");
  }
  double chosen = times.front();
  if (t > 0.0) {
    chosen = times.back();
    for (double tr : times) {
      if (tr >= t - 1e-12 * std::max(1.0, t)) {
        chosen = tr;
        break;
      }
    }
  }
  std::vector<std::vector<Atom>> atoms(grid.size());
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() == 1 && rows[r][0].empty()) continue;
    if (csv::parse_double(rows[r].at(ct)) != chosen) continue;
    const double li = csv::parse_double(rows[r].at(ci));
    if (!(li >= 0.0) || li >= static_cast<double>(grid.size())) {
      throw Error(ErrorKind::GridMismatch, "trajectory label index outside grid.csv");
    }
    atoms[static_cast<std::size_t>(li)].push_back({csv::parse_double(rows[r].at(cx)), csv::parse_double(rows[r].at(cw))});
  }
  ProfileState s;
  s.grid = grid;
  for (auto& a : atoms) s.species.emplace_back(std::move(a));
  s.support_radius = s.max_abs_position();
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::GridMismatch, std::string("trajectory does not match grid.csv: ") + e.what());
  }
  return s;
}

}  // namespace granuflow
