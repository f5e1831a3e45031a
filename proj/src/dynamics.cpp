#include "granuflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "granuflow/energy.hpp"
#include "granuflow/error.hpp"

namespace granuflow {

namespace {

std::size_t steps_for(double horizon, double dt) {
  return static_cast<std::size_t>(std::llround(std::ceil(horizon / dt - 1e-9)));
}

// Midpoint CDF at every particle, given positions and masses in any order.
void midpoint_cdf_at(const std::vector<double>& x, const std::vector<double>& m, double total,
                     std::vector<std::size_t>& order, std::vector<double>& out) {
  order.resize(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return x[p] < x[q]; });
  out.resize(x.size());
  double before = 0.0;
  std::size_t k = 0;
  while (k < order.size()) {
    std::size_t e = k;
    double group = 0.0;
    while (e < order.size() && x[order[e]] == x[order[k]]) group += m[order[e++]];
    const double g = (before + 0.5 * group) / total;
    for (std::size_t r = k; r < e; ++r) out[order[r]] = g;
    before += group;
    k = e;
  }
}

}  // namespace

void CharacteristicsConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(horizon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be nonnegative");
  if (record_every == 0) throw Error(ErrorKind::InvalidArgument, "record_every must be positive");
}

void SecondOrderConfig::validate() const {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(horizon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "horizon must be nonnegative");
  if (record_every == 0) throw Error(ErrorKind::InvalidArgument, "record_every must be positive");
  if (!(bandwidth >= 0.0)) throw Error(ErrorKind::InvalidArgument, "bandwidth must be nonnegative");
}

CharacteristicsRun integrate_characteristics(const ProfileState& s0, const CharacteristicsConfig& cfg) {
  cfg.validate();
  s0.validate();
  const std::size_t labels = s0.species.size();
  std::vector<double> x, m, a;
  std::vector<std::size_t> label_of, first_of(labels + 1, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < labels; ++i) {
    first_of[i] = x.size();
    for (const Atom& at : s0.species[i].atoms()) {
      x.push_back(at.position);
      m.push_back(s0.grid.quad_weights[i] * at.weight);
      a.push_back(s0.grid.labels[i]);
      label_of.push_back(i);
      total += m.back();
    }
  }
  first_of[labels] = x.size();

  // Same-label neighbours that start apart; meeting or swapping is a shock.
  std::vector<std::size_t> watched;
  for (std::size_t i = 0; i < labels; ++i) {
    for (std::size_t p = first_of[i]; p + 1 < first_of[i + 1]; ++p) {
      if (x[p + 1] - x[p] > 1e-12) watched.push_back(p);
    }
  }

  auto snapshot = [&]() {
    ProfileState s;
    s.grid = s0.grid;
    s.support_radius = s0.support_radius;
    for (std::size_t i = 0; i < labels; ++i) {
      std::vector<Atom> atoms;
      for (std::size_t p = first_of[i]; p < first_of[i + 1]; ++p) atoms.push_back({x[p], s0.species[i][p - first_of[i]].weight});
      s.species.emplace_back(std::move(atoms));
    }
    double reach = s.max_abs_position();
    if (reach > s.support_radius) s.support_radius = reach;
    return s;
  };

  CharacteristicsRun out;
  Trajectory& traj = out.trajectory;
  traj.tau = cfg.dt * static_cast<double>(cfg.record_every);
  traj.horizon = cfg.horizon;
  auto record = [&](double t) {
    ProfileState s = snapshot();
    if (!traj.states.empty()) traj.step_distances.push_back(product_distance(s, traj.states.back()));
    traj.times.push_back(t);
    traj.velocities.push_back(select_velocity(s));
    traj.energies.push_back(energy(s));
    traj.states.push_back(std::move(s));
  };
  record(0.0);

  const std::size_t steps = steps_for(cfg.horizon, cfg.dt);
  std::vector<std::size_t> order;
  std::vector<double> g;
  for (std::size_t n = 1; n <= steps; ++n) {
    midpoint_cdf_at(x, m, total, order, g);
    for (std::size_t p = 0; p < x.size(); ++p) x[p] += cfg.dt * (a[p] - g[p]);
    const double t = static_cast<double>(n) * cfg.dt;
    if (!out.shock_time) {
      for (std::size_t p : watched) {
        if (x[p + 1] - x[p] <= 1e-12) {
          out.shock_time = t;
          break;
        }
      }
    }
    if (n % cfg.record_every == 0 || n == steps) record(t);
  }
  return out;
}

double first_integral_residual(const Trajectory& traj) {
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.states.size() && k < traj.velocities.size(); ++k) {
    const ProfileState& s = traj.states[k];
    const DiscreteMeasure rho = marginal_rho(s);
    for (std::size_t i = 0; i < s.species.size(); ++i) {
      for (std::size_t j = 0; j < s.species[i].size(); ++j) {
        const double r = traj.velocities[k][i][j] + midpoint_cdf(rho, s.species[i][j].position) - s.grid.labels[i];
        worst = std::max(worst, std::abs(r));
      }
    }
  }
  return worst;
}

double triangular_kernel_cdf(double z, double h) noexcept {
  if (z <= -h) return 0.0;
  if (z >= h) return 1.0;
  const double u = z / h;
  return u <= 0.0 ? 0.5 * (1.0 + u) * (1.0 + u) : 1.0 - 0.5 * (1.0 - u) * (1.0 - u);
}

namespace {

// Sum over q != p of w_q K(X_p - X_q) (V_q - V_p), triangular K of half-width h.
void relaxation_rates(const std::vector<double>& x, const std::vector<double>& v, const std::vector<double>& w,
                      double h, std::vector<std::size_t>& order, std::vector<double>& out) {
  const std::size_t n = x.size();
  order.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return x[p] < x[q] || (x[p] == x[q] && p < q); });
  out.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t p = order[r];
    for (std::size_t s = r + 1; s < n; ++s) {
      const std::size_t q = order[s];
      const double dz = x[q] - x[p];
      if (dz >= h) break;
      const double k = w[p] * w[q] * (1.0 - dz / h) / h;
      const double dv = v[q] - v[p];
      out[p] += k * dv / w[p];
      out[q] -= k * dv / w[q];
    }
  }
}

double smoothed_cdf(const std::vector<double>& x, const std::vector<double>& w, double h, double at) {
  double g = 0.0;
  for (std::size_t q = 0; q < x.size(); ++q) g += w[q] * triangular_kernel_cdf(at - x[q], h);
  return g;
}

}  // namespace

SecondOrderRun integrate_second_order(const KineticCloud& f0, const SecondOrderConfig& cfg) {
  cfg.validate();
  if (f0.samples.empty()) throw Error(ErrorKind::EmptyCloud, "no samples");
  SecondOrderRun run;
  const std::size_t n = f0.samples.size();
  run.bandwidth = cfg.bandwidth > 0.0 ? cfg.bandwidth
                                      : 2.0 * f0.radius_x / std::sqrt(static_cast<double>(n));
  if (!(run.bandwidth > 0.0)) run.bandwidth = 2.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> x(n), v(n);
  run.weights.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    x[p] = f0.samples[p].x;
    v[p] = f0.samples[p].v;
    run.weights[p] = f0.samples[p].weight;
  }
  auto record = [&](double t) {
    run.times.push_back(t);
    run.positions.push_back(x);
    run.velocities.push_back(v);
  };
  record(0.0);
  const std::size_t steps = steps_for(cfg.horizon, cfg.dt);
  std::vector<std::size_t> order;
  std::vector<double> rate;
  for (std::size_t k = 1; k <= steps; ++k) {
    relaxation_rates(x, v, run.weights, run.bandwidth, order, rate);
    for (std::size_t p = 0; p < n; ++p) {
      x[p] += cfg.dt * v[p];
      v[p] += cfg.dt * rate[p];
    }
    if (k % cfg.record_every == 0 || k == steps) record(static_cast<double>(k) * cfg.dt);
  }
  return run;
}

double first_integral_residual(const SecondOrderRun& run) {
  if (run.times.empty()) return 0.0;
  const std::vector<double>& x0 = run.positions.front();
  const std::vector<double>& v0 = run.velocities.front();
  std::vector<double> invariant(x0.size());
  for (std::size_t p = 0; p < x0.size(); ++p) invariant[p] = v0[p] + smoothed_cdf(x0, run.weights, run.bandwidth, x0[p]);
  double worst = 0.0;
  for (std::size_t k = 1; k < run.times.size(); ++k) {
    const auto& x = run.positions[k];
    const auto& v = run.velocities[k];
    for (std::size_t p = 0; p < x.size(); ++p) {
      const double r = v[p] + smoothed_cdf(x, run.weights, run.bandwidth, x[p]) - invariant[p];
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

ProfileState induced_profile(const SecondOrderRun& run, std::size_t record, const ProfileState& reference) {
  if (record >= run.times.size()) throw Error(ErrorKind::OutOfRange, "record index past the end of the run");
  const auto& x = run.positions[record];
  if (x.size() != reference.atom_count()) {
    throw Error(ErrorKind::InvalidArgument, "run and reference have different particle counts");
  }
  ProfileState s;
  s.grid = reference.grid;
  std::size_t p = 0;
  for (const auto& sp : reference.species) {
    std::vector<Atom> atoms;
    for (const Atom& at : sp.atoms()) atoms.push_back({x[p++], at.weight});
    s.species.emplace_back(std::move(atoms));
  }
  s.support_radius = std::max(reference.support_radius, s.max_abs_position());
  return s;
}

void BurgersState::validate() const {
  if (nodes.size() < 2) throw Error(ErrorKind::InvalidArgument, "Burgers grid needs at least two nodes");
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    if (!(nodes[k] > nodes[k - 1])) throw Error(ErrorKind::InvalidArgument, "Burgers nodes must increase");
  }
  if (labels.size() != cdf.size() || masses.size() != cdf.size()) {
    throw Error(ErrorKind::InvalidArgument, "Burgers label arrays disagree in length");
  }
  for (const auto& g : cdf) {
    if (g.size() != nodes.size()) throw Error(ErrorKind::InvalidArgument, "Burgers values do not match the grid");
  }
}

BurgersState burgers_initial(const LabelGrid& grid, std::vector<double> nodes,
                             const std::function<double(std::size_t, double)>& cdf) {
  grid.validate();
  BurgersState b;
  b.nodes = std::move(nodes);
  b.labels = grid.labels;
  for (std::size_t i = 0; i < grid.size(); ++i) b.masses.push_back(grid.masses[i] * grid.quad_weights[i]);
  b.cdf.assign(grid.size(), std::vector<double>(b.nodes.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = 0; k < b.nodes.size(); ++k) b.cdf[i][k] = cdf(i, b.nodes[k]);
  }
  b.monotone.assign(grid.size(), 1);
  b.validate();
  return b;
}

BurgersState burgers_from_profile(const ProfileState& s, std::vector<double> nodes) {
  // Linear through (x_j, midpoint cumulative mass), ramping from 0 one cell
  // left of the first atom to the full mass one cell right of the last.
  const double cell = nodes.size() > 1 ? nodes[1] - nodes[0] : 1.0;
  std::vector<std::vector<double>> px(s.species.size()), py(s.species.size());
  for (std::size_t i = 0; i < s.species.size(); ++i) {
    const DiscreteMeasure merged = s.species[i].canonical();
    if (merged.empty()) continue;
    const double mu = s.grid.quad_weights[i];
    px[i].push_back(merged[0].position - cell);
    py[i].push_back(0.0);
    double before = 0.0;
    for (const Atom& a : merged.atoms()) {
      px[i].push_back(a.position);
      py[i].push_back(mu * (before + 0.5 * a.weight));
      before += a.weight;
    }
    px[i].push_back(merged[merged.size() - 1].position + cell);
    py[i].push_back(mu * before);
  }
  return burgers_initial(s.grid, std::move(nodes), [&](std::size_t i, double x) {
    const auto& xs = px[i];
    if (xs.empty() || x <= xs.front()) return 0.0;
    if (x >= xs.back()) return py[i].back();
    const auto k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
    const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return py[i][k - 1] + t * (py[i][k] - py[i][k - 1]);
  });
}

double burgers_max_speed(const BurgersState& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < b.nodes.size(); ++k) {
    double sum = 0.0;
    for (const auto& g : b.cdf) sum += g[k];
    for (double a : b.labels) worst = std::max(worst, std::abs(a - sum));
  }
  return worst;
}

BurgersState burgers_step(const BurgersState& b, double dt) {
  b.validate();
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  const std::size_t nodes = b.nodes.size();
  std::vector<double> total(nodes, 0.0);
  for (const auto& g : b.cdf) {
    for (std::size_t k = 0; k < nodes; ++k) total[k] += g[k];
  }
  double min_cell = b.nodes[1] - b.nodes[0];
  for (std::size_t k = 1; k < nodes; ++k) min_cell = std::min(min_cell, b.nodes[k] - b.nodes[k - 1]);
  if (dt * burgers_max_speed(b) > min_cell * (1.0 + 1e-12)) {
    throw Error(ErrorKind::CflViolation, "dt * max speed exceeds the cell width");
  }

  BurgersState next = b;
  next.time = b.time + dt;
  for (std::size_t i = 0; i < b.label_count(); ++i) {
    const auto& g = b.cdf[i];
    auto& out = next.cdf[i];
    for (std::size_t k = 0; k < nodes; ++k) {
      const double u = b.labels[i] - total[k];
      double slope;
      if (u > 0.0) {
        const double left = k == 0 ? 0.0 : g[k - 1];
        const double dx = k == 0 ? b.nodes[1] - b.nodes[0] : b.nodes[k] - b.nodes[k - 1];
        slope = (g[k] - left) / dx;
      } else {
        const double right = k + 1 == nodes ? b.masses[i] : g[k + 1];
        const double dx = k + 1 == nodes ? b.nodes[k] - b.nodes[k - 1] : b.nodes[k + 1] - b.nodes[k];
        slope = (right - g[k]) / dx;
      }
      out[k] = std::clamp(g[k] - dt * u * slope, 0.0, b.masses[i]);
    }
    next.monotone[i] = b.monotone[i] && std::is_sorted(out.begin(), out.end());
  }
  return next;
}

std::vector<double> burgers_quantiles(const BurgersState& b, std::size_t label, const std::vector<double>& levels) {
  if (label >= b.label_count()) throw Error(ErrorKind::OutOfRange, "label index out of range");
  const auto& g = b.cdf[label];
  std::vector<double> out;
  out.reserve(levels.size());
  for (double level : levels) {
    const auto it = std::lower_bound(g.begin(), g.end(), level);
    if (it == g.end()) {
      out.push_back(b.nodes.back());
      continue;
    }
    const auto k = static_cast<std::size_t>(it - g.begin());
    if (k == 0 || g[k] == g[k - 1]) {
      out.push_back(b.nodes[k]);
      continue;
    }
    const double s = (level - g[k - 1]) / (g[k] - g[k - 1]);
    out.push_back(b.nodes[k - 1] + s * (b.nodes[k] - b.nodes[k - 1]));
  }
  return out;
}

BurgersRun run_burgers(BurgersState b, double horizon, double cfl, std::size_t markers, bool stop_at_shock) {
  b.validate();
  if (!(cfl > 0.0 && cfl <= 1.0)) throw Error(ErrorKind::InvalidArgument, "CFL number must lie in (0, 1]");
  if (markers < 2) throw Error(ErrorKind::InvalidArgument, "need at least two markers");
  double min_cell = b.nodes[1] - b.nodes[0];
  for (std::size_t k = 1; k < b.nodes.size(); ++k) min_cell = std::min(min_cell, b.nodes[k] - b.nodes[k - 1]);

  std::vector<std::vector<double>> levels(b.label_count());
  for (std::size_t i = 0; i < b.label_count(); ++i) {
    for (std::size_t k = 0; k < markers; ++k) {
      levels[i].push_back((static_cast<double>(k) + 0.5) / static_cast<double>(markers) * b.masses[i]);
    }
  }
  auto compressed = [&](const BurgersState& s) {
    for (std::size_t i = 0; i < s.label_count(); ++i) {
      if (!(s.masses[i] > 0.0)) continue;
      if (!s.monotone[i]) return true;
      const auto q = burgers_quantiles(s, i, levels[i]);
      for (std::size_t k = 1; k < q.size(); ++k) {
        if (q[k] - q[k - 1] < min_cell / 8.0) return true;
      }
    }
    return false;
  };

  BurgersRun run;
  const double start = b.time;
  while (b.time < start + horizon - 1e-12) {
    const double speed = burgers_max_speed(b);
    double dt = speed > 0.0 ? cfl * min_cell / speed : start + horizon - b.time;
    dt = std::min(dt, start + horizon - b.time);
    b = burgers_step(b, dt);
    ++run.steps;
    if (!run.shock_time && compressed(b)) {
      run.shock_time = b.time;
      if (stop_at_shock) break;
    }
  }
  run.final_state = std::move(b);
  return run;
}

double shock_time_bound(double x1, double x2, double nu_lower, std::size_t n,
                        const std::function<double(double)>& g0) {
  if (!(x1 < x2)) throw Error(ErrorKind::InvalidInterval, "need x1 < x2");
  if (!(nu_lower > 0.0) || n == 0) throw Error(ErrorKind::InvalidArgument, "need nu_lower > 0 and N >= 1");
  const double y1 = g0(x1) / static_cast<double>(n);
  const double y2 = g0(x2) / static_cast<double>(n);
  if (!(y1 < y2)) throw Error(ErrorKind::InvalidInterval, "G0 does not increase on [x1, x2]");
  const double bound = (x2 - x1) / (y2 - y1);
  if (bound > static_cast<double>(n) / nu_lower * (1.0 + 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "density drops below nu_lower on [x1, x2]");
  }
  return bound;
}

}  // namespace granuflow
