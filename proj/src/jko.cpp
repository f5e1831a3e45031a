#include "granuflow/jko.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "granuflow/error.hpp"

namespace granuflow {

double JkoConfig::support_radius() const noexcept {
  return radius_x + (horizon + tau) * (radius_v + 1.5);
}

double JkoConfig::running_radius(std::size_t steps) const noexcept {
  return radius_x + static_cast<double>(steps) * tau * (radius_v + 1.5);
}

std::size_t JkoConfig::step_count() const noexcept {
  return static_cast<std::size_t>(std::floor(horizon / tau + 1e-9));
}

void JkoConfig::validate() const {
  if (!(tau > 0.0) || !(horizon > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau and T must be positive");
  if (!(radius_x >= 0.0) || !(radius_v >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "support box radii must be nonnegative");
  }
  if (!(solver_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "solver_tol must be positive");
}

ProfileState project_support(const ProfileState& s, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "projection radius must be positive");
  ProfileState out;
  out.grid = s.grid;
  out.support_radius = std::min(s.support_radius, radius);
  if (out.support_radius <= 0.0) out.support_radius = radius;
  for (const auto& sp : s.species) {
    std::vector<Atom> atoms(sp.atoms().begin(), sp.atoms().end());
    for (Atom& a : atoms) a.position = std::clamp(a.position, -radius, radius);
    out.species.emplace_back(std::move(atoms));
  }
  return out;
}

double jko_objective(const ProfileState& candidate, const ProfileState& prev, double tau) {
  const double d = product_distance(candidate, prev);
  return d * d / (2.0 * tau) + energy(candidate).total;
}

namespace {

struct Particle {
  std::size_t label;
  std::size_t atom;
  double x;
  double mass;
  double order_key;
  double target;
};

// Weighted pool-adjacent-violators: nondecreasing fit to `targets`.
std::vector<double> isotonic_fit(const std::vector<double>& targets, const std::vector<double>& weights) {
  struct Block {
    double weight;
    double weighted_sum;
    std::size_t count;
    double value() const { return weighted_sum / weight; }
  };
  std::vector<Block> blocks;
  blocks.reserve(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    blocks.push_back({weights[k], weights[k] * targets[k], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value() >= blocks.back().value()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().weight += top.weight;
      blocks.back().weighted_sum += top.weighted_sum;
      blocks.back().count += top.count;
    }
  }
  std::vector<double> fit;
  fit.reserve(targets.size());
  for (const Block& b : blocks) fit.insert(fit.end(), b.count, b.value());
  return fit;
}

}  // namespace

JkoStep jko_step(const ProfileState& prev, double tau, double radius, double certificate_tol) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be positive");
  const std::size_t labels = prev.species.size();

  // Lagrangian particles m_p = mu_i w_ij. The minimizer keeps the order of
  // b_p = x_p + tau (a_p - 1/2); in that order the interaction term is linear
  // and the problem is a weighted isotonic regression of
  // t_p = x_p + tau (a_p - G_mid(p)), G_mid(p) = mass before p + m_p / 2.
  std::vector<Particle> ps;
  ps.reserve(prev.atom_count());
  double total_mass = 0.0;
  for (std::size_t i = 0; i < labels; ++i) {
    const double a = prev.grid.labels[i];
    for (std::size_t j = 0; j < prev.species[i].size(); ++j) {
      const Atom& at = prev.species[i][j];
      const double m = prev.grid.quad_weights[i] * at.weight;
      ps.push_back({i, j, at.position, m, at.position + tau * (a - 0.5), 0.0});
      total_mass += m;
    }
  }
  std::stable_sort(ps.begin(), ps.end(),
                   [](const Particle& p, const Particle& q) { return p.order_key < q.order_key; });
  double before = 0.0;
  std::vector<double> targets(ps.size()), weights(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const double g_mid = (before + 0.5 * ps[k].mass) / total_mass;
    before += ps[k].mass;
    targets[k] = ps[k].x + tau * (prev.grid.labels[ps[k].label] - g_mid);
    weights[k] = ps[k].mass;
  }
  const std::vector<double> fit = isotonic_fit(targets, weights);

  std::vector<std::vector<Atom>> moved(labels);
  std::vector<std::vector<char>> clamped(labels);
  for (std::size_t i = 0; i < labels; ++i) {
    moved[i].resize(prev.species[i].size());
    clamped[i].assign(prev.species[i].size(), 0);
  }
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const Particle& p = ps[k];
    const double y = std::clamp(fit[k], -radius, radius);
    if (!std::isfinite(fit[k])) {
      throw Error(ErrorKind::SolverDiverged, "non-finite particle position");
    }
    clamped[p.label][p.atom] = y != fit[k];
    moved[p.label][p.atom] = {y, prev.species[p.label][p.atom].weight};
  }

  JkoStep step;
  step.next.grid = prev.grid;
  step.next.support_radius = radius;
  step.velocity.resize(labels);
  for (std::size_t i = 0; i < labels; ++i) {
    step.next.species.emplace_back(std::move(moved[i]));
    const auto& from = prev.species[i];
    const auto& to = step.next.species[i];
    // Discrete velocity (y - barycenter of the preimage) / tau.
    std::vector<double> pre_moment(to.size(), 0.0);
    std::vector<double> pre_mass(to.size(), 0.0);
    if (!from.empty()) {
      for (const CouplingEntry& e : monotone_coupling(from, to).pairs) {
        pre_moment[e.target] += e.mass * from[e.source].position;
        pre_mass[e.target] += e.mass;
      }
    }
    step.velocity[i].resize(to.size());
    for (std::size_t j = 0; j < to.size(); ++j) {
      const double bary = pre_mass[j] > 0.0 ? pre_moment[j] / pre_mass[j] : to[j].position;
      step.velocity[i][j] = (to[j].position - bary) / tau;
    }
  }

  // Certificate: the discrete velocity must sit in the subgradient bracket.
  const DiscreteMeasure rho = marginal_rho(step.next);
  for (std::size_t i = 0; i < labels; ++i) {
    for (std::size_t j = 0; j < step.next.species[i].size(); ++j) {
      if (clamped[i][j]) continue;
      const VelocityBracket b = velocity_bracket(step.next, rho, i, j);
      const double v = step.velocity[i][j];
      step.certificate_slack = std::max({step.certificate_slack, b.lo - v, v - b.hi});
    }
  }
  if (!(step.certificate_slack <= certificate_tol)) {
    throw Error(ErrorKind::SolverDiverged,
                "optimality certificate failed by " + std::to_string(step.certificate_slack));
  }
  return step;
}

JkoStep jko_step(const ProfileState& prev, const JkoConfig& cfg, std::size_t step_index) {
  try {
    return jko_step(prev, cfg.tau, cfg.running_radius(step_index + 1), 10.0 * cfg.solver_tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::SolverDiverged) throw;
    throw Error(ErrorKind::SolverDiverged, "step " + std::to_string(step_index) + ": " + e.what());
  }
}

Trajectory run(const ProfileState& initial, const JkoConfig& cfg) {
  cfg.validate();
  initial.validate();
  if (!initial.grid.labels_within(cfg.radius_v)) {
    throw Error(ErrorKind::InvalidArgument, "labels must lie in [-R_v, R_v + 1]");
  }
  if (initial.max_abs_position() > cfg.radius_x * (1.0 + 1e-12) + 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "initial state must be supported in [-R_x, R_x]");
  }

  ProfileState start = cfg.particles_per_label > 0 ? requantize(initial, cfg.particles_per_label) : initial;
  start.support_radius = cfg.support_radius();

  Trajectory traj;
  traj.tau = cfg.tau;
  traj.horizon = cfg.horizon;
  const std::size_t steps = cfg.step_count() + 1;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.times.push_back(0.0);
  traj.velocities.push_back(select_velocity(start));
  traj.energies.push_back(energy(start));
  traj.states.push_back(std::move(start));
  for (std::size_t k = 0; k < steps; ++k) {
    JkoStep step = jko_step(traj.states.back(), cfg, k);
    step.next.support_radius = cfg.support_radius();
    traj.step_distances.push_back(product_distance(step.next, traj.states.back()));
    traj.energies.push_back(energy(step.next));
    traj.velocities.push_back(std::move(step.velocity));
    traj.times.push_back(static_cast<double>(k + 1) * cfg.tau);
    traj.states.push_back(std::move(step.next));
  }
  return traj;
}

std::size_t interpolation_index(const Trajectory& traj, double t) {
  if (traj.states.empty()) throw Error(ErrorKind::OutOfRange, "empty trajectory");
  if (!(t >= 0.0) || t > traj.horizon * (1.0 + 1e-12)) {
    throw Error(ErrorKind::OutOfRange, "time outside [0, T]");
  }
  if (t == 0.0) return 0;
  const auto k = static_cast<std::size_t>(std::ceil(t / traj.tau - 1e-9));
  return std::min(k, traj.states.size() - 1);
}

const ProfileState& interpolate(const Trajectory& traj, double t) {
  return traj.states[interpolation_index(traj, t)];
}

}  // namespace granuflow
