#pragma once

#include <cstddef>
#include <vector>

#include "granuflow/energy.hpp"
#include "granuflow/measures.hpp"

namespace granuflow {

struct JkoConfig {
  double tau = 1e-2;
  double horizon = 1.0;
  double radius_x = 1.0;
  double radius_v = 1.0;
  /// Slack allowed in the subgradient-bracket certificate is 10 * solver_tol.
  double solver_tol = 1e-8;
  /// Kept for config compatibility; the isotonic step is direct.
  std::size_t max_inner_iters = 10000;
  /// When nonzero, `run` first replaces every species by this many
  /// equal-mass particles.
  std::size_t particles_per_label = 0;

  /// R = R_x + (T + tau)(R_v + 3/2).
  double support_radius() const noexcept;
  /// Radius of X_R admissible after `steps` steps: R_x + steps tau (R_v + 3/2).
  double running_radius(std::size_t steps) const noexcept;
  /// N = floor(T / tau).
  std::size_t step_count() const noexcept;
  void validate() const;
};

struct Trajectory {
  double tau = 0.0;
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<ProfileState> states;
  /// velocities[k] lives on states[k]. For k >= 1 it is the discrete
  /// velocity of the step into state k; velocities[0] is the bracket
  /// midpoint field of the initial state.
  std::vector<VelocityField> velocities;
  std::vector<EnergyReport> energies;
  /// step_distances[k] = d(states[k + 1], states[k]).
  std::vector<double> step_distances;
};

ProfileState project_support(const ProfileState& s, double radius);

struct JkoStep {
  ProfileState next;
  VelocityField velocity;
  /// Largest bracket violation of `velocity` at `next`.
  double certificate_slack = 0.0;
};

/// One minimizing step of (1/2tau) d^2(., prev) + J over particle positions
/// with weights fixed, inside [-running_radius(k + 1), running_radius(k + 1)].
JkoStep jko_step(const ProfileState& prev, const JkoConfig& cfg, std::size_t step_index);

/// Unconstrained-radius variant used by `jko_step`; exposed for tests.
JkoStep jko_step(const ProfileState& prev, double tau, double radius, double certificate_tol);

/// (1/2tau) d^2(candidate, prev) + J(candidate).
double jko_objective(const ProfileState& candidate, const ProfileState& prev, double tau);

/// States 0..N+1 with N = floor(T / tau).
Trajectory run(const ProfileState& initial, const JkoConfig& cfg);

/// Piecewise-constant, right-closed: state k on ((k - 1) tau, k tau].
const ProfileState& interpolate(const Trajectory& traj, double t);

/// Index selected by `interpolate`.
std::size_t interpolation_index(const Trajectory& traj, double t);

}  // namespace granuflow
