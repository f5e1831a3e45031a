#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "granuflow/jko.hpp"
#include "granuflow/measures.hpp"

namespace granuflow {

/// Explicit Euler on x' = a - G_mid(x), G_mid the midpoint CDF of the current rho.
struct CharacteristicsConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  /// A state is stored every `record_every` Euler steps (and at t = 0).
  std::size_t record_every = 1;
  void validate() const;
};

struct CharacteristicsRun {
  /// velocities[k] is the ODE velocity field a - G_mid at states[k].
  Trajectory trajectory;
  /// First time two particles of one label that started apart meet or
  /// swap. Integration carries on past it.
  std::optional<double> shock_time;
};

CharacteristicsRun integrate_characteristics(const ProfileState& s0, const CharacteristicsConfig& cfg);

/// max |v + G_mid(x) - a| over all recorded atoms, with v read from
/// traj.velocities. Zero up to rounding for label-ODE histories.
double first_integral_residual(const Trajectory& traj);

struct SecondOrderConfig {
  double dt = 1e-3;
  double horizon = 1.0;
  std::size_t record_every = 1;
  /// 0 selects 2 R_x / sqrt(sample count).
  double bandwidth = 0.0;
  void validate() const;
};

/// Particle solution of X' = V, V' = -rho(X) V + m(X) with rho, m estimated
/// by a triangular kernel over the other particles.
struct SecondOrderRun {
  double bandwidth = 0.0;
  std::vector<double> weights;
  std::vector<double> times;
  /// positions[k][p], velocities[k][p] at times[k]; p follows the sample
  /// order of the initial cloud.
  std::vector<std::vector<double>> positions;
  std::vector<std::vector<double>> velocities;
};

SecondOrderRun integrate_second_order(const KineticCloud& f0, const SecondOrderConfig& cfg);

/// max |V_t + G_t(X_t) - v_0 - G_0(x_0)| with G_t the kernel-smoothed CDF of
/// the particle cloud (self included), over all particles and records.
double first_integral_residual(const SecondOrderRun& run);

/// CDF of the triangular kernel of half-width h.
double triangular_kernel_cdf(double z, double h) noexcept;

/// Profile induced by record k, for a run started from reconstruct(reference):
/// sample p is atom j of label i in label-major order.
ProfileState induced_profile(const SecondOrderRun& run, std::size_t record, const ProfileState& reference);

/// Grid values G^i(x_m) of the cumulative distributions mu_i nu^i((-inf, x]).
struct BurgersState {
  std::vector<double> nodes;
  std::vector<double> labels;
  /// Right boundary value of each G^i (h_i mu_i).
  std::vector<double> masses;
  std::vector<std::vector<double>> cdf;
  std::vector<char> monotone;
  double time = 0.0;

  std::size_t label_count() const noexcept { return labels.size(); }
  void validate() const;
};

/// `cdf(i, x)` gives G^i(x).
BurgersState burgers_initial(const LabelGrid& grid, std::vector<double> nodes,
                             const std::function<double(std::size_t, double)>& cdf);
/// Piecewise-linear G^i through the midpoint cumulative masses of each
/// species, so particle data does not start out as a staircase.
BurgersState burgers_from_profile(const ProfileState& s, std::vector<double> nodes);

/// Largest |a_i - sum_j G^j| over nodes and labels.
double burgers_max_speed(const BurgersState& b);

/// First-order upwind step of d_t G^i + (a_i - sum_j G^j) d_x G^i = 0 with
/// ghost values 0 on the left and h_i mu_i on the right. Throws CflViolation
/// when dt max|speed| exceeds the smallest cell width.
BurgersState burgers_step(const BurgersState& b, double dt);

/// Positions where G^i reaches each level (linear between nodes).
std::vector<double> burgers_quantiles(const BurgersState& b, std::size_t label, const std::vector<double>& levels);

struct BurgersRun {
  BurgersState final_state;
  std::optional<double> shock_time;
  std::size_t steps = 0;
};

/// Steps to `horizon` at the given CFL number. A shock is flagged when two
/// of `markers` equally spaced quantile levels of one label come closer than
/// an eighth of a cell: on the grid the upwind solution stays monotone, so
/// collapse of the quantile map shows up as compression rather than swap.
BurgersRun run_burgers(BurgersState b, double horizon, double cfl = 0.5, std::size_t markers = 64,
                       bool stop_at_shock = true);

/// (x2 - x1) / (y2 - y1) with y = G0 / n. Throws InvalidInterval unless
/// x1 < x2 and y1 < y2, InvalidArgument if nu_lower <= 0, n == 0, or the
/// result exceeds n / nu_lower (density below nu_lower somewhere).
double shock_time_bound(double x1, double x2, double nu_lower, std::size_t n,
                        const std::function<double(double)>& g0);

}  // namespace granuflow
