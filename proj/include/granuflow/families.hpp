#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "granuflow/measures.hpp"

namespace granuflow {

enum class Rho0 { Uniform, TruncatedQuadratic };

Rho0 parse_rho0(const std::string& name);
const char* to_string(Rho0 r) noexcept;

/// CDF of rho0 on [0, 1]: x for uniform, 3x^2 - 2x^3 for 6x(1 - x).
double rho0_cdf(Rho0 r, double x) noexcept;
double rho0_quantile(Rho0 r, double u);
/// inf of the density over [x1, x2].
double rho0_lower_bound(Rho0 r, double x1, double x2) noexcept;

/// rho0 (x) (1/N) sum_i delta_{a_i - G0(x)}: M particles at the quantiles
/// (m + 1/2)/M, each carrying all N labels with weight 1/(NM). Default labels
/// are a_i = (i + 1/2)/N.
KineticCloud discrete_labels_cloud(std::size_t n, Rho0 rho0, std::size_t m, std::vector<double> labels = {});
/// The same family disintegrated into a counting-measure ProfileState.
ProfileState discrete_labels_state(std::size_t n, Rho0 rho0, std::size_t m, std::vector<double> labels = {});

/// Independent clipped normals in x and v (sigma = R / 3), equal weights.
KineticCloud gaussian_box_cloud(double radius_x, double radius_v, std::size_t samples, std::uint64_t seed);

/// Random counting-measure state: n labels drawn in [label_lo, label_hi]
/// (kept distinct), random masses summing to one, m equal-weight atoms per
/// label with positions uniform in [-radius_x, radius_x].
ProfileState random_state(std::mt19937_64& rng, std::size_t n, std::size_t m, double radius_x,
                          double label_lo = -1.0, double label_hi = 1.0);

/// Fresh positions for every atom of `grid_from`, keeping its grid and weights.
ProfileState random_positions_like(std::mt19937_64& rng, const ProfileState& grid_from, double radius_x);

/// Random discrete measure with `atoms` atoms (positions in [lo, hi], weights
/// in [0.05, 1)) rescaled to total mass `mass`.
DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t atoms, double mass, double lo = -1.0,
                               double hi = 1.0);

}  // namespace granuflow
