#pragma once

#include <cstddef>
#include <vector>

#include "granuflow/measures.hpp"

namespace granuflow {

/// J = j0 / 4 + j1 with j0 the |x - y| interaction against rho (x) rho and
/// j1 = sum_i mu_i int (1/2 - a_i) x dnu^i.
struct EnergyReport {
  double j0 = 0.0;
  double j1 = 0.0;
  double total = 0.0;
};

/// velocity[i][j] belongs to atom j of species i.
using VelocityField = std::vector<std::vector<double>>;

struct VelocityBracket {
  double lo;
  double hi;
};

/// O(n log n): one sort of all atoms plus prefix sums.
EnergyReport energy(const ProfileState& s);

/// Direct double sum over atom pairs. Test oracle.
EnergyReport energy_pairwise(const ProfileState& s);

/// [a_i - G(x_ij), a_i - G^-(x_ij)] with G, G^- of `rho`.
VelocityBracket velocity_bracket(const ProfileState& s, const DiscreteMeasure& rho, std::size_t label,
                                 std::size_t atom);
VelocityBracket velocity_bracket(const ProfileState& s, std::size_t label, std::size_t atom);

/// Bracket midpoint a_i - (G + G^-)(x_ij) / 2.
VelocityField select_velocity(const ProfileState& s);

/// sum_i mu_i int (w1 - w2)(y - z) dgamma_i over the per-label monotone
/// couplings, with w = -v. Nonnegative for admissible velocity fields.
double monotonicity_gap(const ProfileState& s1, const ProfileState& s2, const VelocityField& v1,
                        const VelocityField& v2);

/// Largest amount by which `v` leaves the bracket at any atom of `s`
/// (0 when admissible).
double bracket_violation(const ProfileState& s, const VelocityField& v);

double max_abs(const VelocityField& v) noexcept;

}  // namespace granuflow
