#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "granuflow/ot1d.hpp"

namespace granuflow {

/// Label values a_i with quadrature weights mu_i and per-label masses h_i.
/// mu_i = 1 for counting measure, mu_i = bin width for Lebesgue quadrature.
struct LabelGrid {
  std::vector<double> labels;
  std::vector<double> quad_weights;
  std::vector<double> masses;

  std::size_t size() const noexcept { return labels.size(); }

  /// Counting-measure grid (mu_i = 1).
  static LabelGrid counting(std::vector<double> labels, std::vector<double> masses);

  /// Throws InvalidArgument on broken invariants (strictly increasing
  /// labels, mu_i > 0, h_i >= 0, sum h_i mu_i = 1 to 1e-9).
  void validate() const;

  /// Labels inside [-radius_v, radius_v + 1].
  bool labels_within(double radius_v, double tol = 1e-12) const;

  bool same_as(const LabelGrid& other, double tol = 1e-12) const;
};

/// One measure per label; species[i] has total mass grid.masses[i].
struct ProfileState {
  LabelGrid grid;
  std::vector<DiscreteMeasure> species;
  double support_radius = 0.0;

  std::size_t label_count() const noexcept { return species.size(); }
  std::size_t atom_count() const noexcept;
  double max_abs_position() const noexcept;

  /// Throws InvalidArgument unless per-label masses match h_i to 1e-9 and
  /// every atom lies in [-support_radius, support_radius].
  void validate() const;
};

struct PhaseSample {
  double x;
  double v;
  double weight;
};

/// Weighted phase-space samples summing to one, with the recorded support
/// box |x| <= radius_x, |v| <= radius_v.
struct KineticCloud {
  std::vector<PhaseSample> samples;
  double radius_x = 0.0;
  double radius_v = 0.0;

  /// Builds a cloud and records the tightest support box. Throws EmptyCloud
  /// on no samples, InvalidArgument on nonpositive weights or a total weight
  /// away from one by more than 1e-9.
  static KineticCloud from_samples(std::vector<PhaseSample> samples);

  DiscreteMeasure spatial_marginal() const;
};

struct CdfPair {
  double below;     // mass of (-inf, x)
  double at_most;   // mass of (-inf, x]
};

CdfPair cdf_pair(const DiscreteMeasure& m, double x);

/// (G(x) + G^-(x)) / 2, the convention used at atoms everywhere.
double midpoint_cdf(const DiscreteMeasure& m, double x);

/// Left-continuous generalized inverse: smallest atom position whose
/// cumulative mass reaches u. Throws OutOfRange unless 0 < u <= total mass.
double quantile(const DiscreteMeasure& m, double u);

/// rho = sum_i mu_i species[i], canonicalized.
DiscreteMeasure marginal_rho(const ProfileState& s);

/// Change of variables a = v + G0(x), binning into `label_count` labels.
ProfileState disintegrate_initial(const KineticCloud& f0, std::size_t label_count);

/// d = sqrt(sum_i mu_i W2^2(species1[i], species2[i])).
double product_distance(const ProfileState& s1, const ProfileState& s2);

inline constexpr std::size_t kWeakDistanceAtomCap = 1024;

/// W2 between the lifted measures on the (a, x) plane, solved as an exact
/// transport LP. Throws TooLarge above kWeakDistanceAtomCap combined atoms.
double weak_distance(const ProfileState& s1, const ProfileState& s2);

/// Per-label displacement interpolation along the monotone couplings:
/// species_eps = ((1 - eps) x + eps y)_# gamma.
ProfileState displacement_interpolate(const ProfileState& s1, const ProfileState& s2, double eps);

/// `count` equal-mass atoms at the midpoint quantiles (k + 1/2) / count of m.
DiscreteMeasure equal_mass_particles(const DiscreteMeasure& m, std::size_t count);

/// Replaces every species by `count` equal-mass particles.
ProfileState requantize(const ProfileState& s, std::size_t count);

void require_same_grid(const ProfileState& s1, const ProfileState& s2);

/// CSV with header `x,v,weight`.
KineticCloud read_cloud_csv(std::istream& in);
KineticCloud read_cloud_csv(const std::filesystem::path& path);

}  // namespace granuflow
