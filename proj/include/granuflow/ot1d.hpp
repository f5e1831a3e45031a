#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace granuflow {

struct Atom {
  double position;
  double weight;
};

/// Finite nonnegative measure on the line, stored as atoms sorted by
/// position. Zero-weight atoms are dropped on construction. Several atoms may
/// share a position (particle representations need this); `canonical()`
/// merges them.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  explicit DiscreteMeasure(std::vector<Atom> atoms);
  DiscreteMeasure(std::span<const double> positions, std::span<const double> weights);

  static DiscreteMeasure dirac(double position, double mass = 1.0);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  double total_mass() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  /// Running sums: cumulative()[k] is the mass of atoms 0..k.
  std::span<const double> cumulative() const noexcept { return cumulative_; }

  std::vector<double> positions() const;
  std::vector<double> weights() const;

  DiscreteMeasure canonical() const;
  bool is_canonical() const noexcept;
  DiscreteMeasure scaled(double factor) const;

 private:
  void finish();

  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

struct CouplingEntry {
  std::size_t source;
  std::size_t target;
  double mass;
};

struct Coupling {
  std::vector<CouplingEntry> pairs;
};

/// Throws MassMismatch unless |a - b| <= 1e-9 * max(1, a).
void require_equal_mass(double a, double b);

/// The co-monotone (quantile) coupling. Indices refer to the atoms of `mu`
/// and `nu` as stored.
Coupling monotone_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Sum of mass * |x - y|^p over the pairs of `plan`.
double coupling_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Coupling& plan,
                     double p);

/// W_p with the unnormalized convention W_p^p = inf over plans of the
/// p-cost, so that W_2^2(nu, theta) = h W_2^2(nu/h, theta/h) for mass h.
double wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p);

inline constexpr std::size_t kBruteForceAtomCap = 10;

/// Transport LP solved without the monotone structure. Test oracle only.
double brute_force_wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p);

}  // namespace granuflow
