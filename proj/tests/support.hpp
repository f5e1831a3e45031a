#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "granuflow/measures.hpp"

namespace testing {

using granuflow::Atom;
using granuflow::DiscreteMeasure;
using granuflow::LabelGrid;
using granuflow::ProfileState;

inline ProfileState single_label(double a, std::vector<Atom> atoms, double radius = 10.0) {
  ProfileState s;
  double mass = 0.0;
  for (const Atom& at : atoms) mass += at.weight;
  s.grid = LabelGrid::counting({a}, {mass});
  s.species.emplace_back(std::move(atoms));
  s.support_radius = radius;
  return s;
}

inline ProfileState counting_state(std::vector<double> labels, std::vector<std::vector<Atom>> species,
                                   double radius = 10.0) {
  ProfileState s;
  std::vector<double> masses;
  for (auto& sp : species) {
    double m = 0.0;
    for (const Atom& at : sp) m += at.weight;
    masses.push_back(m);
    s.species.emplace_back(std::move(sp));
  }
  s.grid = LabelGrid::counting(std::move(labels), std::move(masses));
  s.support_radius = radius;
  return s;
}

/// Equal-weight species with `m` atoms per label, labels spread in
/// [lo, hi], masses random; positions uniform in [-r, r].
inline ProfileState equal_weight_state(std::mt19937_64& rng, std::size_t n, std::size_t m, double r,
                                       double lo = -1.0, double hi = 2.0) {
  std::uniform_real_distribution<double> pos(-r, r), w(0.2, 1.0), jitter(0.0, 1.0);
  std::vector<double> labels(n), masses(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.25 + 0.5 * jitter(rng)) / static_cast<double>(n);
    total += masses[i] = w(rng);
  }
  std::vector<std::vector<Atom>> species(n);
  for (std::size_t i = 0; i < n; ++i) {
    masses[i] /= total;
    for (std::size_t j = 0; j < m; ++j) species[i].push_back({pos(rng), masses[i] / static_cast<double>(m)});
  }
  return counting_state(labels, species, r);
}

/// W1 as the integral of |F - G| over the line: an oracle that shares
/// nothing with the coupling construction.
inline double w1_by_cdf(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  std::vector<double> xs;
  for (const Atom& at : a.atoms()) xs.push_back(at.position);
  for (const Atom& at : b.atoms()) xs.push_back(at.position);
  std::sort(xs.begin(), xs.end());
  auto cdf = [](const DiscreteMeasure& m, double x) {
    double s = 0.0;
    for (const Atom& at : m.atoms()) s += at.position <= x ? at.weight : 0.0;
    return s;
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) total += std::abs(cdf(a, xs[k]) - cdf(b, xs[k])) * (xs[k + 1] - xs[k]);
  return total;
}

}  // namespace testing
