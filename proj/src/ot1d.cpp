#include "granuflow/ot1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "granuflow/error.hpp"
#include "granuflow/transport_lp.hpp"

namespace granuflow {

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) { finish(); }

DiscreteMeasure::DiscreteMeasure(std::span<const double> positions, std::span<const double> weights) {
  if (positions.size() != weights.size()) {
    throw Error(ErrorKind::InvalidArgument, "positions and weights differ in length");
  }
  atoms_.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) atoms_.push_back({positions[i], weights[i]});
  finish();
}

DiscreteMeasure DiscreteMeasure::dirac(double position, double mass) {
  return DiscreteMeasure(std::vector<Atom>{{position, mass}});
}

void DiscreteMeasure::finish() {
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.position) || !std::isfinite(a.weight) || a.weight < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "atoms need finite positions and nonnegative weights");
    }
  }
  std::erase_if(atoms_, [](const Atom& a) { return a.weight == 0.0; });
  std::stable_sort(atoms_.begin(), atoms_.end(),
                   [](const Atom& a, const Atom& b) { return a.position < b.position; });
  cumulative_.resize(atoms_.size());
  double running = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    running += atoms_[i].weight;
    cumulative_[i] = running;
  }
}

std::vector<double> DiscreteMeasure::positions() const {
  std::vector<double> out;
  out.reserve(atoms_.size());
  for (const Atom& a : atoms_) out.push_back(a.position);
  return out;
}

std::vector<double> DiscreteMeasure::weights() const {
  std::vector<double> out;
  out.reserve(atoms_.size());
  for (const Atom& a : atoms_) out.push_back(a.weight);
  return out;
}

DiscreteMeasure DiscreteMeasure::canonical() const {
  std::vector<Atom> merged;
  for (const Atom& a : atoms_) {
    if (!merged.empty() && merged.back().position == a.position) {
      merged.back().weight += a.weight;
    } else {
      merged.push_back(a);
    }
  }
  return DiscreteMeasure(std::move(merged));
}

bool DiscreteMeasure::is_canonical() const noexcept {
  for (std::size_t i = 1; i < atoms_.size(); ++i) {
    if (!(atoms_[i - 1].position < atoms_[i].position)) return false;
  }
  return true;
}

DiscreteMeasure DiscreteMeasure::scaled(double factor) const {
  std::vector<Atom> out(atoms_.begin(), atoms_.end());
  for (Atom& a : out) a.weight *= factor;
  return DiscreteMeasure(std::move(out));
}

void require_equal_mass(double a, double b) {
  if (std::abs(a - b) > 1e-9 * std::max(1.0, std::max(a, b))) {
    throw Error(ErrorKind::MassMismatch,
                "total masses differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

namespace {

void require_nonempty(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.empty() || nu.empty()) throw Error(ErrorKind::EmptyMeasure, "measure has no atoms");
}

double pow_abs(double d, double p) {
  d = std::abs(d);
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

}  // namespace

Coupling monotone_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_nonempty(mu, nu);
  require_equal_mass(mu.total_mass(), nu.total_mass());

  // Merge the two cumulative sequences; each breakpoint closes one pair.
  // Slivers below `eps` come from rounding in the running sums.
  const auto cu = mu.cumulative();
  const auto cv = nu.cumulative();
  const double eps = 1e-14 * std::max(mu.total_mass(), nu.total_mass());
  Coupling plan;
  plan.pairs.reserve(mu.size() + nu.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double level = 0.0;
  while (i < mu.size() && j < nu.size()) {
    const bool last_i = i + 1 == mu.size();
    const bool last_j = j + 1 == nu.size();
    double next;
    bool advance_i;
    bool advance_j;
    if (last_i && last_j) {
      next = std::max(cu[i], cv[j]);
      advance_i = advance_j = true;
    } else if (last_i) {
      next = cv[j];
      advance_i = false;
      advance_j = true;
    } else if (last_j) {
      next = cu[i];
      advance_i = true;
      advance_j = false;
    } else {
      next = std::min(cu[i], cv[j]);
      advance_i = cu[i] - next <= eps;
      advance_j = cv[j] - next <= eps;
    }
    const double mass = next - level;
    if (mass > eps) {
      plan.pairs.push_back({i, j, mass});
      level = next;
    }
    if (advance_i) ++i;
    if (advance_j) ++j;
  }
  return plan;
}

double coupling_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Coupling& plan,
                     double p) {
  double total = 0.0;
  for (const CouplingEntry& e : plan.pairs) {
    total += e.mass * pow_abs(mu[e.source].position - nu[e.target].position, p);
  }
  return total;
}

double wasserstein_p(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p) {
  if (p != 1 && p != 2) throw Error(ErrorKind::InvalidArgument, "p must be 1 or 2");
  const double cost = coupling_cost(mu, nu, monotone_coupling(mu, nu), p);
  return p == 1 ? cost : std::sqrt(cost);
}

double brute_force_wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int p) {
  if (p != 1 && p != 2) throw Error(ErrorKind::InvalidArgument, "p must be 1 or 2");
  require_nonempty(mu, nu);
  if (mu.size() > kBruteForceAtomCap || nu.size() > kBruteForceAtomCap) {
    throw Error(ErrorKind::TooLarge, "brute-force transport is capped at " +
                                         std::to_string(kBruteForceAtomCap) + " atoms per measure");
  }
  require_equal_mass(mu.total_mass(), nu.total_mass());
  std::vector<double> supply = mu.weights();
  std::vector<double> demand = nu.weights();
  // Push the tiny mass discrepancy allowed by the precondition onto the
  // last demand so the LP stays balanced.
  demand.back() += mu.total_mass() - nu.total_mass();
  demand.back() = std::max(0.0, demand.back());
  std::vector<double> cost(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      cost[i * nu.size() + j] = pow_abs(mu[i].position - nu[j].position, p);
    }
  }
  const double value = solve_transport(supply, demand, cost).cost;
  return p == 1 ? value : std::sqrt(std::max(0.0, value));
}

}  // namespace granuflow
