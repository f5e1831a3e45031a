#include "granuflow/energy.hpp"

#include <algorithm>
#include <cmath>

#include "granuflow/error.hpp"

namespace granuflow {

namespace {

struct Particle {
  double x;
  double mass;
};

double linear_part(const ProfileState& s) {
  double j1 = 0.0;
  for (std::size_t i = 0; i < s.species.size(); ++i) {
    double moment = 0.0;
    for (const Atom& a : s.species[i].atoms()) moment += a.weight * a.position;
    j1 += s.grid.quad_weights[i] * (0.5 - s.grid.labels[i]) * moment;
  }
  return j1;
}

std::vector<Particle> lifted_particles(const ProfileState& s) {
  std::vector<Particle> ps;
  ps.reserve(s.atom_count());
  for (std::size_t i = 0; i < s.species.size(); ++i) {
    for (const Atom& a : s.species[i].atoms()) ps.push_back({a.position, s.grid.quad_weights[i] * a.weight});
  }
  return ps;
}

}  // namespace

EnergyReport energy(const ProfileState& s) {
  auto ps = lifted_particles(s);
  std::sort(ps.begin(), ps.end(), [](const Particle& p, const Particle& q) { return p.x < q.x; });
  // sum_{p,q} m_p m_q |x_p - x_q| = 2 sum_q m_q (x_q M_<q - S_<q).
  double mass_before = 0.0;
  double moment_before = 0.0;
  double j0 = 0.0;
  for (const Particle& p : ps) {
    j0 += p.mass * (p.x * mass_before - moment_before);
    mass_before += p.mass;
    moment_before += p.mass * p.x;
  }
  EnergyReport r;
  r.j0 = std::max(0.0, 2.0 * j0);
  r.j1 = linear_part(s);
  r.total = r.j0 / 4.0 + r.j1;
  return r;
}

EnergyReport energy_pairwise(const ProfileState& s) {
  const auto ps = lifted_particles(s);
  double j0 = 0.0;
  for (const Particle& p : ps) {
    for (const Particle& q : ps) j0 += p.mass * q.mass * std::abs(p.x - q.x);
  }
  EnergyReport r;
  r.j0 = j0;
  r.j1 = linear_part(s);
  r.total = r.j0 / 4.0 + r.j1;
  return r;
}

VelocityBracket velocity_bracket(const ProfileState& s, const DiscreteMeasure& rho, std::size_t label,
                                 std::size_t atom) {
  if (label >= s.species.size() || atom >= s.species[label].size()) {
    throw Error(ErrorKind::OutOfRange, "no such label/atom");
  }
  const double a = s.grid.labels[label];
  const CdfPair g = cdf_pair(rho, s.species[label][atom].position);
  return {a - g.at_most, a - g.below};
}

VelocityBracket velocity_bracket(const ProfileState& s, std::size_t label, std::size_t atom) {
  return velocity_bracket(s, marginal_rho(s), label, atom);
}

VelocityField select_velocity(const ProfileState& s) {
  const DiscreteMeasure rho = marginal_rho(s);
  VelocityField v(s.species.size());
  for (std::size_t i = 0; i < s.species.size(); ++i) {
    v[i].reserve(s.species[i].size());
    for (const Atom& at : s.species[i].atoms()) {
      v[i].push_back(s.grid.labels[i] - midpoint_cdf(rho, at.position));
    }
  }
  return v;
}

double monotonicity_gap(const ProfileState& s1, const ProfileState& s2, const VelocityField& v1,
                        const VelocityField& v2) {
  require_same_grid(s1, s2);
  if (v1.size() != s1.species.size() || v2.size() != s2.species.size()) {
    throw Error(ErrorKind::InvalidArgument, "velocity field does not match state");
  }
  double gap = 0.0;
  for (std::size_t i = 0; i < s1.species.size(); ++i) {
    const auto& a = s1.species[i];
    const auto& b = s2.species[i];
    if (a.empty() && b.empty()) continue;
    double local = 0.0;
    for (const CouplingEntry& e : monotone_coupling(a, b).pairs) {
      const double w1 = -v1[i][e.source];
      const double w2 = -v2[i][e.target];
      local += e.mass * (w1 - w2) * (a[e.source].position - b[e.target].position);
    }
    gap += s1.grid.quad_weights[i] * local;
  }
  return gap;
}

double bracket_violation(const ProfileState& s, const VelocityField& v) {
  const DiscreteMeasure rho = marginal_rho(s);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.species.size(); ++i) {
    for (std::size_t j = 0; j < s.species[i].size(); ++j) {
      const VelocityBracket b = velocity_bracket(s, rho, i, j);
      worst = std::max({worst, b.lo - v[i][j], v[i][j] - b.hi});
    }
  }
  return worst;
}

double max_abs(const VelocityField& v) noexcept {
  double m = 0.0;
  for (const auto& row : v) {
    for (double x : row) m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace granuflow
