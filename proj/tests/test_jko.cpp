#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "granuflow/error.hpp"
#include "granuflow/families.hpp"
#include "granuflow/jko.hpp"
#include "support.hpp"

using namespace granuflow;
using testing::counting_state;
using testing::single_label;

namespace {

JkoConfig small_config(double tau = 1e-2, double horizon = 0.2) {
  JkoConfig c;
  c.tau = tau;
  c.horizon = horizon;
  return c;
}

// Subgradient descent on the Lagrangian objective for one atom per label:
// sum m (y - x)^2 / 2tau + 1/4 sum_pq m_p m_q |y_p - y_q| + sum m (1/2 - a) y.
// Slow and only accurate to ~1e-7, but shares no code with the step.
double descent_oracle(const std::vector<double>& x, const std::vector<double>& m, const std::vector<double>& a,
                      double tau) {
  const std::size_t n = x.size();
  auto objective = [&](const std::vector<double>& y) {
    double f = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      f += m[p] * (y[p] - x[p]) * (y[p] - x[p]) / (2 * tau) + m[p] * (0.5 - a[p]) * y[p];
      for (std::size_t q = 0; q < n; ++q) f += 0.25 * m[p] * m[q] * std::abs(y[p] - y[q]);
    }
    return f;
  };
  std::vector<double> y = x, g(n);
  double best = objective(y);
  for (int it = 1; it <= 200000; ++it) {
    for (std::size_t p = 0; p < n; ++p) {
      double s = 0.0;
      for (std::size_t q = 0; q < n; ++q) s += m[q] * (y[p] > y[q] ? 1.0 : y[p] < y[q] ? -1.0 : 0.0);
      g[p] = (y[p] - x[p]) / tau + 0.5 * s + (0.5 - a[p]);
    }
    const double step = tau / std::sqrt(static_cast<double>(it));
    for (std::size_t p = 0; p < n; ++p) y[p] -= step * g[p];
    best = std::min(best, objective(y));
  }
  return best;
}

}  // namespace

TEST_CASE("project_support examples") {
  const ProfileState s = single_label(0.5, {{-3.0, 0.25}, {0.5, 0.5}, {4.0, 0.25}});
  const ProfileState p = project_support(s, 2.0);
  CHECK(p.species[0][0].position == -2.0);
  CHECK(p.species[0][1].position == 0.5);
  CHECK(p.species[0][2].position == 2.0);
  CHECK(p.species[0].total_mass() == doctest::Approx(1.0));
  const ProfileState q = project_support(p, 2.0);
  CHECK(product_distance(p, q) == 0.0);
  CHECK_THROWS_AS(project_support(s, 0.0), Error);
}

TEST_CASE("a label at one half sitting at a Dirac does not move") {
  const ProfileState s = single_label(0.5, {{0.0, 1.0}});
  const JkoStep step = jko_step(s, small_config(), 0);
  CHECK(step.next.species[0][0].position == 0.0);
  CHECK(step.velocity[0][0] == 0.0);
}

TEST_CASE("a label at one moves by tau / 2") {
  const double tau = 1e-2;
  const JkoStep step = jko_step(single_label(1.0, {{0.0, 1.0}}), small_config(tau), 0);
  CHECK(step.next.species[0][0].position == doctest::Approx(tau / 2));
  CHECK(step.velocity[0][0] == doctest::Approx(0.5));
}

TEST_CASE("mirror symmetric data gives a mirror symmetric step") {
  // a -> 1 - a together with x -> -x is a symmetry of the objective.
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 20; ++trial) {
    const ProfileState s = random_state(rng, 1 + trial % 4, 1 + trial % 7, 1.0, -1.0, 2.0);
    ProfileState m = s;
    m.species.clear();
    for (std::size_t i = 0; i < s.label_count(); ++i) {
      m.grid.labels[i] = 1.0 - s.grid.labels[i];
      std::vector<Atom> atoms(s.species[i].atoms().begin(), s.species[i].atoms().end());
      for (Atom& a : atoms) a.position = -a.position;
      m.species.emplace_back(std::move(atoms));
    }
    const ProfileState a = jko_step(s, 1e-2, 100.0, 1e-7).next;
    const ProfileState b = jko_step(m, 1e-2, 100.0, 1e-7).next;
    for (std::size_t i = 0; i < s.label_count(); ++i) {
      const std::size_t n = a.species[i].size();
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(a.species[i][j].position == doctest::Approx(-b.species[i][n - 1 - j].position).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("run produces N + 1 steps from the initial state") {
  const ProfileState s = single_label(0.5, {{0.0, 1.0}}, 1.0);
  JkoConfig cfg = small_config(0.1, 1.0);
  const Trajectory tr = run(s, cfg);
  CHECK(tr.states.size() == 12);
  CHECK(tr.times.back() == doctest::Approx(1.1));
  for (const auto& st : tr.states) CHECK(st.species[0][0].position == 0.0);
  for (const auto& e : tr.energies) CHECK(e.total == 0.0);
  CHECK(tr.velocities[0][0][0] == 0.0);

  cfg.horizon = 0.35;
  CHECK(run(s, cfg).states.size() == 5);
}

TEST_CASE("run rejects bad input") {
  JkoConfig cfg = small_config();
  CHECK_THROWS_AS(run(single_label(0.5, {{2.0, 1.0}}), cfg), Error);      // outside R_x
  CHECK_THROWS_AS(run(single_label(3.0, {{0.0, 1.0}}), cfg), Error);      // label above R_v + 1
  cfg.tau = 0.0;
  CHECK_THROWS_AS(run(single_label(0.5, {{0.0, 1.0}}), cfg), Error);
}

TEST_CASE("interpolate is right-closed and piecewise constant") {
  const ProfileState s = single_label(1.0, {{0.0, 1.0}}, 1.0);
  const Trajectory tr = run(s, small_config(0.1, 1.0));
  CHECK(interpolation_index(tr, 0.0) == 0);
  CHECK(interpolation_index(tr, 0.05) == 1);
  CHECK(interpolation_index(tr, 0.1) == 1);
  CHECK(interpolation_index(tr, 0.1000001) == 2);
  CHECK(interpolation_index(tr, 1.0) == 10);
  CHECK(&interpolate(tr, 0.3) == &tr.states[3]);
  try {
    interpolate(tr, 1.5);
    FAIL("expected OutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OutOfRange);
  }
  CHECK_THROWS_AS(interpolate(tr, -0.1), Error);
}

TEST_CASE("trajectory invariants on random data") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 12; ++trial) {
    const ProfileState s = random_state(rng, 1 + trial % 4, 4 + trial % 11, 1.0, -1.0, 1.0);
    JkoConfig cfg = small_config(2e-2, 0.5);
    const Trajectory tr = run(s, cfg);
    const double e0 = tr.energies.front().total;
    double dissipated = 0.0;
    for (std::size_t k = 0; k + 1 < tr.states.size(); ++k) {
      const double d = tr.step_distances[k];
      // descent with the proximal term
      CHECK(tr.energies[k + 1].total + d * d / (2 * cfg.tau) <= tr.energies[k].total + 1e-12);
      dissipated += d * d / (2 * cfg.tau);
      CHECK(dissipated <= e0 - tr.energies[k + 1].total + 1e-12);
      // running support and mass
      CHECK(tr.states[k + 1].max_abs_position() <= cfg.running_radius(k + 1) + 1e-12);
      for (std::size_t i = 0; i < s.label_count(); ++i) {
        CHECK(tr.states[k + 1].species[i].total_mass() == doctest::Approx(s.species[i].total_mass()).epsilon(1e-12));
      }
      CHECK(max_abs(tr.velocities[k + 1]) <= cfg.radius_v + 2.0);
      CHECK(bracket_violation(tr.states[k + 1], tr.velocities[k + 1]) <= 1e-9);
    }
    // 1/2-Hoelder in time, with the constant from the energy drop.
    const double drop = e0 - tr.energies.back().total;
    for (std::size_t k = 0; k < tr.states.size(); k += 3) {
      for (std::size_t l = k + 1; l < tr.states.size(); l += 4) {
        const double gap = static_cast<double>(l - k) * cfg.tau;
        CHECK(product_distance(tr.states[k], tr.states[l]) <= std::sqrt(2 * drop * gap) + 1e-9);
      }
    }
  }
}

TEST_CASE("the step minimizes the objective against a subgradient oracle") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> pos(-1.0, 1.0), lab(-1.0, 2.0), w(0.2, 1.0);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 1 + trial % 4;
    std::vector<double> x(n), m(n), a(n);
    double total = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      x[p] = pos(rng);
      total += m[p] = w(rng);
      a[p] = lab(rng);
    }
    std::sort(a.begin(), a.end());
    std::vector<std::vector<Atom>> species;
    for (std::size_t p = 0; p < n; ++p) {
      m[p] /= total;
      species.push_back({{x[p], m[p]}});
    }
    const ProfileState s = counting_state(a, species);
    const double tau = 0.05;
    const JkoStep step = jko_step(s, tau, 100.0, 1e-7);
    const double ours = jko_objective(step.next, s, tau);
    const double oracle = descent_oracle(x, m, a, tau);
    CHECK(ours <= oracle + 1e-9);
    CHECK(ours == doctest::Approx(oracle).epsilon(1e-5));
  }
}

TEST_CASE("no random perturbation beats the step") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> kick(0.0, 1e-2);
  for (int trial = 0; trial < 20; ++trial) {
    const ProfileState s = random_state(rng, 1 + trial % 3, 2 + trial % 5, 1.0, -1.0, 2.0);
    const double tau = 2e-2;
    const ProfileState best = jko_step(s, tau, 100.0, 1e-7).next;
    const double f = jko_objective(best, s, tau);
    for (int probe = 0; probe < 50; ++probe) {
      ProfileState c = best;
      c.species.clear();
      for (const auto& sp : best.species) {
        std::vector<Atom> atoms(sp.atoms().begin(), sp.atoms().end());
        for (Atom& at : atoms) at.position += kick(rng);
        c.species.emplace_back(std::move(atoms));
      }
      CHECK(f <= jko_objective(c, s, tau) + 1e-12);
    }
  }
}
