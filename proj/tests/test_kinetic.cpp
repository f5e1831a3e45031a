#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "granuflow/error.hpp"
#include "granuflow/families.hpp"
#include "granuflow/jko.hpp"
#include "granuflow/kinetic.hpp"
#include "support.hpp"

using namespace granuflow;
using testing::counting_state;
using testing::single_label;

TEST_CASE("reconstruct examples") {
  const KineticCloud one = reconstruct(single_label(1.0, {{0.2, 1.0}}));
  REQUIRE(one.samples.size() == 1);
  CHECK(one.samples[0].x == 0.2);
  CHECK(one.samples[0].v == doctest::Approx(0.5));
  CHECK(one.samples[0].weight == doctest::Approx(1.0));

  const ProfileState s = counting_state({0.0, 1.0}, {{{0.0, 0.5}}, {{1.0, 0.5}}});
  const KineticCloud two = reconstruct(s);
  REQUIRE(two.samples.size() == 2);
  CHECK(two.samples[0].v == doctest::Approx(-0.25));
  CHECK(two.samples[1].v == doctest::Approx(0.25));
}

TEST_CASE("moments examples") {
  const KineticCloud c = KineticCloud::from_samples({{0.0, 1.0, 0.25}, {0.0, -1.0, 0.25}, {1.0, 2.0, 0.5}});
  const MomentPair m = moments(c);
  REQUIRE(m.rho.size() == 2);
  CHECK(m.rho[0].weight == doctest::Approx(0.5));
  CHECK(m.momentum[0] == doctest::Approx(0.0));
  CHECK(m.momentum[1] == doctest::Approx(1.0));
  try {
    moments(KineticCloud{});
    FAIL("expected EmptyCloud");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyCloud);
  }
}

TEST_CASE("reconstruct preserves mass and first moments") {
  std::mt19937_64 rng(60);
  for (int trial = 0; trial < 30; ++trial) {
    const ProfileState s = random_state(rng, 1 + trial % 5, 1 + trial % 9, 1.0);
    const KineticCloud c = reconstruct(s);
    const MomentPair m = moments(c);
    const DiscreteMeasure rho = marginal_rho(s);
    CHECK(m.rho.total_mass() == doctest::Approx(rho.total_mass()).epsilon(1e-12));
    double mx = 0.0, rx = 0.0;
    for (const Atom& a : m.rho.atoms()) mx += a.weight * a.position;
    for (const Atom& a : rho.atoms()) rx += a.weight * a.position;
    CHECK(mx == doctest::Approx(rx).epsilon(1e-12));
    // velocities are admissible
    for (const PhaseSample& p : c.samples) CHECK(std::abs(p.v) <= 3.0);
  }
}

TEST_CASE("cloud CSV round trip") {
  const KineticCloud c = reconstruct(discrete_labels_state(3, Rho0::TruncatedQuadratic, 5));
  std::ostringstream out;
  write_cloud_csv(out, c);
  CHECK(out.str().rfind("x,v,weight", 0) == 0);
  std::istringstream in(out.str());
  const KineticCloud back = read_cloud_csv(in);
  REQUIRE(back.samples.size() == c.samples.size());
  for (std::size_t k = 0; k < c.samples.size(); ++k) {
    CHECK(back.samples[k].x == c.samples[k].x);
    CHECK(back.samples[k].v == c.samples[k].v);
    CHECK(back.samples[k].weight == c.samples[k].weight);
  }
}

TEST_CASE("weak residual vanishes on a stationary trajectory") {
  JkoConfig cfg;
  cfg.tau = 0.05;
  cfg.horizon = 1.0;
  const Trajectory tr = run(single_label(0.5, {{0.0, 1.0}}, 1.0), cfg);
  const WeakResidualReport r = weak_form_residual(tr, 4);
  CHECK(r.basis.size() == 20);
  CHECK(r.max_abs <= 1e-14);
}

TEST_CASE("weak residual shrinks with tau") {
  auto residual = [](double tau) {
    JkoConfig cfg;
    cfg.tau = tau;
    cfg.horizon = 0.5;
    return weak_form_residual(run(discrete_labels_state(2, Rho0::Uniform, 16), cfg)).max_abs;
  };
  const double coarse = residual(2e-2), fine = residual(1e-2);
  CHECK(fine < coarse);
  CHECK(fine < 0.05);
  CHECK_THROWS_AS(weak_form_residual(Trajectory{}), Error);
}
