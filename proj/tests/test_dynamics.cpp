#include <doctest.h>

#include <cmath>
#include <random>

#include "granuflow/dynamics.hpp"
#include "granuflow/error.hpp"
#include "granuflow/families.hpp"
#include "support.hpp"

using namespace granuflow;
using testing::counting_state;
using testing::single_label;

namespace {

std::vector<double> uniform_nodes(double lo, double hi, double dx) {
  std::vector<double> nodes;
  const auto count = static_cast<std::size_t>(std::llround((hi - lo) / dx));
  for (std::size_t k = 0; k <= count; ++k) nodes.push_back(lo + static_cast<double>(k) * dx);
  return nodes;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("characteristics: a Dirac at label one half stays, label one drifts at speed one half") {
  CharacteristicsConfig cfg;
  cfg.dt = 1e-2;
  cfg.horizon = 1.0;
  const CharacteristicsRun still = integrate_characteristics(single_label(0.5, {{0.3, 1.0}}), cfg);
  CHECK(still.trajectory.states.back().species[0][0].position == doctest::Approx(0.3));
  CHECK_FALSE(still.shock_time.has_value());
  const CharacteristicsRun drift = integrate_characteristics(single_label(1.0, {{0.0, 1.0}}), cfg);
  CHECK(drift.trajectory.states.back().species[0][0].position == doctest::Approx(0.5));
  CHECK(drift.trajectory.times.back() == doctest::Approx(1.0));
}

TEST_CASE("characteristics: two particles of one label meet at t = 2") {
  // G_mid = 1/4 and 3/4, so the gap closes at rate 1/2.
  CharacteristicsConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 3.0;
  cfg.record_every = 100;
  const CharacteristicsRun r = integrate_characteristics(single_label(0.7, {{0.0, 0.5}, {1.0, 0.5}}), cfg);
  REQUIRE(r.shock_time.has_value());
  CHECK(*r.shock_time == doctest::Approx(2.0).epsilon(2e-3));
  CHECK(r.trajectory.states.size() == 31);
}

TEST_CASE("characteristics keep v + G_mid(x) - a at zero") {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 10; ++trial) {
    const ProfileState s = random_state(rng, 1 + trial % 4, 3 + trial, 1.0);
    CharacteristicsConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = 0.3;
    cfg.record_every = 10;
    CHECK(first_integral_residual(integrate_characteristics(s, cfg).trajectory) <= 1e-12);
  }
}

TEST_CASE("characteristics config is validated") {
  CharacteristicsConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(integrate_characteristics(single_label(0.5, {{0.0, 1.0}}), cfg), Error);
}

TEST_CASE("second order: a lone particle streams freely") {
  const KineticCloud c = KineticCloud::from_samples({{0.3, 0.7, 1.0}});
  SecondOrderConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  const SecondOrderRun r = integrate_second_order(c, cfg);
  CHECK(r.positions.back()[0] == doctest::Approx(1.0));
  CHECK(r.velocities.back()[0] == doctest::Approx(0.7));
  CHECK_THROWS_AS(integrate_second_order(KineticCloud{}, cfg), Error);
}

TEST_CASE("second order: a symmetric pair stays symmetric and relaxes") {
  const KineticCloud c = KineticCloud::from_samples({{-0.5, 0.4, 0.5}, {0.5, -0.4, 0.5}});
  SecondOrderConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = 1.0;
  cfg.bandwidth = 2.0;
  const SecondOrderRun r = integrate_second_order(c, cfg);
  double last = 0.8;
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    CHECK(r.positions[k][0] == doctest::Approx(-r.positions[k][1]).epsilon(1e-12));
    CHECK(r.velocities[k][0] == doctest::Approx(-r.velocities[k][1]).epsilon(1e-12));
    const double gap = r.velocities[k][0] - r.velocities[k][1];
    CHECK(gap <= last + 1e-15);
    CHECK(gap >= 0.0);
    last = gap;
  }
  CHECK(last < 0.8);
}

TEST_CASE("second order: first integral residual is first order in dt") {
  const KineticCloud c = gaussian_box_cloud(1.0, 1.0, 120, 7);
  auto residual = [&](double dt) {
    SecondOrderConfig cfg;
    cfg.dt = dt;
    cfg.horizon = 0.5;
    cfg.record_every = 10;
    return first_integral_residual(integrate_second_order(c, cfg));
  };
  const double coarse = residual(2e-3), fine = residual(1e-3);
  CHECK(fine < coarse);
  CHECK(fine / coarse == doctest::Approx(0.5).epsilon(0.25));
}

TEST_CASE("triangular kernel cdf") {
  CHECK(triangular_kernel_cdf(-2.0, 1.0) == 0.0);
  CHECK(triangular_kernel_cdf(0.0, 1.0) == 0.5);
  CHECK(triangular_kernel_cdf(2.0, 1.0) == 1.0);
  CHECK(triangular_kernel_cdf(-0.5, 1.0) == doctest::Approx(0.125));
  CHECK(triangular_kernel_cdf(0.5, 1.0) == doctest::Approx(0.875));
}

TEST_CASE("Burgers: a Dirac at label one half is stationary") {
  const LabelGrid grid = LabelGrid::counting({0.5}, {1.0});
  const BurgersState b0 = burgers_initial(grid, uniform_nodes(-1, 1, 1.0 / 64), [](std::size_t, double x) { return x >= 0.0 ? 1.0 : 0.0; });
  const BurgersRun r = run_burgers(b0, 1.0, 0.5, 64, false);
  CHECK(r.steps > 0);
  for (std::size_t k = 0; k < b0.nodes.size(); ++k) CHECK(r.final_state.cdf[0][k] == b0.cdf[0][k]);
}

TEST_CASE("Burgers: a single label follows the method of characteristics") {
  // G0(x) = x on [0, 1]; the quantile of level y sits at y (1 - t) + a t.
  const double a = 0.8, dx = 1.0 / 512;
  const LabelGrid grid = LabelGrid::counting({a}, {1.0});
  const BurgersState b0 = burgers_initial(grid, uniform_nodes(-0.5, 1.5, dx), [](std::size_t, double x) { return std::clamp(x, 0.0, 1.0); });
  const BurgersRun r = run_burgers(b0, 0.5, 0.5, 64, false);
  CHECK(r.final_state.time == doctest::Approx(0.5));
  const std::vector<double> levels{0.2, 0.4, 0.6, 0.8};
  const auto q = burgers_quantiles(r.final_state, 0, levels);
  for (std::size_t k = 0; k < levels.size(); ++k) CHECK(std::abs(q[k] - (0.5 * levels[k] + 0.5 * a)) < 0.02);
  CHECK_FALSE(r.shock_time.has_value());
  // Full collapse at t = 1.
  const BurgersRun later = run_burgers(b0, 1.5, 0.5, 64, true);
  REQUIRE(later.shock_time.has_value());
  CHECK(*later.shock_time > 0.8);
  CHECK(*later.shock_time <= 1.0 + 1e-9);
}

TEST_CASE("Burgers: shock time of the two-label uniform family respects the bound") {
  const std::size_t n = 2;
  const ProfileState s = discrete_labels_state(n, Rho0::Uniform, 16);
  const double reach = 1.05 * n + 0.25;
  const BurgersState b0 = burgers_initial(s.grid, uniform_nodes(-reach, 1 + reach, 1.0 / 128),
                                          [&](std::size_t, double x) { return rho0_cdf(Rho0::Uniform, std::clamp(x, 0.0, 1.0)) / n; });
  const BurgersRun r = run_burgers(b0, 2.5);
  const double bound = shock_time_bound(0.0, 1.0, 1.0, n, [](double x) { return rho0_cdf(Rho0::Uniform, x); });
  CHECK(bound == doctest::Approx(2.0));
  REQUIRE(r.shock_time.has_value());
  CHECK(*r.shock_time <= bound * 1.05);
}

TEST_CASE("Burgers step enforces CFL") {
  const LabelGrid grid = LabelGrid::counting({1.0}, {1.0});
  const BurgersState b0 = burgers_initial(grid, uniform_nodes(0, 1, 0.1), [](std::size_t, double x) { return x; });
  CHECK(kind_of([&] { burgers_step(b0, 1.0); }) == ErrorKind::CflViolation);
  CHECK_NOTHROW(burgers_step(b0, 0.05));
  CHECK(kind_of([&] { burgers_quantiles(b0, 3, {0.5}); }) == ErrorKind::OutOfRange);
}

TEST_CASE("shock_time_bound examples and errors") {
  auto g = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(shock_time_bound(0.0, 1.0, 1.0, 1, g) == doctest::Approx(1.0));
  CHECK(shock_time_bound(0.25, 0.75, 1.0, 4, g) == doctest::Approx(4.0));
  CHECK(kind_of([&] { shock_time_bound(1.0, 0.0, 1.0, 1, g); }) == ErrorKind::InvalidInterval);
  CHECK(kind_of([&] { shock_time_bound(2.0, 3.0, 1.0, 1, g); }) == ErrorKind::InvalidInterval);
  CHECK(kind_of([&] { shock_time_bound(0.0, 1.0, 0.0, 1, g); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { shock_time_bound(0.0, 1.0, 2.0, 1, g); }) == ErrorKind::InvalidArgument);
  const double q = shock_time_bound(0.0, 1.0, 1e-3, 1, [](double x) { return rho0_cdf(Rho0::TruncatedQuadratic, x); });
  CHECK(q == doctest::Approx(1.0));
}
