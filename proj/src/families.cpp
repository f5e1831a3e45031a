#include "granuflow/families.hpp"

#include <algorithm>
#include <cmath>

#include "granuflow/error.hpp"

namespace granuflow {

Rho0 parse_rho0(const std::string& name) {
  if (name == "uniform") return Rho0::Uniform;
  if (name == "truncated-quadratic") return Rho0::TruncatedQuadratic;
  throw Error(ErrorKind::Config, "unknown rho0 '" + name + "'");
}

const char* to_string(Rho0 r) noexcept {
  return r == Rho0::Uniform ? "uniform" : "truncated-quadratic";
}

double rho0_cdf(Rho0 r, double x) noexcept {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return r == Rho0::Uniform ? x : x * x * (3.0 - 2.0 * x);
}

double rho0_quantile(Rho0 r, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorKind::OutOfRange, "quantile level outside [0, 1]");
  if (r == Rho0::Uniform) return u;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rho0_cdf(r, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double rho0_lower_bound(Rho0 r, double x1, double x2) noexcept {
  if (x1 < 0.0 || x2 > 1.0) return 0.0;
  if (r == Rho0::Uniform) return 1.0;
  auto rho = [](double x) { return 6.0 * x * (1.0 - x); };
  return std::min(rho(x1), rho(x2));
}

KineticCloud discrete_labels_cloud(std::size_t n, Rho0 rho0, std::size_t m, std::vector<double> labels) {
  if (n == 0 || m == 0) throw Error(ErrorKind::InvalidArgument, "need at least one label and one particle");
  if (labels.empty()) {
    for (std::size_t i = 0; i < n; ++i) labels.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  if (labels.size() != n) throw Error(ErrorKind::InvalidArgument, "label_values must have N entries");
  if (!std::is_sorted(labels.begin(), labels.end()) ||
      std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
    throw Error(ErrorKind::InvalidArgument, "label_values must be strictly increasing");
  }
  std::vector<PhaseSample> samples;
  samples.reserve(n * m);
  const double w = 1.0 / static_cast<double>(n * m);
  // G0 at x_m is the level (m + 1/2)/M, which is also the midpoint CDF of
  // the sampled marginal there, so the labels are recovered exactly.
  for (std::size_t k = 0; k < m; ++k) {
    const double level = (static_cast<double>(k) + 0.5) / static_cast<double>(m);
    const double x = rho0_quantile(rho0, level);
    for (double a : labels) samples.push_back({x, a - level, w});
  }
  return KineticCloud::from_samples(std::move(samples));
}

ProfileState discrete_labels_state(std::size_t n, Rho0 rho0, std::size_t m, std::vector<double> labels) {
  return disintegrate_initial(discrete_labels_cloud(n, rho0, m, std::move(labels)), n);
}

KineticCloud gaussian_box_cloud(double radius_x, double radius_v, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw Error(ErrorKind::EmptyCloud, "sample count must be positive");
  if (!(radius_x > 0.0) || !(radius_v > 0.0)) throw Error(ErrorKind::InvalidArgument, "radii must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nx(0.0, radius_x / 3.0), nv(0.0, radius_v / 3.0);
  std::vector<PhaseSample> out;
  out.reserve(samples);
  const double w = 1.0 / static_cast<double>(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = std::clamp(nx(rng), -radius_x, radius_x);
    const double v = std::clamp(nv(rng), -radius_v, radius_v);
    out.push_back({x, v, w});
  }
  return KineticCloud::from_samples(std::move(out));
}

DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t atoms, double mass, double lo, double hi) {
  std::uniform_real_distribution<double> pos(lo, hi), wt(0.05, 1.0);
  std::vector<Atom> out(atoms);
  double sum = 0.0;
  for (Atom& a : out) {
    a = {pos(rng), wt(rng)};
    sum += a.weight;
  }
  for (Atom& a : out) a.weight *= mass / sum;
  return DiscreteMeasure(std::move(out));
}

ProfileState random_state(std::mt19937_64& rng, std::size_t n, std::size_t m, double radius_x, double label_lo,
                          double label_hi) {
  if (n == 0 || m == 0) throw Error(ErrorKind::InvalidArgument, "need at least one label and one atom");
  std::uniform_real_distribution<double> lab(label_lo, label_hi), pos(-radius_x, radius_x), wt(0.1, 1.0);
  std::vector<double> labels;
  while (labels.size() < n) {
    const double a = lab(rng);
    if (std::none_of(labels.begin(), labels.end(), [&](double b) { return std::abs(a - b) < 1e-6; })) {
      labels.push_back(a);
    }
  }
  std::sort(labels.begin(), labels.end());
  std::vector<double> masses(n);
  double sum = 0.0;
  for (double& h : masses) sum += (h = wt(rng));
  for (double& h : masses) h /= sum;
  ProfileState s;
  s.grid = LabelGrid::counting(std::move(labels), masses);
  s.support_radius = radius_x;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Atom> atoms(m);
    for (Atom& a : atoms) a = {pos(rng), masses[i] / static_cast<double>(m)};
    s.species.emplace_back(std::move(atoms));
  }
  return s;
}

ProfileState random_positions_like(std::mt19937_64& rng, const ProfileState& grid_from, double radius_x) {
  std::uniform_real_distribution<double> pos(-radius_x, radius_x);
  ProfileState s;
  s.grid = grid_from.grid;
  s.support_radius = radius_x;
  for (const auto& sp : grid_from.species) {
    std::vector<Atom> atoms(sp.atoms().begin(), sp.atoms().end());
    for (Atom& a : atoms) a.position = pos(rng);
    s.species.emplace_back(std::move(atoms));
  }
  return s;
}

}  // namespace granuflow
