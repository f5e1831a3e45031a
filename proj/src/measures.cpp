#include "granuflow/measures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "granuflow/csv.hpp"
#include "granuflow/error.hpp"
#include "granuflow/transport_lp.hpp"

namespace granuflow {

LabelGrid LabelGrid::counting(std::vector<double> labels, std::vector<double> masses) {
  LabelGrid grid;
  grid.quad_weights.assign(labels.size(), 1.0);
  grid.labels = std::move(labels);
  grid.masses = std::move(masses);
  grid.validate();
  return grid;
}

void LabelGrid::validate() const {
  if (labels.empty()) throw Error(ErrorKind::InvalidArgument, "label grid is empty");
  if (quad_weights.size() != labels.size() || masses.size() != labels.size()) {
    throw Error(ErrorKind::InvalidArgument, "label grid arrays differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!std::isfinite(labels[i]) || (i > 0 && !(labels[i - 1] < labels[i]))) {
      throw Error(ErrorKind::InvalidArgument, "labels must be finite and strictly increasing");
    }
    if (!(quad_weights[i] > 0.0) || !std::isfinite(quad_weights[i])) {
      throw Error(ErrorKind::InvalidArgument, "quadrature weights must be positive");
    }
    if (!(masses[i] >= 0.0) || !std::isfinite(masses[i])) {
      throw Error(ErrorKind::InvalidArgument, "label masses must be nonnegative");
    }
    total += masses[i] * quad_weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument,
                "sum of h_i mu_i must be 1, got " + std::to_string(total));
  }
}

bool LabelGrid::labels_within(double radius_v, double tol) const {
  return std::all_of(labels.begin(), labels.end(), [&](double a) {
    return a >= -radius_v - tol && a <= radius_v + 1.0 + tol;
  });
}

bool LabelGrid::same_as(const LabelGrid& other, double tol) const {
  if (size() != other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::abs(labels[i] - other.labels[i]) > tol ||
        std::abs(quad_weights[i] - other.quad_weights[i]) > tol ||
        std::abs(masses[i] - other.masses[i]) > tol) {
      return false;
    }
  }
  return true;
}

std::size_t ProfileState::atom_count() const noexcept {
  std::size_t n = 0;
  for (const auto& sp : species) n += sp.size();
  return n;
}

double ProfileState::max_abs_position() const noexcept {
  double r = 0.0;
  for (const auto& sp : species) {
    for (const Atom& a : sp.atoms()) r = std::max(r, std::abs(a.position));
  }
  return r;
}

void ProfileState::validate() const {
  grid.validate();
  if (species.size() != grid.size()) {
    throw Error(ErrorKind::InvalidArgument, "one species per label required");
  }
  for (std::size_t i = 0; i < species.size(); ++i) {
    if (std::abs(species[i].total_mass() - grid.masses[i]) > 1e-9) {
      throw Error(ErrorKind::InvalidArgument,
                  "species " + std::to_string(i) + " mass differs from h_i");
    }
  }
  if (max_abs_position() > support_radius) {
    throw Error(ErrorKind::InvalidArgument, "atoms outside [-R, R]");
  }
}

KineticCloud KineticCloud::from_samples(std::vector<PhaseSample> samples) {
  if (samples.empty()) throw Error(ErrorKind::EmptyCloud, "kinetic cloud has no samples");
  KineticCloud cloud;
  double total = 0.0;
  for (const PhaseSample& s : samples) {
    if (!(s.weight > 0.0) || !std::isfinite(s.x) || !std::isfinite(s.v) || !std::isfinite(s.weight)) {
      throw Error(ErrorKind::InvalidArgument, "samples need finite values and positive weight");
    }
    total += s.weight;
    cloud.radius_x = std::max(cloud.radius_x, std::abs(s.x));
    cloud.radius_v = std::max(cloud.radius_v, std::abs(s.v));
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "sample weights must sum to 1, got " + std::to_string(total));
  }
  cloud.samples = std::move(samples);
  return cloud;
}

DiscreteMeasure KineticCloud::spatial_marginal() const {
  std::vector<Atom> atoms;
  atoms.reserve(samples.size());
  for (const PhaseSample& s : samples) atoms.push_back({s.x, s.weight});
  return DiscreteMeasure(std::move(atoms)).canonical();
}

CdfPair cdf_pair(const DiscreteMeasure& m, double x) {
  const auto atoms = m.atoms();
  const auto cum = m.cumulative();
  const auto lo = std::lower_bound(atoms.begin(), atoms.end(), x,
                                   [](const Atom& a, double v) { return a.position < v; });
  const auto hi = std::upper_bound(atoms.begin(), atoms.end(), x,
                                   [](double v, const Atom& a) { return v < a.position; });
  const auto nlo = static_cast<std::size_t>(lo - atoms.begin());
  const auto nhi = static_cast<std::size_t>(hi - atoms.begin());
  return {nlo == 0 ? 0.0 : cum[nlo - 1], nhi == 0 ? 0.0 : cum[nhi - 1]};
}

double midpoint_cdf(const DiscreteMeasure& m, double x) {
  const CdfPair g = cdf_pair(m, x);
  return 0.5 * (g.below + g.at_most);
}

double quantile(const DiscreteMeasure& m, double u) {
  if (m.empty()) throw Error(ErrorKind::EmptyMeasure, "quantile of an empty measure");
  const double total = m.total_mass();
  if (!(u > 0.0) || u > total * (1.0 + 1e-15)) {
    throw Error(ErrorKind::OutOfRange, "quantile level outside (0, total mass]");
  }
  const auto cum = m.cumulative();
  auto it = std::lower_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) --it;
  return m[static_cast<std::size_t>(it - cum.begin())].position;
}

DiscreteMeasure marginal_rho(const ProfileState& s) {
  std::vector<Atom> atoms;
  atoms.reserve(s.atom_count());
  for (std::size_t i = 0; i < s.species.size(); ++i) {
    const double mu = s.grid.quad_weights[i];
    for (const Atom& a : s.species[i].atoms()) atoms.push_back({a.position, mu * a.weight});
  }
  return DiscreteMeasure(std::move(atoms)).canonical();
}

ProfileState disintegrate_initial(const KineticCloud& f0, std::size_t label_count) {
  if (f0.samples.empty()) throw Error(ErrorKind::EmptyCloud, "kinetic cloud has no samples");
  if (label_count == 0) throw Error(ErrorKind::InvalidArgument, "label count must be positive");

  const DiscreteMeasure rho0 = f0.spatial_marginal();
  const std::size_t n = f0.samples.size();
  std::vector<double> label(n);
  for (std::size_t k = 0; k < n; ++k) {
    label[k] = f0.samples[k].v + midpoint_cdf(rho0, f0.samples[k].x);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto p, auto q) { return label[p] < label[q]; });
  const double a_min = label[order.front()];
  const double a_max = label[order.back()];

  // Group labels equal up to rounding from the v = a - G0 round trip.
  const double group_tol = 1e-9 * std::max(1.0, a_max - a_min);
  std::vector<std::size_t> group(n);
  std::size_t groups = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (r > 0 && label[order[r]] - label[order[r - 1]] > group_tol) ++groups;
    group[order[r]] = groups;
  }
  ++groups;

  std::vector<std::size_t> bin(n);
  std::vector<double> centers;
  std::vector<double> mu;
  if (groups == label_count) {
    std::vector<double> mass(groups, 0.0), moment(groups, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      mass[group[k]] += f0.samples[k].weight;
      moment[group[k]] += f0.samples[k].weight * label[k];
      bin[k] = group[k];
    }
    for (std::size_t g = 0; g < groups; ++g) centers.push_back(moment[g] / mass[g]);
    mu.assign(groups, 1.0);
  } else {
    if (groups == 1) {
      throw Error(ErrorKind::DegenerateLabels, "all labels coincide but more than one label requested");
    }
    const double width = (a_max - a_min) / static_cast<double>(label_count);
    for (std::size_t k = 0; k < n; ++k) {
      const auto b = static_cast<std::size_t>(std::floor((label[k] - a_min) / width));
      bin[k] = std::min(b, label_count - 1);
    }
    for (std::size_t b = 0; b < label_count; ++b) {
      centers.push_back(a_min + (static_cast<double>(b) + 0.5) * width);
    }
    mu.assign(label_count, width);
  }

  // Empty bins are dropped; they carry no mass.
  const std::size_t bins = centers.size();
  std::vector<std::vector<Atom>> members(bins);
  std::vector<double> bin_mass(bins, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    members[bin[k]].push_back({f0.samples[k].x, f0.samples[k].weight / mu[bin[k]]});
    bin_mass[bin[k]] += f0.samples[k].weight;
  }
  ProfileState state;
  for (std::size_t b = 0; b < bins; ++b) {
    if (members[b].empty()) continue;
    state.grid.labels.push_back(centers[b]);
    state.grid.quad_weights.push_back(mu[b]);
    state.species.emplace_back(std::move(members[b]));
    state.grid.masses.push_back(state.species.back().total_mass());
  }
  state.support_radius = f0.radius_x;
  state.validate();
  return state;
}

void require_same_grid(const ProfileState& s1, const ProfileState& s2) {
  if (!s1.grid.same_as(s2.grid) || s1.species.size() != s2.species.size()) {
    throw Error(ErrorKind::GridMismatch, "states live on different label grids");
  }
}

double product_distance(const ProfileState& s1, const ProfileState& s2) {
  require_same_grid(s1, s2);
  double total = 0.0;
  for (std::size_t i = 0; i < s1.species.size(); ++i) {
    const auto& a = s1.species[i];
    const auto& b = s2.species[i];
    if (a.empty() && b.empty()) continue;
    total += s1.grid.quad_weights[i] * coupling_cost(a, b, monotone_coupling(a, b), 2.0);
  }
  return std::sqrt(total);
}

double weak_distance(const ProfileState& s1, const ProfileState& s2) {
  require_same_grid(s1, s2);
  struct Point {
    double a, x, mass;
  };
  auto lift = [](const ProfileState& s) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < s.species.size(); ++i) {
      const DiscreteMeasure merged = s.species[i].canonical();
      for (const Atom& at : merged.atoms()) {
        pts.push_back({s.grid.labels[i], at.position, s.grid.quad_weights[i] * at.weight});
      }
    }
    return pts;
  };
  const auto p = lift(s1);
  const auto q = lift(s2);
  if (p.size() + q.size() > kWeakDistanceAtomCap) {
    throw Error(ErrorKind::TooLarge, "weak distance is capped at " +
                                         std::to_string(kWeakDistanceAtomCap) + " combined atoms");
  }
  std::vector<double> supply, demand, cost;
  for (const Point& u : p) supply.push_back(u.mass);
  for (const Point& w : q) demand.push_back(w.mass);
  const double ds = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double dd = std::accumulate(demand.begin(), demand.end(), 0.0);
  require_equal_mass(ds, dd);
  demand.back() = std::max(0.0, demand.back() + ds - dd);
  cost.reserve(p.size() * q.size());
  for (const Point& u : p) {
    for (const Point& w : q) {
      cost.push_back((u.a - w.a) * (u.a - w.a) + (u.x - w.x) * (u.x - w.x));
    }
  }
  return std::sqrt(std::max(0.0, solve_transport(supply, demand, cost).cost));
}

ProfileState displacement_interpolate(const ProfileState& s1, const ProfileState& s2, double eps) {
  require_same_grid(s1, s2);
  ProfileState out;
  out.grid = s1.grid;
  out.support_radius = std::max(s1.support_radius, s2.support_radius);
  for (std::size_t i = 0; i < s1.species.size(); ++i) {
    const auto& a = s1.species[i];
    const auto& b = s2.species[i];
    std::vector<Atom> atoms;
    if (!a.empty() || !b.empty()) {
      for (const CouplingEntry& e : monotone_coupling(a, b).pairs) {
        atoms.push_back({(1.0 - eps) * a[e.source].position + eps * b[e.target].position, e.mass});
      }
    }
    out.species.emplace_back(std::move(atoms));
  }
  return out;
}

DiscreteMeasure equal_mass_particles(const DiscreteMeasure& m, std::size_t count) {
  if (count == 0) throw Error(ErrorKind::InvalidArgument, "particle count must be positive");
  if (m.empty()) throw Error(ErrorKind::EmptyMeasure, "cannot discretize an empty measure");
  const double total = m.total_mass();
  std::vector<Atom> atoms;
  atoms.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(count) * total;
    atoms.push_back({quantile(m, u), total / static_cast<double>(count)});
  }
  return DiscreteMeasure(std::move(atoms));
}

ProfileState requantize(const ProfileState& s, std::size_t count) {
  ProfileState out;
  out.grid = s.grid;
  out.support_radius = s.support_radius;
  for (const auto& sp : s.species) {
    out.species.push_back(sp.empty() ? sp : equal_mass_particles(sp, count));
  }
  return out;
}

KineticCloud read_cloud_csv(std::istream& in) {
  auto rows = csv::read(in);
  if (rows.empty()) throw Error(ErrorKind::Io, "CSV has no header");
  auto& header = rows.front();
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  const std::size_t cx = csv::column(header, "x");
  const std::size_t cv = csv::column(header, "v");
  const std::size_t cw = csv::column(header, "weight");
  std::vector<PhaseSample> samples;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorKind::Io, "CSV row " + std::to_string(r + 1) + " has wrong field count");
    }
    samples.push_back({csv::parse_double(row[cx]), csv::parse_double(row[cv]), csv::parse_double(row[cw])});
  }
  return KineticCloud::from_samples(std::move(samples));
}

KineticCloud read_cloud_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_cloud_csv(in);
}

}  // namespace granuflow
