#include "granuflow/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "granuflow/csv.hpp"
#include "granuflow/error.hpp"

namespace granuflow {

KineticCloud reconstruct(const ProfileState& s) {
  const DiscreteMeasure rho = marginal_rho(s);
  std::vector<PhaseSample> samples;
  samples.reserve(s.atom_count());
  for (std::size_t i = 0; i < s.species.size(); ++i) {
    for (const Atom& at : s.species[i].atoms()) {
      samples.push_back({at.position, s.grid.labels[i] - midpoint_cdf(rho, at.position),
                         at.weight * s.grid.quad_weights[i]});
    }
  }
  return KineticCloud::from_samples(std::move(samples));
}

MomentPair moments(const KineticCloud& c) {
  if (c.samples.empty()) throw Error(ErrorKind::EmptyCloud, "kinetic cloud has no samples");
  std::vector<PhaseSample> sorted = c.samples;
  std::stable_sort(sorted.begin(), sorted.end(), [](const PhaseSample& p, const PhaseSample& q) { return p.x < q.x; });
  std::vector<Atom> atoms;
  MomentPair out;
  for (const PhaseSample& p : sorted) {
    if (atoms.empty() || atoms.back().position != p.x) {
      atoms.push_back({p.x, 0.0});
      out.momentum.push_back(0.0);
    }
    atoms.back().weight += p.weight;
    out.momentum.back() += p.v * p.weight;
  }
  out.rho = DiscreteMeasure(std::move(atoms));
  return out;
}

void write_cloud_csv(std::ostream& out, const KineticCloud& c) {
  csv::write_row(out, {"x", "v", "weight"});
  for (const PhaseSample& p : c.samples) {
    csv::write_row(out, {csv::format_double(p.x), csv::format_double(p.v), csv::format_double(p.weight)});
  }
}

namespace {

// Hat of half-width `width` centred at `centre`.
struct Hat {
  double centre;
  double width;
  double value(double t) const { return std::max(0.0, 1.0 - std::abs(t - centre) / width); }
  // Exact integral over [a, b] of the piecewise-linear hat.
  double integral(double a, double b) const {
    const double knots[] = {centre - width, centre, centre + width};
    double total = 0.0;
    double lo = a;
    for (double k : knots) {
      if (k <= lo || k >= b) continue;
      total += 0.5 * (value(lo) + value(k)) * (k - lo);
      lo = k;
    }
    total += 0.5 * (value(lo) + value(b)) * (b - lo);
    return total;
  }
};

double power(double x, int p) {
  double r = 1.0;
  for (int k = 0; k < p; ++k) r *= x;
  return r;
}

}  // namespace

WeakResidualReport weak_form_residual(const Trajectory& traj, std::size_t hats) {
  if (traj.states.size() < 2) throw Error(ErrorKind::InvalidArgument, "trajectory needs at least two states");
  if (hats == 0) throw Error(ErrorKind::InvalidArgument, "need at least one hat function");
  const double horizon = traj.horizon;
  const double width = horizon / static_cast<double>(hats + 1);
  std::vector<Hat> hat_fns;
  for (std::size_t k = 1; k <= hats; ++k) hat_fns.push_back({static_cast<double>(k) * width, width});

  const int shapes[][2] = {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}};
  WeakResidualReport report;
  for (std::size_t h = 0; h < hats; ++h) {
    for (const auto& sh : shapes) report.basis.push_back({sh[0], sh[1], h});
  }
  report.residuals.assign(report.basis.size(), 0.0);

  // <f, p> and <f, v d_x p> for each polynomial shape on state k.
  auto pairings = [&](const ProfileState& s) {
    const KineticCloud f = reconstruct(s);
    std::vector<std::pair<double, double>> out;
    for (const auto& sh : shapes) {
      double value = 0.0, transport = 0.0;
      for (const PhaseSample& p : f.samples) {
        value += p.weight * power(p.x, sh[0]) * power(p.v, sh[1]);
        if (sh[0] > 0) transport += p.weight * sh[0] * power(p.x, sh[0] - 1) * power(p.v, sh[1] + 1);
      }
      out.emplace_back(value, transport);
    }
    return out;
  };

  // f_t equals state k on ((k - 1) tau, k tau], clipped to [0, T].
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const double a = traj.times[k - 1];
    const double b = std::min(traj.times[k], horizon);
    if (!(b > a)) continue;
    const auto pr = pairings(traj.states[k]);
    for (std::size_t r = 0; r < report.basis.size(); ++r) {
      const WeakTestFunction& tf = report.basis[r];
      const Hat& hat = hat_fns[tf.hat];
      const std::size_t shape = r % std::size(shapes);
      report.residuals[r] += (hat.value(b) - hat.value(a)) * pr[shape].first + hat.integral(a, b) * pr[shape].second;
    }
  }
  for (double r : report.residuals) report.max_abs = std::max(report.max_abs, std::abs(r));
  return report;
}

}  // namespace granuflow
