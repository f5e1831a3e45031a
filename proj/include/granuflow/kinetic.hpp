#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "granuflow/jko.hpp"
#include "granuflow/measures.hpp"

namespace granuflow {

/// rho and the momentum m evaluated at each atom of rho.
struct MomentPair {
  DiscreteMeasure rho;
  std::vector<double> momentum;
};

/// Samples (x, a_i - G_mid(x), w mu_i) in label-major, atom order.
KineticCloud reconstruct(const ProfileState& s);

/// Throws EmptyCloud on an empty cloud.
MomentPair moments(const KineticCloud& c);

/// Header `x,v,weight`.
void write_cloud_csv(std::ostream& out, const KineticCloud& c);

/// phi(t, x, v) = hat_k(t) x^px v^pv. Only pv <= 1 is used, so that the
/// collision term integrates to zero against any cloud (d_v phi does not
/// depend on v and rho m - m rho = 0).
struct WeakTestFunction {
  int x_power;
  int v_power;
  std::size_t hat;
};

struct WeakResidualReport {
  std::vector<WeakTestFunction> basis;
  std::vector<double> residuals;
  double max_abs = 0.0;
};

/// Weak form of the kinetic equation for the piecewise-constant
/// reconstruction f_t = reconstruct(nu_k) on ((k - 1) tau, k tau]:
///   R(phi) = int_0^T <f_t, d_t phi + v d_x phi> dt
/// over phi in {1, x, x^2, v, x v} times `hats` interior hat functions on [0, T].
WeakResidualReport weak_form_residual(const Trajectory& traj, std::size_t hats = 4);

}  // namespace granuflow
