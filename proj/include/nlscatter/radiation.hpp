#pragma once

#include <vector>

#include "nlscatter/grid.hpp"
#include "nlscatter/nonlinearity.hpp"
#include "nlscatter/radial_solver.hpp"

namespace nlscatter {

enum class Direction { Minus, Plus };

// R±(phi, psi, F) for radial data through the Radon transform:
//   R± = ±(1/4pi) d/ds [R psi + d/ds R phi ± P±],
//   P-(s) = int_{t<0} R[F(t)](s - t) dt,  P+(s) = int_{t>0} R[F(t)](t - s) dt,
// for box v = F. Output on s_j = j dr, |j| < n_points.
RadiationFieldData radiation_linear_exact(const RadialCauchyData& d,
                                          const RadialSpacetimeField* forcing, Direction dir);

struct ExtractionOptions {
  double R = 0.0;  // innermost radius; radii R, 1.25R, 1.5R
  double s_min = 0.0;
  double s_max = 0.0;
  double ds = 0.0;  // 0 selects the trajectory time step
  bool use_stored_velocity = true;  // else fourth-order differences of u in t
};

struct ExtractionResult {
  RadiationFieldData field;             // intercept of the fit in 1/r
  std::vector<RadiationFieldData> raw;  // r u_t sampled at each radius
  std::vector<double> radii;
  double residual = 0.0;  // L2 misfit of the linear-in-1/r fit
};

// Samples r u_t along t = s + r (Plus) or t = s - r (Minus) and extrapolates to r = inf.
ExtractionResult extract_radiation_numeric(const RadialTrajectory& traj, Direction dir,
                                           const ExtractionOptions& opts);

struct SemilinearRadiationOptions {
  double T = 0.0;  // solve interval length; 0 selects r_max
};

// L±(phi, psi) = R±(phi, psi, -f(u)) with u solved on a lattice (dt = dr) over [-T, 0] or [0, T].
RadiationFieldData radiation_semilinear(const Nonlinearity& nl, const RadialCauchyData& d,
                                        Direction dir, const SemilinearRadiationOptions& opts = {});

// Continuum inverse of the linear backward map for radial data:
//   phi(r) = (G(r) - G(-r)) / r,  psi(r) = (Y(r) - Y(-r)) / r,  G(s) = int_{-inf}^s Y.
RadialCauchyData linear_inverse_continuum(const RadiationFieldData& target, const RadialGrid& grid);

// Mean-zero precondition shared by the inverse maps.
void require_mean_zero(const RadiationFieldData& target, double tol = 1e-8);

}  // namespace nlscatter
