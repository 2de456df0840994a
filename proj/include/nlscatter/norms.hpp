#pragma once

#include <limits>
#include <vector>

#include "nlscatter/grid.hpp"
#include "nlscatter/nonlinearity.hpp"

namespace nlscatter {

// 1/2 int (psi^2 + |grad phi|^2) dx. The radial version is evaluated on w = r u:
// 2 pi int (w_t^2 + w_r^2) dr, trapezoid on the odd extension.
double energy_linear(const RadialCauchyData& d);
double energy_linear(const CauchyData3D& d);

// energy_linear + int F(phi) dx (the conserved energy of the semilinear flow).
double energy_semilinear(const RadialCauchyData& d, const Nonlinearity& nl);
double energy_semilinear(const CauchyData3D& d, const Nonlinearity& nl);

struct LpLqNorm {
  double value = 0.0;
  bool strichartz_admissible = false;
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

bool strichartz_admissible(double p, double q);
LpLqNorm norm_lplq(const RadialTrajectory& traj, double p, double q);
LpLqNorm norm_lplq(const Trajectory3D& traj, double p, double q);
// Same norm on bare radial snapshots u[n] sampled at spacing dt.
double norm_lplq_samples(const RadialGrid& g, const std::vector<std::vector<double>>& u, double dt,
                         double p, double q);

struct RadonValue {
  double value = 0.0;
  bool truncated = false;
};

// Rg(s) = 2 pi int_{|s|}^inf g(rho) rho d rho for radial g sampled on the grid.
RadonValue radon_radial(const RadialGrid& grid, const std::vector<double>& g, double s);
// Rg at s_j = j dr for j = -n..n (index j + n), exact trapezoid tails.
std::vector<double> radon_radial_nodes(const RadialGrid& grid, const std::vector<double>& g);

}  // namespace nlscatter
