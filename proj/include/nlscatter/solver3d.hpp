#pragma once

#include <cstddef>
#include <vector>

#include "nlscatter/grid.hpp"
#include "nlscatter/nonlinearity.hpp"
#include "nlscatter/radial_solver.hpp"

namespace nlscatter {

// Leapfrog with the 7-point Laplacian on the cell-centred cube, dt <= h / sqrt(3).
// Outflow3D applies a first-order Mur condition on the outer layer (along the inward diagonal on
// edges and corners); Periodic3D wraps.
class Stepper3D {
 public:
  Stepper3D(const Grid3D& grid, double dt, Boundary boundary);

  double dt() const { return dt_; }
  const Grid3D& grid() const { return grid_; }

  // prev <- 2 cur - prev + dt^2 (Lap cur + F)
  void advance(std::vector<double>& prev, const std::vector<double>& cur, const std::vector<double>* F) const;
  // u^{+1} = u0 + dt u1 + dt^2/2 (Lap u0 + F0)
  void start(const std::vector<double>& u0, const std::vector<double>& u1, const std::vector<double>* F0,
             std::vector<double>& out) const;
  void laplacian(const std::vector<double>& u, std::vector<double>& out) const;

 private:
  Grid3D grid_;
  double dt_;
  Boundary boundary_;
};

// Snapshots whose total size exceeds this many bytes are refused.
constexpr std::size_t kSnapshotMemoryLimit = std::size_t(2) << 30;

// box u + f(u) = 0 from data at cfg.start_time; snapshots every cfg.store_stride steps with u_t by
// centred differences. Throws ConfigurationError on CFL or memory violations and NumericalGuardError
// when |u| exceeds the blow-up threshold.
Trajectory3D solve_semilinear_3d(const Nonlinearity& nl, const CauchyData3D& d, const SolverConfig& cfg);

// Trilinear interpolation of a cube field at z (clamped to the node box).
double sample_trilinear(const Grid3D& g, const std::vector<double>& u, double x, double y, double z);

}  // namespace nlscatter
