#pragma once

#include <array>
#include <vector>

#include "nlscatter/conormal.hpp"
#include "nlscatter/expansion.hpp"
#include "nlscatter/grid.hpp"
#include "nlscatter/nonlinearity.hpp"

namespace nlscatter {

// Hierarchy members w_alpha with 0/1 indices below a target, marched on the cube together:
//   box w_alpha + f'(u0) w_alpha = source_alpha (kappa source_alpha for the target).
// u0 is the radial background with backward field Y0 (lattice solve), sampled at |z|.
// |alpha| = 1 members start at t_start from the free hourglass waves zeta_j^- - zeta_j^+ of the
// cone configuration scaled by wave_scale[j]; higher members start from zero.
// The forward field of the target is recorded as R d_t w(s + R, R omega) at each probe.
struct Interaction3DConfig {
  Grid3D grid{6.0, 160};
  double cfl_ratio = 0.5;
  ConeConfig cones;
  std::array<double, 4> wave_scale{1.0, 1.0, 1.0, 1.0};
  Nonlinearity nl = Nonlinearity::power(1.0, 5);
  RadiationFieldData Y0;  // radial; empty values or all zero: u0 = 0
  MultiIndex target;
  std::vector<double> source_scales{1.0};  // one copy of the target per kappa
  double t_start = -3.3;
  double t_end = 8.0;
  double probe_radius = 6.5;
  std::vector<Vec3> probe_dirs;
};

struct Interaction3DResult {
  std::vector<MultiIndex> members;      // evolved (identically zero members skipped)
  std::vector<RadiationFieldData> xi;   // per source scale: s x probes
  double dt = 0.0;
  double u0_max = 0.0;                  // max |u0| over the run
  double seconds = 0.0;
};

Interaction3DResult run_interaction_3d(const Interaction3DConfig& cfg);

// Default background field for the 3D experiments: a d/ds exp(-4 s^2) on [-3, 3].
RadiationFieldData default_background_field(double amplitude, double ds = 0.01);

}  // namespace nlscatter
