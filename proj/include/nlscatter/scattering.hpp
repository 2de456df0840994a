#pragma once

#include <vector>

#include "nlscatter/grid.hpp"
#include "nlscatter/nonlinearity.hpp"
#include "nlscatter/radial_solver.hpp"

namespace nlscatter {

// Radial scattering on the characteristic lattice dt = dr = h, w = r u.
// The nonlinear forcing acts on levels n in [-M, M-1] (|t| < T = M h); outside that window the
// lattice is free and the radiation fields are read off exactly:
//   L-_j = (w^{-M}_{j+M+1} - w^{-M-1}_{j+M}) / 2h,  L+_j = (w^M_i - w^{M-1}_{i+1}) / 2h, i = M-j-1,
// for s_j = j h, |j| <= J. The grid must hold n_points >= M + J + 1.
struct ScatteringOptions {
  double s_half_width = 0.0;  // 0: inferred from the support of the target
  double T = 0.0;             // 0: max(20, 4 S)
  double h = 0.0;             // 0: target spacing
  int margin = 16;
  double tol = 1e-10;  // relative L2 residual of the fixed point
  int max_iterations = 25;
};

struct ScatteringModel {
  Nonlinearity nl = Nonlinearity::zero();
  RadialGrid grid;
  int M = 0;
  int J = 0;

  static ScatteringModel make(const Nonlinearity& nl, double s_half_width, double T, double h,
                              int margin = 16);
  static ScatteringModel for_target(const Nonlinearity& nl, const RadiationFieldData& target,
                                    const ScatteringOptions& opts = {});
  double h() const { return grid.dr(); }
  double T() const { return M * h(); }
  RadiationFieldData window() const;  // zero field on s_j = j h, |j| <= J
  RadiationFieldData on_window(const RadiationFieldData& f) const;
};

// Lattice pieces shared with the expansion hierarchy (all levels are w = r u on m.grid).
// Level n of the free wave whose backward field is incoming: w^n_i = q_{n+i} - q_{n-i}.
std::vector<double> free_level(const ScatteringModel& m, const RadiationFieldData& incoming, long n);
RadiationFieldData read_backward(const ScatteringModel& m, const std::vector<double>& w_at_minus_M,
                                 const std::vector<double>& w_at_minus_M_minus_1);
RadiationFieldData read_forward(const ScatteringModel& m, const std::vector<double>& w_at_M_minus_1,
                                const std::vector<double>& w_at_M);
// Cauchy data at level 0 from the levels -1, 0, 1.
RadialCauchyData data_from_levels(const ScatteringModel& m, const std::vector<double>& wm,
                                  const std::vector<double>& w0, const std::vector<double>& wp);

RadiationFieldData backward_field(const ScatteringModel& m, const RadialCauchyData& d);
RadiationFieldData forward_field(const ScatteringModel& m, const RadialCauchyData& d);

// Exact lattice inverse of the free backward map: the data of w = q(t + r) - q(t - r), q' = target.
RadialCauchyData linear_seed(const ScatteringModel& m, const RadiationFieldData& target);

struct InverseResult {
  RadialCauchyData data;
  std::vector<double> residual_history;  // relative L2 residual before each update
  int iterations = 0;
  bool converged = false;
};

// Fixed point d <- d + seed(target - L-(d)), unit damping.
InverseResult inverse_radiation(const ScatteringModel& m, const RadiationFieldData& target,
                                double tol = 1e-10, int max_iterations = 25);
InverseResult inverse_radiation(const Nonlinearity& nl, const RadiationFieldData& target,
                                const ScatteringOptions& opts = {});

// Marches the incoming wave with backward field target through the interaction window.
struct IncomingMarch {
  RadialCauchyData data;        // the solution at t = 0
  RadiationFieldData forward;   // its forward field
};
IncomingMarch march_incoming(const ScatteringModel& m, const RadiationFieldData& target);

// A(target) = L+(inverse_radiation(target)); throws NumericalGuardError when the fixed point stalls.
RadiationFieldData scattering_forward(const ScatteringModel& m, const RadiationFieldData& target,
                                      double tol = 1e-10, int max_iterations = 25);
RadiationFieldData scattering_forward(const Nonlinearity& nl, const RadiationFieldData& target,
                                      const ScatteringOptions& opts = {});

}  // namespace nlscatter
