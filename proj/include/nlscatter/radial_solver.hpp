#pragma once

#include <functional>
#include <vector>

#include "nlscatter/grid.hpp"
#include "nlscatter/nonlinearity.hpp"

namespace nlscatter {

enum class Boundary { ReflectingOrigin, OutflowRmax, Periodic3D, Outflow3D };

struct SolverConfig {
  double time_step = 0.0;  // 0 selects cfl_ratio * spacing
  double cfl_ratio = 1.0;
  double start_time = 0.0;
  double end_time = 1.0;
  Boundary boundary = Boundary::OutflowRmax;
  int store_stride = 1;
  double blowup_threshold = 1e6;

  // Step actually used: the requested step shrunk so that an integer number of steps
  // reaches end_time. cfl_limit is the stability bound on dt/spacing of the scheme.
  double resolve_step(double spacing, double cfl_limit) const;
};

// Space-time field sampled at t = t0 + n dt on a radial grid (potentials, sources).
struct RadialSpacetimeField {
  RadialGrid grid;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<std::vector<double>> values;

  static RadialSpacetimeField from_function(const RadialGrid& g, double t0, double dt, int n_times,
                                            const std::function<double(double, double)>& fn);
};

// Leapfrog on w = r u for w_tt - w_rr = r F with w(t, 0) = 0.
// At dt = dr the homogeneous update is exact transport along characteristics.
class RadialStepper {
 public:
  RadialStepper(const RadialGrid& grid, double dt, bool outflow = true);

  double dt() const { return dt_; }
  double lambda() const { return lambda_; }
  const RadialGrid& grid() const { return grid_; }

  // prev <- 2 cur - prev + lambda^2 D2 cur + dt^2 G
  void advance(std::vector<double>& prev, const std::vector<double>& cur,
               const std::vector<double>* G) const;
  // First level w^{dir} from (w0, w1 = r psi) and G0, third-order accurate.
  void start(const std::vector<double>& w0, const std::vector<double>& w1,
             const std::vector<double>* G0, int dir, std::vector<double>& out) const;
  // Inverse of the start map: w1 from the levels w^{+1}, w^{-1}.
  std::vector<double> recover_velocity(const std::vector<double>& wp,
                                       const std::vector<double>& wm) const;
  void to_u(const std::vector<double>& w, std::vector<double>& u) const;
  void from_u(const std::vector<double>& u, std::vector<double>& w) const;

 private:
  RadialGrid grid_;
  double dt_;
  double lambda_;
  bool outflow_;
};

// Forcing callback: fills F (u-level right-hand side, box u = F) at step n.
using RadialForcingFn =
    std::function<void(long step, double t, const std::vector<double>& u, std::vector<double>& F)>;

RadialTrajectory integrate_radial(const RadialCauchyData& d, const SolverConfig& cfg,
                                  const RadialForcingFn& forcing);

RadialTrajectory solve_linear_radial(const RadialCauchyData& d, const SolverConfig& cfg);
RadialTrajectory solve_linear_radial(const RadialCauchyData& d, const RadialSpacetimeField& forcing,
                                     const SolverConfig& cfg);
RadialTrajectory solve_semilinear_radial(const Nonlinearity& nl, const RadialCauchyData& d,
                                         const SolverConfig& cfg);
// box w + V w = g
RadialTrajectory solve_potential_radial(const RadialSpacetimeField& V, const RadialSpacetimeField& g,
                                        const RadialCauchyData& d, const SolverConfig& cfg);

// Forward to end_time and backward to -end_time from the same data, joined.
RadialTrajectory solve_semilinear_radial_two_sided(const Nonlinearity& nl, const RadialCauchyData& d,
                                                   SolverConfig cfg);

}  // namespace nlscatter
