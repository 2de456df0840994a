#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace nlscatter {

// Nodes r_i = i*dr, i = 0..n_points, dr = r_max / n_points (origin included).
struct RadialGrid {
  double r_max = 1.0;
  int n_points = 1;

  RadialGrid() = default;
  RadialGrid(double rmax, int n);
  double dr() const { return r_max / n_points; }
  int size() const { return n_points + 1; }
  double r(int i) const { return i * dr(); }
  bool operator==(const RadialGrid& o) const {
    return r_max == o.r_max && n_points == o.n_points;
  }
};

// Cell-centred nodes x_k = -L + (k + 1/2) h, k = 0..n-1, h = 2L/n.
struct Grid3D {
  double half_width = 1.0;
  int n = 2;

  Grid3D() = default;
  Grid3D(double L, int n_per_axis);
  double h() const { return 2.0 * half_width / n; }
  double x(int k) const { return -half_width + (k + 0.5) * h(); }
  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }
  bool operator==(const Grid3D& o) const { return half_width == o.half_width && n == o.n; }
};

struct RadialCauchyData {
  RadialGrid grid;
  std::vector<double> phi;
  std::vector<double> psi;

  static RadialCauchyData zeros(const RadialGrid& g);
  template <class F, class G>
  static RadialCauchyData from_functions(const RadialGrid& g, F phi_fn, G psi_fn) {
    RadialCauchyData d = zeros(g);
    for (int i = 0; i < g.size(); ++i) {
      d.phi[i] = phi_fn(g.r(i));
      d.psi[i] = psi_fn(g.r(i));
    }
    return d;
  }
  void validate() const;
};

struct CauchyData3D {
  Grid3D grid;
  std::vector<double> phi;
  std::vector<double> psi;

  static CauchyData3D zeros(const Grid3D& g);
  void validate() const;
};

// Snapshots u(t_n), u_t(t_n) at uniformly spaced increasing times.
struct RadialTrajectory {
  RadialGrid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> ut;
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  RadialCauchyData snapshot(std::size_t n) const;
};

struct Trajectory3D {
  Grid3D grid;
  std::vector<double> times;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> ut;

  std::size_t size() const { return times.size(); }
  double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
  CauchyData3D snapshot(std::size_t n) const;
};

// Merge a backward solve (ending at the shared start time) with a forward one.
RadialTrajectory join_trajectories(const RadialTrajectory& backward, const RadialTrajectory& forward);

// Sampled radiation field on a uniform s-grid; radial when omegas is empty.
// values are stored s-major: values[j * n_omega + k].
struct RadiationFieldData {
  double s0 = 0.0;
  double ds = 1.0;
  int n_s = 0;
  std::vector<std::array<double, 3>> omegas;
  std::vector<double> omega_weights;
  std::vector<double> values;
  bool truncated = false;

  static RadiationFieldData radial(double s0, double ds, int n_s);
  bool is_radial() const { return omegas.empty(); }
  int n_omega() const { return is_radial() ? 1 : static_cast<int>(omegas.size()); }
  double s(int j) const { return s0 + j * ds; }
  double& at(int j, int k = 0) { return values[static_cast<std::size_t>(j) * n_omega() + k]; }
  double at(int j, int k = 0) const { return values[static_cast<std::size_t>(j) * n_omega() + k]; }
  // Radial: sqrt(4 pi sum ds v^2); otherwise quadrature weights over omega.
  double l2_norm() const;
  double integral() const;  // radial: sum ds v
  // Values at arbitrary s by cubic interpolation (zero outside the grid).
  double sample(double s, int k = 0) const;
  RadiationFieldData resampled(double new_s0, double new_ds, int new_n) const;
  RadiationFieldData scaled(double c) const;
  RadiationFieldData plus(const RadiationFieldData& o, double c = 1.0) const;
  bool same_layout(const RadiationFieldData& o) const;
};

double l2_distance(const RadiationFieldData& a, const RadiationFieldData& b);

// Trapezoid weights on the radial grid including the 4 pi r^2 measure.
std::vector<double> radial_volume_weights(const RadialGrid& g);

// Four-point Lagrange (cubic) interpolation of uniformly sampled data.
double cubic_sample(const std::vector<double>& v, double x0, double dx, double x);

}  // namespace nlscatter
