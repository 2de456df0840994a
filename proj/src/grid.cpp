#include "nlscatter/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlscatter/errors.hpp"

namespace nlscatter {

RadialGrid::RadialGrid(double rmax, int n) : r_max(rmax), n_points(n) {
  NLS_REQUIRE(rmax > 0.0, ArgumentError, "radial grid needs r_max > 0");
  NLS_REQUIRE(n >= 2, ArgumentError, "radial grid needs n_points >= 2");
}

Grid3D::Grid3D(double L, int n_per_axis) : half_width(L), n(n_per_axis) {
  NLS_REQUIRE(L > 0.0, ArgumentError, "cube needs L > 0");
  NLS_REQUIRE(n_per_axis >= 4, ArgumentError, "cube needs at least 4 nodes per axis");
}

RadialCauchyData RadialCauchyData::zeros(const RadialGrid& g) {
  return {g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0)};
}

void RadialCauchyData::validate() const {
  NLS_REQUIRE(static_cast<int>(phi.size()) == grid.size() &&
                  static_cast<int>(psi.size()) == grid.size(),
              ArgumentError, "Cauchy data do not match their radial grid");
  for (std::size_t i = 0; i < phi.size(); ++i)
    NLS_REQUIRE(std::isfinite(phi[i]) && std::isfinite(psi[i]), ArgumentError,
                "Cauchy data contain non-finite values");
}

CauchyData3D CauchyData3D::zeros(const Grid3D& g) {
  return {g, std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.0)};
}

void CauchyData3D::validate() const {
  NLS_REQUIRE(phi.size() == grid.size() && psi.size() == grid.size(), ArgumentError,
              "Cauchy data do not match their cube");
}

RadialCauchyData RadialTrajectory::snapshot(std::size_t n) const {
  NLS_REQUIRE(n < times.size(), ArgumentError, "snapshot index out of range");
  return {grid, u[n], ut[n]};
}

CauchyData3D Trajectory3D::snapshot(std::size_t n) const {
  NLS_REQUIRE(n < times.size(), ArgumentError, "snapshot index out of range");
  return {grid, u[n], ut[n]};
}

RadialTrajectory join_trajectories(const RadialTrajectory& backward,
                                   const RadialTrajectory& forward) {
  NLS_REQUIRE(backward.grid == forward.grid, ArgumentError, "trajectories on different grids");
  NLS_REQUIRE(!backward.times.empty() && !forward.times.empty(), ArgumentError,
              "cannot join empty trajectories");
  NLS_REQUIRE(std::abs(backward.times.back() - forward.times.front()) <= 1e-12 * (1.0 + std::abs(forward.times.front())),
              ArgumentError, "trajectories do not share their junction time");
  RadialTrajectory out{backward.grid, backward.times, backward.u, backward.ut, backward.warnings};
  out.warnings.insert(out.warnings.end(), forward.warnings.begin(), forward.warnings.end());
  out.times.insert(out.times.end(), forward.times.begin() + 1, forward.times.end());
  out.u.insert(out.u.end(), forward.u.begin() + 1, forward.u.end());
  out.ut.insert(out.ut.end(), forward.ut.begin() + 1, forward.ut.end());
  return out;
}

RadiationFieldData RadiationFieldData::radial(double s0, double ds, int n_s) {
  NLS_REQUIRE(ds > 0.0 && n_s > 0, ArgumentError, "radiation field needs ds > 0 and n_s > 0");
  RadiationFieldData r;
  r.s0 = s0;
  r.ds = ds;
  r.n_s = n_s;
  r.values.assign(n_s, 0.0);
  return r;
}

double RadiationFieldData::l2_norm() const {
  double acc = 0.0;
  const int no = n_omega();
  for (int j = 0; j < n_s; ++j)
    for (int k = 0; k < no; ++k) {
      const double w = is_radial() ? 4.0 * std::numbers::pi : omega_weights[k];
      acc += w * ds * at(j, k) * at(j, k);
    }
  return std::sqrt(acc);
}

double RadiationFieldData::integral() const {
  double acc = 0.0;
  for (int j = 0; j < n_s; ++j) acc += ds * at(j, 0);
  return acc;
}

double cubic_sample(const std::vector<double>& v, double x0, double dx, double x) {
  const int n = static_cast<int>(v.size());
  const double pos = (x - x0) / dx;
  if (pos < -1e-9 || pos > n - 1 + 1e-9) return 0.0;
  int k = static_cast<int>(std::floor(pos));
  k = std::clamp(k, 0, n - 2);
  const double t = pos - k;
  if (t == 0.0) return v[k];
  auto val = [&](int i) { return (i < 0 || i >= n) ? 0.0 : v[i]; };
  const double ym = val(k - 1), y0 = val(k), y1 = val(k + 1), y2 = val(k + 2);
  // Lagrange weights on nodes -1, 0, 1, 2
  const double wm = -t * (t - 1) * (t - 2) / 6.0;
  const double w0 = (t + 1) * (t - 1) * (t - 2) / 2.0;
  const double w1 = -(t + 1) * t * (t - 2) / 2.0;
  const double w2 = (t + 1) * t * (t - 1) / 6.0;
  return wm * ym + w0 * y0 + w1 * y1 + w2 * y2;
}

double RadiationFieldData::sample(double s, int k) const {
  const int no = n_omega();
  std::vector<double> col(n_s);
  for (int j = 0; j < n_s; ++j) col[j] = values[static_cast<std::size_t>(j) * no + k];
  return cubic_sample(col, s0, ds, s);
}

RadiationFieldData RadiationFieldData::resampled(double new_s0, double new_ds, int new_n) const {
  RadiationFieldData out = *this;
  out.s0 = new_s0;
  out.ds = new_ds;
  out.n_s = new_n;
  const int no = n_omega();
  out.values.assign(static_cast<std::size_t>(new_n) * no, 0.0);
  for (int k = 0; k < no; ++k) {
    std::vector<double> col(n_s);
    for (int j = 0; j < n_s; ++j) col[j] = at(j, k);
    for (int j = 0; j < new_n; ++j) out.at(j, k) = cubic_sample(col, s0, ds, new_s0 + j * new_ds);
  }
  return out;
}

RadiationFieldData RadiationFieldData::scaled(double c) const {
  RadiationFieldData out = *this;
  for (auto& v : out.values) v *= c;
  return out;
}

bool RadiationFieldData::same_layout(const RadiationFieldData& o) const {
  return n_s == o.n_s && std::abs(s0 - o.s0) <= 1e-9 * std::max(1.0, ds) &&
         std::abs(ds - o.ds) <= 1e-12 * ds && omegas.size() == o.omegas.size();
}

RadiationFieldData RadiationFieldData::plus(const RadiationFieldData& o, double c) const {
  NLS_REQUIRE(same_layout(o), ArgumentError, "radiation fields on different grids");
  RadiationFieldData out = *this;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += c * o.values[i];
  out.truncated = truncated || o.truncated;
  return out;
}

double l2_distance(const RadiationFieldData& a, const RadiationFieldData& b) {
  return a.plus(b, -1.0).l2_norm();
}

std::vector<double> radial_volume_weights(const RadialGrid& g) {
  std::vector<double> w(g.size());
  const double h = g.dr();
  for (int i = 0; i < g.size(); ++i) {
    const double r = g.r(i);
    const double trap = (i == 0 || i == g.n_points) ? 0.5 * h : h;
    w[i] = 4.0 * std::numbers::pi * r * r * trap;
  }
  return w;
}

}  // namespace nlscatter
