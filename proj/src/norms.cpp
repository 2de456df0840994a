#include "nlscatter/norms.hpp"

#include <cmath>
#include <numbers>

#include "nlscatter/errors.hpp"

namespace nlscatter {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double energy_linear(const RadialCauchyData& d) {
  d.validate();
  const RadialGrid& g = d.grid;
  const int N = g.n_points;
  const double h = g.dr();
  auto w0 = [&](int i) {
    if (i < 0) return -g.r(-i) * d.phi[-i];
    if (i > N) return 0.0;
    return g.r(i) * d.phi[i];
  };
  double acc = 0.0;
  for (int i = 0; i <= N; ++i) {
    const double wr = (w0(i + 1) - w0(i - 1)) / (2.0 * h);
    const double wt = g.r(i) * d.psi[i];
    const double trap = (i == 0 || i == N) ? 0.5 * h : h;
    acc += trap * (wt * wt + wr * wr);
  }
  return 2.0 * kPi * acc;
}

double energy_linear(const CauchyData3D& d) {
  d.validate();
  const Grid3D& g = d.grid;
  const int n = g.n;
  const double h = g.h();
  auto phi = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i >= n || j >= n || k >= n) return 0.0;
    return d.phi[g.index(i, j, k)];
  };
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double gx = (phi(i + 1, j, k) - phi(i - 1, j, k)) / (2 * h);
        const double gy = (phi(i, j + 1, k) - phi(i, j - 1, k)) / (2 * h);
        const double gz = (phi(i, j, k + 1) - phi(i, j, k - 1)) / (2 * h);
        const double ps = d.psi[g.index(i, j, k)];
        acc += ps * ps + gx * gx + gy * gy + gz * gz;
      }
  return 0.5 * acc * h * h * h;
}

double energy_semilinear(const RadialCauchyData& d, const Nonlinearity& nl) {
  const double e0 = energy_linear(d);
  const auto w = radial_volume_weights(d.grid);
  double acc = 0.0;
  for (int i = 0; i < d.grid.size(); ++i)
    if (d.phi[i] != 0.0) acc += w[i] * nl.antiderivative(d.phi[i]);
  return e0 + acc;
}

double energy_semilinear(const CauchyData3D& d, const Nonlinearity& nl) {
  const double e0 = energy_linear(d);
  const double h = d.grid.h();
  double acc = 0.0;
  for (double v : d.phi)
    if (v != 0.0) acc += nl.antiderivative(v);
  return e0 + acc * h * h * h;
}

bool strichartz_admissible(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) return false;
  const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
  return std::abs(ip + 3.0 / q - 0.5) <= 1e-12 && q >= 6.0 && q < kInfinity;
}

namespace {

double time_combine(const std::vector<double>& spatial, double dt, double p) {
  if (spatial.empty()) return 0.0;
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : spatial) m = std::max(m, v);
    return m;
  }
  if (spatial.size() == 1) return spatial[0];
  double acc = 0.0;
  for (std::size_t n = 0; n < spatial.size(); ++n) {
    const double trap = (n == 0 || n + 1 == spatial.size()) ? 0.5 : 1.0;
    acc += trap * dt * std::pow(spatial[n], p);
  }
  return std::pow(acc, 1.0 / p);
}

void check_exponents(double p, double q) {
  NLS_REQUIRE(p > 0.0 && q > 0.0, ArgumentError, "Lebesgue exponents must be positive");
  NLS_REQUIRE(!std::isinf(q), ArgumentError, "spatial exponent must be finite");
}

}  // namespace

double norm_lplq_samples(const RadialGrid& g, const std::vector<std::vector<double>>& u, double dt,
                         double p, double q) {
  check_exponents(p, q);
  const auto w = radial_volume_weights(g);
  std::vector<double> spatial(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) acc += w[i] * std::pow(std::abs(u[n][i]), q);
    spatial[n] = std::pow(acc, 1.0 / q);
  }
  return time_combine(spatial, dt, p);
}

LpLqNorm norm_lplq(const RadialTrajectory& traj, double p, double q) {
  NLS_REQUIRE(!traj.times.empty(), ArgumentError, "empty trajectory");
  return {norm_lplq_samples(traj.grid, traj.u, traj.dt(), p, q), strichartz_admissible(p, q)};
}

LpLqNorm norm_lplq(const Trajectory3D& traj, double p, double q) {
  check_exponents(p, q);
  NLS_REQUIRE(!traj.times.empty(), ArgumentError, "empty trajectory");
  const double h3 = std::pow(traj.grid.h(), 3);
  std::vector<double> spatial(traj.u.size());
  for (std::size_t n = 0; n < traj.u.size(); ++n) {
    double acc = 0.0;
    for (double v : traj.u[n]) acc += std::pow(std::abs(v), q);
    spatial[n] = std::pow(acc * h3, 1.0 / q);
  }
  return {time_combine(spatial, traj.dt(), p), strichartz_admissible(p, q)};
}

RadonValue radon_radial(const RadialGrid& grid, const std::vector<double>& g, double s) {
  NLS_REQUIRE(static_cast<int>(g.size()) == grid.size(), ArgumentError,
              "radial field does not match its grid");
  const double a = std::abs(s);
  if (a >= grid.r_max) return {0.0, a > grid.r_max};
  const double h = grid.dr();
  const int N = grid.n_points;
  auto integrand = [&](int i) { return g[i] * grid.r(i); };
  const int k = static_cast<int>(std::floor(a / h));
  const double t = a / h - k;
  // partial cell [a, r_{k+1}] with the linear interpolant of g(rho) rho
  const double ya = (1.0 - t) * integrand(k) + t * integrand(std::min(k + 1, N));
  double acc = 0.5 * (ya + integrand(std::min(k + 1, N))) * (1.0 - t) * h;
  for (int i = k + 1; i < N; ++i) acc += 0.5 * h * (integrand(i) + integrand(i + 1));
  return {2.0 * kPi * acc, false};
}

std::vector<double> radon_radial_nodes(const RadialGrid& grid, const std::vector<double>& g) {
  NLS_REQUIRE(static_cast<int>(g.size()) == grid.size(), ArgumentError,
              "radial field does not match its grid");
  const int N = grid.n_points;
  const double h = grid.dr();
  std::vector<double> tail(N + 1, 0.0);
  for (int i = N - 1; i >= 0; --i)
    tail[i] = tail[i + 1] + 0.5 * h * (g[i] * grid.r(i) + g[i + 1] * grid.r(i + 1));
  std::vector<double> out(2 * N + 1);
  for (int j = -N; j <= N; ++j) out[j + N] = 2.0 * kPi * tail[std::abs(j)];
  return out;
}

}  // namespace nlscatter
