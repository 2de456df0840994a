#include "nlscatter/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlscatter/errors.hpp"
#include "nlscatter/norms.hpp"

namespace nlscatter {

namespace {

constexpr double kPi = std::numbers::pi;

// Data still significant at the outer edge of the grid.
bool touches_edge(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return false;
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return std::max(std::abs(v[n - 1]), std::abs(v[n - 2])) > 1e-10 * m;
}

}  // namespace

RadiationFieldData radiation_linear_exact(const RadialCauchyData& d,
                                          const RadialSpacetimeField* forcing, Direction dir) {
  d.validate();
  const RadialGrid& g = d.grid;
  const int N = g.n_points;
  const double h = g.dr();
  const auto Rphi = radon_radial_nodes(g, d.phi);
  const auto Rpsi = radon_radial_nodes(g, d.psi);
  bool truncated = touches_edge(d.phi) || touches_edge(d.psi);

  std::vector<double> P(2 * N + 1, 0.0);
  if (forcing) {
    NLS_REQUIRE(forcing->grid == g, ArgumentError, "forcing grid differs from the data grid");
    const int nt = static_cast<int>(forcing->values.size());
    std::vector<int> slices;
    for (int n = 0; n < nt; ++n) {
      const double t = forcing->t0 + n * forcing->dt;
      const bool keep = dir == Direction::Minus ? t <= 1e-12 * (1 + std::abs(t))
                                                : t >= -1e-12 * (1 + std::abs(t));
      if (keep) slices.push_back(n);
    }
    for (std::size_t k = 0; k < slices.size(); ++k) {
      const int n = slices[k];
      const double t = forcing->t0 + n * forcing->dt;
      const double w = (k == 0 || k + 1 == slices.size()) ? 0.5 * forcing->dt : forcing->dt;
      if (slices.size() == 1) continue;
      truncated = truncated || touches_edge(forcing->values[n]);
      const auto RF = radon_radial_nodes(g, forcing->values[n]);
      for (int j = -N; j <= N; ++j) {
        const double arg = dir == Direction::Minus ? j * h - t : t - j * h;
        P[j + N] += w * cubic_sample(RF, -N * h, h, arg);
      }
    }
  }

  auto out = RadiationFieldData::radial(-(N - 1) * h, h, 2 * N - 1);
  out.truncated = truncated;
  const double sign = dir == Direction::Minus ? -1.0 : 1.0;
  for (int j = -N + 1; j <= N - 1; ++j) {
    const int c = j + N;
    const double dpsi = (Rpsi[c + 1] - Rpsi[c - 1]) / (2 * h);
    const double d2phi = (Rphi[c + 1] - 2 * Rphi[c] + Rphi[c - 1]) / (h * h);
    const double dP = (P[c + 1] - P[c - 1]) / (2 * h);
    out.at(j + N - 1) = sign / (4 * kPi) * (dpsi + d2phi + sign * dP);
  }
  return out;
}

//==============================================================================
// Far-field extraction
//==============================================================================

namespace {

double lagrange4(const double* y, double t) {
  // nodes -1, 0, 1, 2
  const double wm = -t * (t - 1) * (t - 2) / 6.0;
  const double w0 = (t + 1) * (t - 1) * (t - 2) / 2.0;
  const double w1 = -(t + 1) * t * (t - 2) / 2.0;
  const double w2 = (t + 1) * t * (t - 1) / 6.0;
  return wm * y[0] + w0 * y[1] + w1 * y[2] + w2 * y[3];
}

}  // namespace

ExtractionResult extract_radiation_numeric(const RadialTrajectory& traj, Direction dir,
                                           const ExtractionOptions& o) {
  NLS_REQUIRE(traj.size() >= 8, ConfigurationError, "trajectory too short for extraction");
  NLS_REQUIRE(o.R > 0.0 && o.s_max > o.s_min, ConfigurationError, "invalid extraction window");
  const RadialGrid& g = traj.grid;
  const double h = g.dr();
  const double dt = traj.dt();
  ExtractionResult res;
  res.radii = {o.R, 1.25 * o.R, 1.5 * o.R};
  NLS_REQUIRE(res.radii.back() <= g.r_max - 3 * h, ConfigurationError,
              "extraction radii exceed the radial grid");
  const double ds = o.ds > 0.0 ? o.ds : dt;
  const int n_s = static_cast<int>(std::floor((o.s_max - o.s_min) / ds + 1e-9)) + 1;
  const double sgn = dir == Direction::Plus ? 1.0 : -1.0;
  const double t_first = traj.times.front(), t_last = traj.times.back();
  const int nt = static_cast<int>(traj.size());
  const int pad = o.use_stored_velocity ? 1 : 3;

  // u_t at snapshot m, sampled at radius r
  auto velocity = [&](int m, double r) {
    if (o.use_stored_velocity) return cubic_sample(traj.ut[m], 0.0, h, r);
    const double um2 = cubic_sample(traj.u[m - 2], 0.0, h, r);
    const double um1 = cubic_sample(traj.u[m - 1], 0.0, h, r);
    const double up1 = cubic_sample(traj.u[m + 1], 0.0, h, r);
    const double up2 = cubic_sample(traj.u[m + 2], 0.0, h, r);
    return (-up2 + 8 * up1 - 8 * um1 + um2) / (12 * dt);
  };

  for (double r : res.radii) {
    auto raw = RadiationFieldData::radial(o.s_min, ds, n_s);
    for (int j = 0; j < n_s; ++j) {
      const double t = o.s_min + j * ds + sgn * r;
      const double pos = (t - t_first) / dt;
      int k = static_cast<int>(std::floor(pos + 1e-9));
      const double frac = pos - k;
      if (k < pad || k + 1 + pad > nt - 1 || (frac > 1e-9 && k + 2 + pad > nt - 1)) {
        std::ostringstream os;
        os << "trajectory [" << t_first << ", " << t_last << "] does not cover t = " << t
           << " needed at radius " << r;
        throw ConfigurationError(os.str());
      }
      double v;
      if (std::abs(frac) <= 1e-9) {
        v = velocity(k, r);
      } else {
        const double y[4] = {velocity(k - 1, r), velocity(k, r), velocity(k + 1, r),
                             velocity(k + 2, r)};
        v = lagrange4(y, frac);
      }
      raw.at(j) = r * v;
    }
    res.raw.push_back(std::move(raw));
  }

  res.field = RadiationFieldData::radial(o.s_min, ds, n_s);
  double misfit = 0.0;
  std::vector<double> x;
  for (double r : res.radii) x.push_back(1.0 / r);
  const double K = static_cast<double>(x.size());
  double sx = 0, sxx = 0;
  for (double xi : x) {
    sx += xi;
    sxx += xi * xi;
  }
  const double det = K * sxx - sx * sx;
  for (int j = 0; j < n_s; ++j) {
    double sy = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      sy += res.raw[k].at(j);
      sxy += x[k] * res.raw[k].at(j);
    }
    const double a = (sxx * sy - sx * sxy) / det;
    const double b = (K * sxy - sx * sy) / det;
    res.field.at(j) = a;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double e = res.raw[k].at(j) - (a + b * x[k]);
      misfit += e * e;
    }
  }
  res.residual = std::sqrt(4 * kPi * ds * misfit);
  return res;
}

//==============================================================================
// Semilinear radiation fields through the Radon route
//==============================================================================

RadiationFieldData radiation_semilinear(const Nonlinearity& nl, const RadialCauchyData& d,
                                        Direction dir, const SemilinearRadiationOptions& opts) {
  d.validate();
  const RadialGrid& g = d.grid;
  const double T = opts.T > 0.0 ? opts.T : g.r_max;
  SolverConfig cfg;
  cfg.cfl_ratio = 1.0;
  cfg.time_step = g.dr();
  cfg.start_time = 0.0;
  cfg.end_time = dir == Direction::Minus ? -T : T;
  // keep dt = dr exactly so that s - t stays on the node grid
  const long steps = std::lround(T / g.dr());
  cfg.end_time = (dir == Direction::Minus ? -1.0 : 1.0) * steps * g.dr();
  const auto traj = solve_semilinear_radial(nl, d, cfg);
  if (nl.is_zero()) return radiation_linear_exact(d, nullptr, dir);
  RadialSpacetimeField F{g, traj.times.front(), g.dr(), {}};
  F.values.resize(traj.size());
  for (std::size_t n = 0; n < traj.size(); ++n) {
    F.values[n].assign(g.size(), 0.0);
    for (int i = 1; i < g.size(); ++i) F.values[n][i] = -nl.eval(traj.u[n][i], 0);
  }
  return radiation_linear_exact(d, &F, dir);
}

//==============================================================================
// Linear inverse
//==============================================================================

void require_mean_zero(const RadiationFieldData& target, double tol) {
  NLS_REQUIRE(target.is_radial(), PreconditionError, "inverse radiation needs a radial field");
  const double mean = target.integral();
  if (std::abs(mean) > tol) {
    std::ostringstream os;
    os << "target radiation field is not mean-zero (integral " << mean << ")";
    throw PreconditionError(os.str());
  }
}

RadialCauchyData linear_inverse_continuum(const RadiationFieldData& target, const RadialGrid& grid) {
  require_mean_zero(target);
  const int n = target.n_s;
  std::vector<double> G(n, 0.0), Y(target.values);
  for (int j = 1; j < n; ++j) G[j] = G[j - 1] + 0.5 * target.ds * (Y[j - 1] + Y[j]);
  // endpoint correction of the cumulative trapezoid (fourth order)
  auto dY = [&](int j) {
    if (j == 0) return (Y[1] - Y[0]) / target.ds;
    if (j == n - 1) return (Y[n - 1] - Y[n - 2]) / target.ds;
    return (Y[j + 1] - Y[j - 1]) / (2 * target.ds);
  };
  const double c = target.ds * target.ds / 12.0;
  const double d0 = dY(0);
  for (int j = 1; j < n; ++j) G[j] -= c * (dY(j) - d0);
  const double s_end = target.s(n - 1);
  auto Gs = [&](double s) {
    if (s >= s_end) return G[n - 1];
    return cubic_sample(G, target.s0, target.ds, s);
  };
  auto Ys = [&](double s) { return cubic_sample(Y, target.s0, target.ds, s); };
  auto d = RadialCauchyData::zeros(grid);
  for (int i = 1; i < grid.size(); ++i) {
    const double r = grid.r(i);
    d.phi[i] = (Gs(r) - Gs(-r)) / r;
    d.psi[i] = (Ys(r) - Ys(-r)) / r;
  }
  const double e = 1e-3 * target.ds;
  d.phi[0] = 2.0 * Ys(0.0);
  d.psi[0] = (Ys(e) - Ys(-e)) / e;
  return d;
}

}  // namespace nlscatter
