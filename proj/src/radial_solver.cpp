#include "nlscatter/radial_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlscatter/errors.hpp"

namespace nlscatter {

double SolverConfig::resolve_step(double spacing, double cfl_limit) const {
  NLS_REQUIRE(cfl_ratio > 0.0 && cfl_ratio <= 1.0, ConfigurationError, "cfl_ratio must lie in (0, 1]");
  NLS_REQUIRE(store_stride >= 1, ConfigurationError, "store_stride must be >= 1");
  const double dt_max = cfl_ratio * spacing * cfl_limit;
  double dt = time_step > 0.0 ? time_step : dt_max;
  NLS_REQUIRE(dt <= dt_max * (1.0 + 1e-12), ConfigurationError, "time step violates the CFL bound");
  const double span = std::abs(end_time - start_time);
  if (span == 0.0) return dt;
  const double steps = std::ceil(span / dt - 1e-9);
  return span / steps;
}

RadialSpacetimeField RadialSpacetimeField::from_function(
    const RadialGrid& g, double t0, double dt, int n_times,
    const std::function<double(double, double)>& fn) {
  RadialSpacetimeField f{g, t0, dt, {}};
  f.values.assign(n_times, std::vector<double>(g.size()));
  for (int n = 0; n < n_times; ++n)
    for (int i = 0; i < g.size(); ++i) f.values[n][i] = fn(t0 + n * dt, g.r(i));
  return f;
}

//==============================================================================
// RadialStepper
//==============================================================================

RadialStepper::RadialStepper(const RadialGrid& grid, double dt, bool outflow)
    : grid_(grid), dt_(dt), lambda_(dt / grid.dr()), outflow_(outflow) {
  NLS_REQUIRE(lambda_ <= 1.0 + 1e-12, ConfigurationError, "radial step violates CFL (dt > dr)");
}

void RadialStepper::advance(std::vector<double>& prev, const std::vector<double>& cur,
                            const std::vector<double>* G) const {
  const int N = grid_.n_points;
  const double l2 = lambda_ * lambda_;
  const double dt2 = dt_ * dt_;
  prev[0] = 0.0;
  if (lambda_ == 1.0) {
    for (int i = 1; i < N; ++i) prev[i] = cur[i + 1] + cur[i - 1] - prev[i];
  } else {
    for (int i = 1; i < N; ++i)
      prev[i] = 2.0 * cur[i] - prev[i] + l2 * (cur[i + 1] - 2.0 * cur[i] + cur[i - 1]);
  }
  if (G)
    for (int i = 1; i < N; ++i) prev[i] += dt2 * (*G)[i];
  prev[N] = outflow_ ? cur[N] - lambda_ * (cur[N] - cur[N - 1]) : 0.0;
}

void RadialStepper::start(const std::vector<double>& w0, const std::vector<double>& w1,
                          const std::vector<double>* G0, int dir, std::vector<double>& out) const {
  const int N = grid_.n_points;
  const double l2 = lambda_ * lambda_;
  auto at = [N](const std::vector<double>& v, int i) {
    if (i < 0) return -v[-i];
    if (i > N) return 0.0;
    return v[i];
  };
  out.assign(N + 1, 0.0);
  for (int i = 1; i <= N; ++i) {
    const double lap0 = at(w0, i + 1) - 2.0 * w0[i] + at(w0, i - 1);
    const double lap1 = at(w1, i + 1) - 2.0 * w1[i] + at(w1, i - 1);
    double v = w0[i] + 0.5 * l2 * lap0 + dir * dt_ * (w1[i] + l2 / 6.0 * lap1);
    if (G0) v += 0.5 * dt_ * dt_ * (*G0)[i];
    out[i] = v;
  }
}

std::vector<double> RadialStepper::recover_velocity(const std::vector<double>& wp,
                                                    const std::vector<double>& wm) const {
  // (l2/6) x_{i-1} + (1 - l2/3) x_i + (l2/6) x_{i+1} = b_i, x_0 = x_{N+1} = 0
  const int N = grid_.n_points;
  const double l2 = lambda_ * lambda_;
  const double off = l2 / 6.0, diag = 1.0 - l2 / 3.0;
  std::vector<double> x(N + 1, 0.0);
  if (N < 1) return x;
  std::vector<double> c(N + 1, 0.0), d(N + 1, 0.0);
  for (int i = 1; i <= N; ++i) {
    const double b = (wp[i] - wm[i]) / (2.0 * dt_);
    const double denom = diag - (i > 1 ? off * c[i - 1] : 0.0);
    c[i] = off / denom;
    d[i] = (b - (i > 1 ? off * d[i - 1] : 0.0)) / denom;
  }
  x[N] = d[N];
  for (int i = N - 1; i >= 1; --i) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

void RadialStepper::to_u(const std::vector<double>& w, std::vector<double>& u) const {
  const int N = grid_.n_points;
  const double h = grid_.dr();
  u.resize(N + 1);
  for (int i = 1; i <= N; ++i) u[i] = w[i] / (i * h);
  // w = a r + b r^3 + ...: u(0) = a to fourth order
  u[0] = (8.0 * w[1] - w[2]) / (6.0 * h);
}

void RadialStepper::from_u(const std::vector<double>& u, std::vector<double>& w) const {
  const int N = grid_.n_points;
  w.resize(N + 1);
  for (int i = 0; i <= N; ++i) w[i] = grid_.r(i) * u[i];
}

//==============================================================================
// Integrators
//==============================================================================

RadialTrajectory integrate_radial(const RadialCauchyData& d, const SolverConfig& cfg,
                                  const RadialForcingFn& forcing) {
  d.validate();
  NLS_REQUIRE(cfg.boundary == Boundary::OutflowRmax || cfg.boundary == Boundary::ReflectingOrigin,
              ConfigurationError, "radial solves need a radial boundary condition");
  const RadialGrid& g = d.grid;
  const double dt = cfg.resolve_step(g.dr(), 1.0);
  const double span = cfg.end_time - cfg.start_time;
  const long n_steps = span == 0.0 ? 0 : std::lround(std::abs(span) / dt);
  const int dir = span >= 0.0 ? 1 : -1;
  RadialStepper st(g, dt, cfg.boundary == Boundary::OutflowRmax);
  const int N = g.n_points;

  std::vector<double> wprev, wcur, wnext, u(N + 1), F(N + 1), G(N + 1), ut(N + 1), wt(N + 1);
  st.from_u(d.phi, wcur);
  std::vector<double> w1;
  st.from_u(d.psi, w1);

  auto eval_forcing = [&](long n, const std::vector<double>& w) -> const std::vector<double>* {
    if (!forcing) return nullptr;
    st.to_u(w, u);
    std::fill(F.begin(), F.end(), 0.0);
    forcing(n, cfg.start_time + dir * n * dt, u, F);
    for (int i = 0; i <= N; ++i) G[i] = g.r(i) * F[i];
    return &G;
  };

  RadialTrajectory traj;
  traj.grid = g;
  double peak = 0.0;
  for (double v : d.phi) peak = std::max(peak, std::abs(v));
  bool warned = false;
  auto store = [&](long n, const std::vector<double>& w, const std::vector<double>* wt_src) {
    st.to_u(w, u);
    for (int i = 0; i <= N; ++i) {
      if (!std::isfinite(u[i]) || std::abs(u[i]) > cfg.blowup_threshold) {
        std::ostringstream os;
        os << "blow-up guard: |u| exceeded " << cfg.blowup_threshold << " at t="
           << cfg.start_time + dir * n * dt << ", r=" << g.r(i);
        throw NumericalGuardError(os.str());
      }
      peak = std::max(peak, std::abs(u[i]));
    }
    if (!warned && peak > 0.0 &&
        std::max(std::abs(u[N]), std::abs(u[N - 1])) > 1e-10 * peak) {
      warned = true;
      std::ostringstream os;
      os << "truncation: solution support reached r_max at t=" << cfg.start_time + dir * n * dt;
      traj.warnings.push_back(os.str());
    }
    if (n % cfg.store_stride != 0) return;
    if (wt_src) {
      st.to_u(*wt_src, ut);
    } else {
      ut = d.psi;
    }
    traj.times.push_back(cfg.start_time + dir * n * dt);
    traj.u.push_back(u);
    traj.ut.push_back(ut);
  };

  const std::vector<double>* G0 = eval_forcing(0, wcur);
  st.start(wcur, w1, G0, dir, wnext);
  store(0, wcur, nullptr);
  wprev.swap(wcur);  // prev = w^0
  wcur.swap(wnext);  // cur = w^1
  for (long n = 1; n <= n_steps; ++n) {
    // wprev = w^{n-1}, wcur = w^n; produce w^{n+1} in wprev
    const std::vector<double>* Gn = eval_forcing(n, wcur);
    std::vector<double> wold = wprev;
    st.advance(wprev, wcur, Gn);
    // velocity in the sense of the start map, so any snapshot restarts the same lattice orbit
    wt = dir > 0 ? st.recover_velocity(wprev, wold) : st.recover_velocity(wold, wprev);
    store(n, wcur, &wt);
    wprev.swap(wcur);
  }
  if (dir < 0) {
    std::reverse(traj.times.begin(), traj.times.end());
    std::reverse(traj.u.begin(), traj.u.end());
    std::reverse(traj.ut.begin(), traj.ut.end());
  }
  return traj;
}

RadialTrajectory solve_linear_radial(const RadialCauchyData& d, const SolverConfig& cfg) {
  return integrate_radial(d, cfg, nullptr);
}

namespace {

const std::vector<double>& field_slice(const RadialSpacetimeField& f, double t, double dt) {
  NLS_REQUIRE(std::abs(f.dt - dt) <= 1e-9 * dt, ArgumentError,
              "space-time field is not sampled on the solver time grid");
  const double pos = (t - f.t0) / f.dt;
  const long m = std::lround(pos);
  NLS_REQUIRE(std::abs(pos - m) < 1e-6 && m >= 0 && m < static_cast<long>(f.values.size()),
              ArgumentError, "space-time field does not cover the solve interval");
  return f.values[m];
}

}  // namespace

RadialTrajectory solve_linear_radial(const RadialCauchyData& d, const RadialSpacetimeField& forcing,
                                     const SolverConfig& cfg) {
  NLS_REQUIRE(forcing.grid == d.grid, ArgumentError, "forcing grid differs from the data grid");
  const double dt = cfg.resolve_step(d.grid.dr(), 1.0);
  return integrate_radial(d, cfg,
                          [&](long, double t, const std::vector<double>&, std::vector<double>& F) {
                            F = field_slice(forcing, t, dt);
                          });
}

RadialTrajectory solve_potential_radial(const RadialSpacetimeField& V, const RadialSpacetimeField& g,
                                        const RadialCauchyData& d, const SolverConfig& cfg) {
  NLS_REQUIRE(V.grid == d.grid && g.grid == d.grid, ArgumentError,
              "potential/source grid differs from the data grid");
  const double dt = cfg.resolve_step(d.grid.dr(), 1.0);
  return integrate_radial(d, cfg,
                          [&](long, double t, const std::vector<double>& u, std::vector<double>& F) {
                            const auto& v = field_slice(V, t, dt);
                            const auto& s = field_slice(g, t, dt);
                            for (std::size_t i = 0; i < F.size(); ++i) F[i] = -v[i] * u[i] + s[i];
                          });
}

RadialTrajectory solve_semilinear_radial(const Nonlinearity& nl, const RadialCauchyData& d,
                                         const SolverConfig& cfg) {
  if (nl.is_zero()) return integrate_radial(d, cfg, nullptr);
  return integrate_radial(d, cfg,
                          [&](long, double, const std::vector<double>& u, std::vector<double>& F) {
                            for (std::size_t i = 1; i < F.size(); ++i) F[i] = -nl.eval(u[i], 0);
                          });
}

RadialTrajectory solve_semilinear_radial_two_sided(const Nonlinearity& nl, const RadialCauchyData& d,
                                                   SolverConfig cfg) {
  const double T = std::abs(cfg.end_time - cfg.start_time);
  const double t0 = cfg.start_time;
  cfg.end_time = t0 - T;
  auto back = solve_semilinear_radial(nl, d, cfg);
  cfg.end_time = t0 + T;
  auto fwd = solve_semilinear_radial(nl, d, cfg);
  return join_trajectories(back, fwd);
}

}  // namespace nlscatter
