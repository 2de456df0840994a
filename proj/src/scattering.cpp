#include "nlscatter/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlscatter/errors.hpp"
#include "nlscatter/radiation.hpp"

namespace nlscatter {

ScatteringModel ScatteringModel::make(const Nonlinearity& nl, double S, double T, double h, int margin) {
  NLS_REQUIRE(h > 0.0 && S > 0.0, ConfigurationError, "scattering window needs h > 0 and S > 0");
  NLS_REQUIRE(margin >= 2, ConfigurationError, "scattering margin must be >= 2");
  ScatteringModel m;
  m.nl = nl;
  if (T <= 0.0) T = std::max(20.0, 4.0 * S);
  m.J = static_cast<int>(std::ceil(S / h - 1e-9));
  m.M = std::max(m.J, static_cast<int>(std::ceil(T / h - 1e-9)));
  const int N = m.M + m.J + 1 + margin;
  m.grid = RadialGrid(N * h, N);
  return m;
}

ScatteringModel ScatteringModel::for_target(const Nonlinearity& nl, const RadiationFieldData& target,
                                            const ScatteringOptions& o) {
  NLS_REQUIRE(target.is_radial() && target.n_s >= 3, ArgumentError, "scattering needs a radial field");
  const double h = o.h > 0.0 ? o.h : target.ds;
  double S = o.s_half_width;
  if (S <= 0.0) {
    double peak = 0.0;
    for (double v : target.values) peak = std::max(peak, std::abs(v));
    S = 4.0 * h;
    for (int j = 0; j < target.n_s; ++j)
      if (std::abs(target.at(j)) > 1e-13 * peak) S = std::max(S, std::abs(target.s(j)) + 2.0 * h);
  }
  return make(nl, S, o.T, h, o.margin);
}

RadiationFieldData ScatteringModel::window() const {
  return RadiationFieldData::radial(-J * h(), h(), 2 * J + 1);
}

RadiationFieldData ScatteringModel::on_window(const RadiationFieldData& f) const {
  const auto w = window();
  if (f.same_layout(w)) return f;
  return f.resampled(w.s0, w.ds, w.n_s);
}

namespace {

// w at index i with the odd extension and zero beyond the grid
double level_at(const std::vector<double>& w, int i) {
  const int N = static_cast<int>(w.size()) - 1;
  if (i < 0) return -level_at(w, -i);
  if (i > N) return 0.0;
  return w[i];
}

void forcing_level(const ScatteringModel& m, long n, const std::vector<double>& w,
                   std::vector<double>& G, bool& active) {
  active = n >= -m.M && n <= m.M - 1 && !m.nl.is_zero();
  if (!active) return;
  const RadialGrid& g = m.grid;
  G.assign(g.size(), 0.0);
  for (int i = 1; i < g.size(); ++i) {
    const double r = g.r(i);
    G[i] = -r * m.nl.eval(w[i] / r, 0);
  }
}

// Advances (prev = w^{n - dir}, cur = w^n) until cur = w^{n_end}.
void march(const ScatteringModel& m, const RadialStepper& st, std::vector<double>& prev,
           std::vector<double>& cur, long n, long n_end) {
  const int dir = n_end >= n ? 1 : -1;
  std::vector<double> G;
  bool active = false;
  while (n != n_end) {
    forcing_level(m, n, cur, G, active);
    st.advance(prev, cur, active ? &G : nullptr);
    prev.swap(cur);
    n += dir;
    for (double v : cur)
      if (!std::isfinite(v)) throw NumericalGuardError("non-finite value in the scattering march");
  }
}

// Lattice primitive q with (q_{k+1} - q_{k-1}) / 2h = target_k, q = 0 for k <= -J.
struct Primitive {
  int J;
  std::vector<double> q;  // indices -J .. J+1
  double operator()(int k) const {
    if (k <= -J) return 0.0;
    const int top = J + 1;
    if (k > top) k = top - ((k - top) % 2);
    return q[k + J];
  }
};

Primitive primitive(const ScatteringModel& m, const RadiationFieldData& target) {
  const auto t = m.on_window(target);
  Primitive p{m.J, std::vector<double>(2 * m.J + 2, 0.0)};
  auto q = [&](int k) -> double& { return p.q[k + m.J]; };
  const double h = m.h();
  for (int j = -m.J; j <= m.J; ++j) {
    const double below = j - 1 <= -m.J ? 0.0 : q(j - 1);
    q(j + 1) = below + 2.0 * h * t.at(j + m.J);
  }
  return p;
}

}  // namespace

std::vector<double> free_level(const ScatteringModel& m, const RadiationFieldData& incoming, long n) {
  const auto q = primitive(m, incoming);
  const int N = m.grid.n_points;
  std::vector<double> w(N + 1);
  for (int i = 0; i <= N; ++i) w[i] = q(static_cast<int>(n) + i) - q(static_cast<int>(n) - i);
  return w;
}

RadiationFieldData read_backward(const ScatteringModel& m, const std::vector<double>& a,
                                 const std::vector<double>& b) {
  auto out = m.window();
  const double h = m.h();
  for (int j = -m.J; j <= m.J; ++j)
    out.at(j + m.J) = (level_at(a, j + m.M + 1) - level_at(b, j + m.M)) / (2 * h);
  return out;
}

RadiationFieldData read_forward(const ScatteringModel& m, const std::vector<double>& a,
                                const std::vector<double>& b) {
  auto out = m.window();
  const double h = m.h();
  for (int j = -m.J; j <= m.J; ++j) {
    const int i = m.M - j - 1;
    out.at(j + m.J) = (level_at(b, i) - level_at(a, i + 1)) / (2 * h);
  }
  return out;
}

RadialCauchyData data_from_levels(const ScatteringModel& m, const std::vector<double>& wm,
                                  const std::vector<double>& w0, const std::vector<double>& wp) {
  RadialStepper st(m.grid, m.h(), true);
  RadialCauchyData d = RadialCauchyData::zeros(m.grid);
  st.to_u(w0, d.phi);
  st.to_u(st.recover_velocity(wp, wm), d.psi);
  return d;
}

RadiationFieldData backward_field(const ScatteringModel& m, const RadialCauchyData& d) {
  d.validate();
  NLS_REQUIRE(d.grid == m.grid, ArgumentError, "data grid differs from the scattering grid");
  RadialStepper st(m.grid, m.h(), true);
  std::vector<double> w0, w1, wm, G;
  st.from_u(d.phi, w0);
  st.from_u(d.psi, w1);
  bool active = false;
  forcing_level(m, 0, w0, G, active);
  st.start(w0, w1, active ? &G : nullptr, -1, wm);
  march(m, st, w0, wm, -1, -m.M - 1);
  return read_backward(m, w0, wm);
}

RadiationFieldData forward_field(const ScatteringModel& m, const RadialCauchyData& d) {
  d.validate();
  NLS_REQUIRE(d.grid == m.grid, ArgumentError, "data grid differs from the scattering grid");
  RadialStepper st(m.grid, m.h(), true);
  std::vector<double> w0, w1, wp, G;
  st.from_u(d.phi, w0);
  st.from_u(d.psi, w1);
  bool active = false;
  forcing_level(m, 0, w0, G, active);
  st.start(w0, w1, active ? &G : nullptr, 1, wp);
  march(m, st, w0, wp, 1, m.M);
  return read_forward(m, w0, wp);
}

RadialCauchyData linear_seed(const ScatteringModel& m, const RadiationFieldData& target) {
  return data_from_levels(m, free_level(m, target, -1), free_level(m, target, 0),
                          free_level(m, target, 1));
}

IncomingMarch march_incoming(const ScatteringModel& m, const RadiationFieldData& target) {
  auto prev = free_level(m, target, -m.M - 1);
  auto cur = free_level(m, target, -m.M);
  RadialStepper st(m.grid, m.h(), true);
  march(m, st, prev, cur, -m.M, 0);
  std::vector<double> wm = prev, w0 = cur;
  march(m, st, prev, cur, 0, 1);
  IncomingMarch res;
  res.data = data_from_levels(m, wm, w0, cur);
  march(m, st, prev, cur, 1, m.M);
  res.forward = read_forward(m, prev, cur);
  return res;
}

InverseResult inverse_radiation(const ScatteringModel& m, const RadiationFieldData& target,
                                double tol, int max_iterations) {
  require_mean_zero(target);
  NLS_REQUIRE(max_iterations >= 1, ConfigurationError, "max_iterations must be >= 1");
  const auto t = m.on_window(target);
  const double scale = t.l2_norm();
  InverseResult res;
  res.data = linear_seed(m, t);
  if (scale == 0.0) {
    res.converged = true;
    res.residual_history.push_back(0.0);
    return res;
  }
  for (int k = 0; k <= max_iterations; ++k) {
    const auto rho = t.plus(backward_field(m, res.data), -1.0);  // target - L-(d)
    const double r = rho.l2_norm() / scale;
    res.residual_history.push_back(r);
    if (r < tol) {
      res.converged = true;
      return res;
    }
    if (k == max_iterations) break;
    const auto corr = linear_seed(m, rho);
    for (int i = 0; i < m.grid.size(); ++i) {
      res.data.phi[i] += corr.phi[i];
      res.data.psi[i] += corr.psi[i];
    }
    res.iterations = k + 1;
  }
  return res;
}

InverseResult inverse_radiation(const Nonlinearity& nl, const RadiationFieldData& target,
                                const ScatteringOptions& opts) {
  const auto m = ScatteringModel::for_target(nl, target, opts);
  return inverse_radiation(m, target, opts.tol, opts.max_iterations);
}

RadiationFieldData scattering_forward(const ScatteringModel& m, const RadiationFieldData& target,
                                      double tol, int max_iterations) {
  const auto inv = inverse_radiation(m, target, tol, max_iterations);
  if (!inv.converged) {
    std::ostringstream os;
    os << "inverse radiation did not converge; residual history:";
    for (double r : inv.residual_history) os << ' ' << r;
    throw NumericalGuardError(os.str());
  }
  return forward_field(m, inv.data);
}

RadiationFieldData scattering_forward(const Nonlinearity& nl, const RadiationFieldData& target,
                                      const ScatteringOptions& opts) {
  const auto m = ScatteringModel::for_target(nl, target, opts);
  return scattering_forward(m, target, opts.tol, opts.max_iterations);
}

}  // namespace nlscatter
