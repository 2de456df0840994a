#include "nlscatter/solver3d.hpp"

#include <algorithm>
#include <cmath>

#include "nlscatter/errors.hpp"

namespace nlscatter {

Stepper3D::Stepper3D(const Grid3D& grid, double dt, Boundary boundary)
    : grid_(grid), dt_(dt), boundary_(boundary) {
  NLS_REQUIRE(boundary == Boundary::Outflow3D || boundary == Boundary::Periodic3D, ConfigurationError,
              "3D solves need the outflow-3d or periodic-3d boundary");
  NLS_REQUIRE(dt > 0.0 && dt <= grid.h() / std::sqrt(3.0) * (1.0 + 1e-12), ConfigurationError,
              "3D time step violates dt <= h / sqrt(3)");
}

void Stepper3D::laplacian(const std::vector<double>& u, std::vector<double>& out) const {
  const int n = grid_.n;
  const std::size_t sn = n, sn2 = sn * sn;
  const double ih2 = 1.0 / (grid_.h() * grid_.h());
  out.assign(u.size(), 0.0);
  const bool periodic = boundary_ == Boundary::Periodic3D;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool inner = i > 0 && i < n - 1 && j > 0 && j < n - 1;
      const std::size_t base = grid_.index(i, j, 0);
      if (inner) {
        const double* c = u.data() + base;
        double* o = out.data() + base;
        for (int k = 1; k < n - 1; ++k)
          o[k] = (c[k - 1] + c[k + 1] + c[k - sn] + c[k + sn] + c[k - sn2] + c[k + sn2] - 6.0 * c[k]) * ih2;
      }
      if (!periodic) continue;
      for (int k = 0; k < n; ++k) {
        if (inner && k > 0 && k < n - 1) continue;
        auto at = [&](int a, int b, int c) { return u[grid_.index((a + n) % n, (b + n) % n, (c + n) % n)]; };
        out[base + k] = (at(i - 1, j, k) + at(i + 1, j, k) + at(i, j - 1, k) + at(i, j + 1, k) + at(i, j, k - 1) +
                         at(i, j, k + 1) - 6.0 * at(i, j, k)) *
                        ih2;
      }
    }
}

void Stepper3D::advance(std::vector<double>& prev, const std::vector<double>& cur,
                        const std::vector<double>* F) const {
  const int n = grid_.n;
  const std::size_t sn = n, sn2 = sn * sn;
  const double dt2 = dt_ * dt_;
  const double lam2 = dt2 / (grid_.h() * grid_.h());
  const double* f = F ? F->data() : nullptr;
  for (int i = 1; i < n - 1; ++i)
    for (int j = 1; j < n - 1; ++j) {
      const std::size_t base = grid_.index(i, j, 0);
      const double* c = cur.data() + base;
      double* p = prev.data() + base;
      const double* fb = f ? f + base : nullptr;
      for (int k = 1; k < n - 1; ++k) {
        const double lap = c[k - 1] + c[k + 1] + c[k - sn] + c[k + sn] + c[k - sn2] + c[k + sn2] - 6.0 * c[k];
        p[k] = 2.0 * c[k] - p[k] + lam2 * lap + (fb ? dt2 * fb[k] : 0.0);
      }
    }
  auto on_edge = [n](int a) { return a == 0 || a == n - 1; };
  if (boundary_ == Boundary::Periodic3D) {
    std::vector<double> lap;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          if (!on_edge(i) && !on_edge(j) && !on_edge(k)) continue;
          auto at = [&](int a, int b, int c) { return cur[grid_.index((a + n) % n, (b + n) % n, (c + n) % n)]; };
          const double l = at(i - 1, j, k) + at(i + 1, j, k) + at(i, j - 1, k) + at(i, j + 1, k) +
                           at(i, j, k - 1) + at(i, j, k + 1) - 6.0 * at(i, j, k);
          const std::size_t id = grid_.index(i, j, k);
          prev[id] = 2.0 * cur[id] - prev[id] + lam2 * l + (f ? dt2 * f[id] : 0.0);
        }
    return;
  }
  // Mur: u_b^{n+1} = u_in^n + (dt - d) / (dt + d) (u_in^{n+1} - u_b^n), d the inward distance
  const double h = grid_.h();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (!on_edge(i) && !on_edge(j) && !on_edge(k)) continue;
        auto inward = [n](int a) { return a == 0 ? 1 : (a == n - 1 ? n - 2 : a); };
        const int q = on_edge(i) + on_edge(j) + on_edge(k);
        const double d = h * std::sqrt(static_cast<double>(q));
        const std::size_t id = grid_.index(i, j, k), in = grid_.index(inward(i), inward(j), inward(k));
        prev[id] = cur[in] + (dt_ - d) / (dt_ + d) * (prev[in] - cur[id]);
      }
}

void Stepper3D::start(const std::vector<double>& u0, const std::vector<double>& u1, const std::vector<double>* F0,
                      std::vector<double>& out) const {
  std::vector<double> lap;
  laplacian(u0, lap);
  out.resize(u0.size());
  const double dt2 = dt_ * dt_;
  for (std::size_t i = 0; i < u0.size(); ++i)
    out[i] = u0[i] + dt_ * u1[i] + 0.5 * dt2 * (lap[i] + (F0 ? (*F0)[i] : 0.0));
}

Trajectory3D solve_semilinear_3d(const Nonlinearity& nl, const CauchyData3D& d, const SolverConfig& cfg) {
  d.validate();
  const Grid3D& g = d.grid;
  const double dt = cfg.resolve_step(g.h(), 1.0 / std::sqrt(3.0));
  const double span = cfg.end_time - cfg.start_time;
  NLS_REQUIRE(span >= 0.0, ConfigurationError, "3D solves run forward in time");
  const long n_steps = span == 0.0 ? 0 : std::lround(span / dt);
  const std::size_t snaps = static_cast<std::size_t>(n_steps / cfg.store_stride + 1);
  NLS_REQUIRE(snaps * g.size() * 2 * sizeof(double) <= kSnapshotMemoryLimit, ConfigurationError,
              "3D snapshots exceed the memory limit; raise store_stride");
  Stepper3D st(g, dt, cfg.boundary);
  const bool linear = nl.is_zero();
  std::vector<double> F(g.size(), 0.0);
  auto forcing = [&](const std::vector<double>& u) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      NLS_REQUIRE(std::abs(u[i]) <= cfg.blowup_threshold && std::isfinite(u[i]), NumericalGuardError,
                  "3D solution exceeded the blow-up threshold");
      F[i] = linear ? 0.0 : -nl.eval(u[i], 0);
    }
  };
  Trajectory3D tr;
  tr.grid = g;
  std::vector<double> prev = d.phi, cur;
  forcing(prev);
  st.start(d.phi, d.psi, linear ? nullptr : &F, cur);
  tr.times.push_back(cfg.start_time);
  tr.u.push_back(d.phi);
  tr.ut.push_back(d.psi);
  // prev = u^{n-1}, cur = u^n; store u^n once u^{n+1} is known
  for (long n = 1; n <= n_steps; ++n) {
    forcing(cur);
    const bool store = n % cfg.store_stride == 0;
    std::vector<double> older;
    if (store) older = prev;
    st.advance(prev, cur, linear ? nullptr : &F);
    prev.swap(cur);
    if (store) {
      std::vector<double> ut(g.size());
      for (std::size_t i = 0; i < ut.size(); ++i) ut[i] = (cur[i] - older[i]) / (2.0 * dt);
      tr.times.push_back(cfg.start_time + n * dt);
      tr.u.push_back(prev);
      tr.ut.push_back(std::move(ut));
    }
  }
  return tr;
}

double sample_trilinear(const Grid3D& g, const std::vector<double>& u, double x, double y, double z) {
  const double h = g.h();
  auto locate = [&](double c, int& i0, double& w) {
    double p = (c + g.half_width) / h - 0.5;
    p = std::clamp(p, 0.0, static_cast<double>(g.n - 1));
    i0 = std::min(static_cast<int>(p), g.n - 2);
    w = p - i0;
  };
  int i, j, k;
  double wx, wy, wz;
  locate(x, i, wx);
  locate(y, j, wy);
  locate(z, k, wz);
  double s = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        s += (a ? wx : 1 - wx) * (b ? wy : 1 - wy) * (c ? wz : 1 - wz) * u[g.index(i + a, j + b, k + c)];
  return s;
}

}  // namespace nlscatter
