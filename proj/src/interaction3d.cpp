#include "nlscatter/interaction3d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nlscatter/errors.hpp"
#include "nlscatter/scattering.hpp"
#include "nlscatter/solver3d.hpp"

namespace nlscatter {

RadiationFieldData default_background_field(double amplitude, double ds) {
  const int n = static_cast<int>(std::lround(6.0 / ds)) + 1;
  auto f = RadiationFieldData::radial(-3.0, ds, n);
  for (int j = 0; j < n; ++j) {
    const double s = f.s(j);
    f.at(j) = -8.0 * amplitude * s * std::exp(-4.0 * s * s);
  }
  return f;
}

namespace {

struct Field {
  MultiIndex alpha;
  double kappa = 1.0;
  int wave = -1;  // j for |alpha| = 1
  std::vector<double> prev, cur;
  struct Term {
    int k;
    double coeff;
    std::vector<int> parts;
  };
  std::vector<Term> terms;
};

bool background_is_zero(const RadiationFieldData& Y0) {
  for (double v : Y0.values)
    if (v != 0.0) return false;
  return true;
}

}  // namespace

Interaction3DResult run_interaction_3d(const Interaction3DConfig& cfg) {
  const auto t_begin = std::chrono::steady_clock::now();
  cfg.cones.validate();
  const Grid3D& g = cfg.grid;
  NLS_REQUIRE(cfg.cones.count() <= 4, ConfigurationError, "at most four cone waves");
  NLS_REQUIRE(!cfg.target.is_zero(), ConfigurationError, "interaction target must be nonzero");
  for (int j = 0; j < 4; ++j) {
    NLS_REQUIRE(cfg.target.a[j] == 0 || cfg.target.a[j] == 1, ConfigurationError,
                "interaction target must have 0/1 components");
    NLS_REQUIRE(cfg.target.a[j] == 0 || j < cfg.cones.count(), ConfigurationError,
                "interaction target refers to a missing wave");
  }
  NLS_REQUIRE(!cfg.source_scales.empty(), ConfigurationError, "need at least one source scale");
  NLS_REQUIRE(!cfg.probe_dirs.empty() && cfg.probe_radius > 0.0, ConfigurationError, "need probes");
  for (const auto& w : cfg.probe_dirs) {
    NLS_REQUIRE(std::abs(norm(w) - 1.0) < 1e-12, ConfigurationError, "probe directions must be unit vectors");
    for (double c : w)
      NLS_REQUIRE(std::abs(cfg.probe_radius * c) < g.half_width - 2.0 * g.h(), ConfigurationError,
                  "probe lies outside the cube interior");
  }
  NLS_REQUIRE(cfg.cfl_ratio > 0.0 && cfg.cfl_ratio <= 1.0, ConfigurationError, "cfl_ratio must lie in (0, 1]");
  const double dt = cfg.cfl_ratio * g.h() / std::sqrt(3.0);
  const long n0 = std::lround(cfg.t_start / dt);
  const long n_end = static_cast<long>(std::ceil(cfg.t_end / dt));
  NLS_REQUIRE(n_end > n0 + 2, ConfigurationError, "interaction window too short");

  Interaction3DResult res;
  res.dt = dt;
  const double R = cfg.probe_radius;
  const int n_probe = static_cast<int>(cfg.probe_dirs.size());
  const long n_rec0 = n0 + 1, n_rec1 = n_end - 1;  // derivative levels recorded
  for (std::size_t q = 0; q < cfg.source_scales.size(); ++q) {
    RadiationFieldData xi;
    xi.s0 = n_rec0 * dt - R;
    xi.ds = dt;
    xi.n_s = static_cast<int>(n_rec1 - n_rec0 + 1);
    xi.omegas = cfg.probe_dirs;
    xi.omega_weights.assign(n_probe, 4.0 * M_PI / n_probe);
    xi.values.assign(static_cast<std::size_t>(xi.n_s) * n_probe, 0.0);
    res.xi.push_back(std::move(xi));
  }

  // members and their zero pattern
  std::vector<MultiIndex> order;
  for (const auto& a : MultiIndex::all_up_to(cfg.target.order()))
    if (cfg.target.contains(a)) order.push_back(a);
  const bool u0_zero = cfg.Y0.values.empty() || background_is_zero(cfg.Y0) || cfg.nl.is_zero();
  bool higher_zero = cfg.nl.is_zero();
  if (u0_zero && !higher_zero) {
    higher_zero = true;
    for (int k = 2; k <= 4; ++k) higher_zero = higher_zero && cfg.nl.eval(0.0, k) == 0.0;
  }
  auto is_zero = [&](const MultiIndex& a) {
    for (int j = 0; j < 4; ++j)
      if (a.a[j] && cfg.wave_scale[j] == 0.0) return true;
    return a.order() >= 2 && higher_zero;
  };
  if (is_zero(cfg.target)) {
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return res;
  }

  std::vector<Field> fields;
  std::map<MultiIndex, int> slot;
  for (const auto& a : order) {
    if (is_zero(a)) continue;
    const bool is_target = a == cfg.target;
    const std::size_t copies = is_target ? cfg.source_scales.size() : 1;
    for (std::size_t c = 0; c < copies; ++c) {
      Field f;
      f.alpha = a;
      f.kappa = is_target ? cfg.source_scales[c] : 1.0;
      if (a.order() == 1) f.wave = static_cast<int>(std::find(a.a.begin(), a.a.end(), 1) - a.a.begin());
      for (const auto& st : source_terms(a)) {
        Field::Term t{st.k, st.coeff, {}};
        bool live = true;
        for (const auto& b : st.parts) {
          const auto it = slot.find(b);
          if (it == slot.end()) {
            live = false;
            break;
          }
          t.parts.push_back(it->second);
        }
        if (live) f.terms.push_back(std::move(t));
      }
      if (!is_target || c == 0) slot[a] = static_cast<int>(fields.size());
      fields.push_back(std::move(f));
    }
  }
  res.members.clear();
  for (const auto& f : fields)
    if (res.members.empty() || !(res.members.back() == f.alpha)) res.members.push_back(f.alpha);

  // node radii and the radial background
  const std::size_t size = g.size();
  std::vector<double> rad(size);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) rad[g.index(i, j, k)] = norm({g.x(i), g.x(j), g.x(k)});
  RadialTrajectory bg;
  long bg_first = 0;
  double bg_dr = 0.0;
  if (!u0_zero) {
    double S = 4.0 * dt;
    double peak = 0.0;
    for (double v : cfg.Y0.values) peak = std::max(peak, std::abs(v));
    for (int j = 0; j < cfg.Y0.n_s; ++j)
      if (std::abs(cfg.Y0.at(j)) > 1e-13 * peak) S = std::max(S, std::abs(cfg.Y0.s(j)) + 2.0 * dt);
    const double corner = std::sqrt(3.0) * g.half_width;
    const double T = std::max({20.0, 4.0 * S, std::abs(cfg.t_start) + corner, cfg.t_end + corner}) + 2.0 * dt;
    const auto model = ScatteringModel::make(cfg.nl, S, T, dt);
    bg = solve_background(model, cfg.Y0, 1);
    bg_first = -model.M;
    bg_dr = model.h();
  }
  std::vector<double> u0(size, 0.0);
  const int max_k = cfg.target.order();
  std::vector<std::vector<double>> fd(max_k + 1, std::vector<double>(size, 0.0));
  auto load_background = [&](long n) {
    if (u0_zero) {
      for (int k = 1; k <= max_k; ++k) std::fill(fd[k].begin(), fd[k].end(), cfg.nl.eval(0.0, k));
      return;
    }
    const auto& row = bg.u[static_cast<std::size_t>(n - bg_first)];
    for (std::size_t i = 0; i < size; ++i) {
      u0[i] = cubic_sample(row, 0.0, bg_dr, rad[i]);
      res.u0_max = std::max(res.u0_max, std::abs(u0[i]));
      for (int k = 1; k <= max_k; ++k) fd[k][i] = cfg.nl.eval(u0[i], k);
    }
  };

  // free hourglass levels for the first-order members
  auto hourglass = [&](int j, double t, std::vector<double>& out) {
    out.assign(size, 0.0);
    const double scale = cfg.wave_scale[j];
    for (int a = 0; a < g.n; ++a)
      for (int b = 0; b < g.n; ++b)
        for (int c = 0; c < g.n; ++c) {
          const Vec3 z{g.x(a), g.x(b), g.x(c)};
          const Vec3 d{z[0] - cfg.cones.z[j][0], z[1] - cfg.cones.z[j][1], z[2] - cfg.cones.z[j][2]};
          if (norm(d) == 0.0) continue;
          out[g.index(a, b, c)] = scale * (spherical_wave_eval(cfg.cones, j, t, z, Family::Minus) -
                                           spherical_wave_eval(cfg.cones, j, t, z, Family::Plus));
        }
  };
  for (auto& f : fields) {
    if (f.wave >= 0) {
      hourglass(f.wave, n0 * dt, f.prev);
      hourglass(f.wave, (n0 + 1) * dt, f.cur);
    } else {
      f.prev.assign(size, 0.0);
      f.cur.assign(size, 0.0);
    }
  }

  Stepper3D st(g, dt, Boundary::Outflow3D);
  std::vector<double> F(size);
  std::vector<std::size_t> target_slots;
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i].alpha == cfg.target) target_slots.push_back(i);
  std::vector<double> before(target_slots.size() * n_probe);
  auto probe = [&](const std::vector<double>& w, int p) {
    const Vec3& om = cfg.probe_dirs[p];
    return sample_trilinear(g, w, R * om[0], R * om[1], R * om[2]);
  };

  for (long n = n0 + 1; n < n_end; ++n) {
    load_background(n);
    for (std::size_t q = 0; q < target_slots.size(); ++q)
      for (int p = 0; p < n_probe; ++p) before[q * n_probe + p] = probe(fields[target_slots[q]].prev, p);
    for (auto& f : fields) {
      const double* w = f.cur.data();
      const double* f1 = fd[1].data();
      for (std::size_t i = 0; i < size; ++i) F[i] = -f1[i] * w[i];
      for (const auto& t : f.terms) {
        const double c = -f.kappa * t.coeff;
        const double* fk = fd[t.k].data();
        const double* p0 = fields[t.parts[0]].cur.data();
        const double* p1 = t.parts.size() > 1 ? fields[t.parts[1]].cur.data() : nullptr;
        const double* p2 = t.parts.size() > 2 ? fields[t.parts[2]].cur.data() : nullptr;
        const double* p3 = t.parts.size() > 3 ? fields[t.parts[3]].cur.data() : nullptr;
        for (std::size_t i = 0; i < size; ++i) {
          double v = c * fk[i] * p0[i];
          if (p1) v *= p1[i];
          if (p2) v *= p2[i];
          if (p3) v *= p3[i];
          F[i] += v;
        }
      }
      st.advance(f.prev, f.cur, &F);  // prev now holds level n + 1
    }
    for (auto& f : fields) f.prev.swap(f.cur);
    for (std::size_t q = 0; q < target_slots.size(); ++q) {
      const auto& w = fields[target_slots[q]].cur;
      for (int p = 0; p < n_probe; ++p) {
        const double v = R * (probe(w, p) - before[q * n_probe + p]) / (2.0 * dt);
        NLS_REQUIRE(std::isfinite(v), NumericalGuardError, "non-finite value in the 3D interaction run");
        res.xi[q].at(static_cast<int>(n - n_rec0), p) = v;
      }
    }
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
  return res;
}

}  // namespace nlscatter
