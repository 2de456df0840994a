#include "nlscatter/expansion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "nlscatter/errors.hpp"
#include "nlscatter/norms.hpp"
#include "nlscatter/radiation.hpp"

namespace nlscatter {

//==============================================================================
// MultiIndex
//==============================================================================

MultiIndex MultiIndex::unit(int j) {
  NLS_REQUIRE(j >= 0 && j < 4, ArgumentError, "unit index must be 0..3");
  MultiIndex m;
  m.a[j] = 1;
  return m;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  MultiIndex m;
  for (int i = 0; i < 4; ++i) m.a[i] = a[i] + o.a[i];
  return m;
}

bool MultiIndex::operator<(const MultiIndex& o) const {
  if (order() != o.order()) return order() < o.order();
  return a > o.a;  // 1000 before 0100 within an order
}

bool MultiIndex::contains(const MultiIndex& o) const {
  for (int i = 0; i < 4; ++i)
    if (o.a[i] > a[i]) return false;
  return true;
}

std::string MultiIndex::str() const {
  std::string s;
  for (int v : a) s += std::to_string(v);
  return s;
}

MultiIndex MultiIndex::parse(const std::string& s) {
  NLS_REQUIRE(s.size() == 4, ArgumentError, "multi-index must have four digits: " + s);
  MultiIndex m;
  for (int i = 0; i < 4; ++i) {
    NLS_REQUIRE(s[i] >= '0' && s[i] <= '4', ArgumentError, "invalid multi-index digit in " + s);
    m.a[i] = s[i] - '0';
  }
  NLS_REQUIRE(m.order() <= 4, ArgumentError, "multi-index order exceeds 4: " + s);
  return m;
}

std::vector<MultiIndex> MultiIndex::all_up_to(int max_order) {
  std::vector<MultiIndex> out;
  for (int a0 = 0; a0 <= max_order; ++a0)
    for (int a1 = 0; a0 + a1 <= max_order; ++a1)
      for (int a2 = 0; a0 + a1 + a2 <= max_order; ++a2)
        for (int a3 = 0; a0 + a1 + a2 + a3 <= max_order; ++a3) {
          MultiIndex m;
          m.a = {a0, a1, a2, a3};
          if (!m.is_zero()) out.push_back(m);
        }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<MultiIndex> MultiIndex::binary() {
  std::vector<MultiIndex> out;
  for (const auto& m : all_up_to(4))
    if (*std::max_element(m.a.begin(), m.a.end()) <= 1) out.push_back(m);
  return out;
}

//==============================================================================
// Decompositions and sources
//==============================================================================

namespace {

void decompose(const MultiIndex& rest, int k, std::vector<MultiIndex>& cur,
               std::vector<std::vector<MultiIndex>>& out) {
  if (k == 1) {
    if (!rest.is_zero()) {
      cur.push_back(rest);
      out.push_back(cur);
      cur.pop_back();
    }
    return;
  }
  for (int b0 = 0; b0 <= rest.a[0]; ++b0)
    for (int b1 = 0; b1 <= rest.a[1]; ++b1)
      for (int b2 = 0; b2 <= rest.a[2]; ++b2)
        for (int b3 = 0; b3 <= rest.a[3]; ++b3) {
          MultiIndex b;
          b.a = {b0, b1, b2, b3};
          if (b.is_zero() || b.order() > rest.order() - (k - 1)) continue;
          MultiIndex r;
          for (int i = 0; i < 4; ++i) r.a[i] = rest.a[i] - b.a[i];
          cur.push_back(b);
          decompose(r, k - 1, cur, out);
          cur.pop_back();
        }
}

constexpr double kFactorial[5] = {1.0, 1.0, 2.0, 6.0, 24.0};

}  // namespace

std::vector<std::vector<MultiIndex>> ordered_decompositions(const MultiIndex& alpha, int k) {
  NLS_REQUIRE(k >= 1, ArgumentError, "decomposition length must be >= 1");
  std::vector<std::vector<MultiIndex>> out;
  std::vector<MultiIndex> cur;
  decompose(alpha, k, cur, out);
  return out;
}

std::vector<SourceTerm> source_terms(const MultiIndex& alpha) {
  std::vector<SourceTerm> out;
  for (int k = 2; k <= std::min(alpha.order(), 4); ++k) {
    std::map<std::vector<std::array<int, 4>>, int> counts;
    for (auto parts : ordered_decompositions(alpha, k)) {
      std::vector<std::array<int, 4>> key;
      for (const auto& p : parts) key.push_back(p.a);
      std::sort(key.begin(), key.end());
      ++counts[key];
    }
    for (const auto& [key, count] : counts) {
      SourceTerm t;
      t.k = k;
      t.coeff = count / kFactorial[k];
      for (const auto& a : key) {
        MultiIndex m;
        m.a = a;
        t.parts.push_back(m);
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

double assemble_source_point(const MultiIndex& alpha, const std::array<double, 5>& fd,
                             const std::function<double(const MultiIndex&)>& w) {
  double s = 0.0;
  for (const auto& t : source_terms(alpha)) {
    double p = t.coeff * fd[t.k];
    for (const auto& b : t.parts) p *= w(b);
    s -= p;
  }
  return s;
}

double assemble_source_point_bruteforce(const MultiIndex& alpha, const std::array<double, 5>& fd,
                                        const std::function<double(const MultiIndex&)>& w) {
  double s = 0.0;
  for (int k = 2; k <= std::min(alpha.order(), 4); ++k)
    for (const auto& parts : ordered_decompositions(alpha, k)) {
      double p = fd[k] / kFactorial[k];
      for (const auto& b : parts) p *= w(b);
      s -= p;
    }
  return s;
}

std::vector<double> assemble_source(const MultiIndex& alpha,
                                    const std::map<MultiIndex, std::vector<double>>& members,
                                    const Nonlinearity& nl, const std::vector<double>& u0) {
  const auto terms = source_terms(alpha);
  for (const auto& t : terms)
    for (const auto& b : t.parts)
      if (!members.count(b)) throw DependencyError("missing hierarchy member " + b.str() +
                                                   " for source of " + alpha.str());
  std::vector<double> out(u0.size(), 0.0);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    std::array<double, 5> fd{};
    for (int k = 0; k <= 4; ++k) fd[k] = nl.eval(u0[i], k);
    double s = 0.0;
    for (const auto& t : terms) {
      double p = t.coeff * fd[t.k];
      for (const auto& b : t.parts) p *= members.at(b)[i];
      s -= p;
    }
    out[i] = s;
  }
  return out;
}

//==============================================================================
// Simultaneous lattice march of u0 and the members
//==============================================================================

namespace {

struct CompiledTerm {
  int k;
  double c;
  std::array<int, 4> idx;
};

class Marcher {
 public:
  Marcher(const ScatteringModel& m, const std::vector<MultiIndex>& order, const std::vector<bool>& zero)
      : m_(m), st_(m.grid, m.h(), true), zero_(zero), n_mem_(static_cast<int>(order.size())) {
    std::map<MultiIndex, int> pos;
    for (int a = 0; a < n_mem_; ++a) pos[order[a]] = a;
    terms_.resize(n_mem_);
    for (int a = 0; a < n_mem_; ++a) {
      if (zero_[a]) continue;
      for (const auto& t : source_terms(order[a])) {
        CompiledTerm c{t.k, t.coeff, {0, 0, 0, 0}};
        bool dead = false;
        for (int p = 0; p < t.k; ++p) {
          auto it = pos.find(t.parts[p]);
          if (it == pos.end()) throw DependencyError("missing hierarchy member " + t.parts[p].str());
          c.idx[p] = it->second;
          dead = dead || zero_[it->second];
        }
        if (!dead) terms_[a].push_back(c);
      }
    }
    const int N = m.grid.n_points;
    bg_prev.assign(N + 1, 0.0);
    bg_cur.assign(N + 1, 0.0);
    prev.assign(n_mem_, std::vector<double>(N + 1, 0.0));
    cur = prev;
    G_.assign(n_mem_, std::vector<double>(N + 1, 0.0));
    Gb_.assign(N + 1, 0.0);
  }

  // Consumes cur = level n and produces the neighbouring level in cur (prev <- old cur).
  void step(long n) {
    const bool active = n >= -m_.M && n <= m_.M - 1 && !m_.nl.is_zero();
    const RadialGrid& g = m_.grid;
    const int N = g.n_points;
    if (active) {
      std::array<double, 5> fd{};
      for (int i = 1; i <= N; ++i) {
        const double r = g.r(i);
        const double u = bg_cur[i] / r;
        for (int k = 0; k <= 4; ++k) fd[k] = m_.nl.eval(u, k);
        Gb_[i] = -r * fd[0];
        const double rinv = 1.0 / r;
        for (int a = 0; a < n_mem_; ++a) {
          if (zero_[a]) continue;
          double s = -fd[1] * cur[a][i];
          for (const auto& t : terms_[a]) {
            if (fd[t.k] == 0.0) continue;
            double p = t.c * fd[t.k];
            for (int q = 0; q < t.k; ++q) p *= cur[t.idx[q]][i];
            for (int q = 1; q < t.k; ++q) p *= rinv;
            s -= p;
          }
          G_[a][i] = s;
        }
      }
    }
    st_.advance(bg_prev, bg_cur, active ? &Gb_ : nullptr);
    bg_prev.swap(bg_cur);
    for (int a = 0; a < n_mem_; ++a) {
      if (zero_[a]) continue;
      st_.advance(prev[a], cur[a], active ? &G_[a] : nullptr);
      prev[a].swap(cur[a]);
    }
    for (double v : bg_cur)
      if (!std::isfinite(v)) throw NumericalGuardError("non-finite background in the hierarchy march");
  }

  const RadialStepper& stepper() const { return st_; }

  std::vector<double> bg_prev, bg_cur;
  std::vector<std::vector<double>> prev, cur;

 private:
  const ScatteringModel& m_;
  RadialStepper st_;
  std::vector<bool> zero_;
  int n_mem_;
  std::vector<std::vector<CompiledTerm>> terms_;
  std::vector<std::vector<double>> G_;
  std::vector<double> Gb_;
};

bool field_is_zero(const RadiationFieldData& f) {
  for (double v : f.values)
    if (v != 0.0) return false;
  return true;
}

std::vector<MultiIndex> checked_order(const HierarchyOptions& opts) {
  auto order = opts.indices.empty() ? MultiIndex::all_up_to(4) : opts.indices;
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  const std::set<MultiIndex> have(order.begin(), order.end());
  for (const auto& a : order) {
    NLS_REQUIRE(!a.is_zero() && a.order() <= 4, ArgumentError, "hierarchy indices need 1 <= |alpha| <= 4");
    for (const auto& b : MultiIndex::all_up_to(a.order()))
      if (a.contains(b) && !have.count(b))
        throw ArgumentError("hierarchy index set is not downward closed: " + a.str() + " needs " + b.str());
  }
  return order;
}

std::vector<bool> zero_members(const std::vector<MultiIndex>& order, const std::array<RadiationFieldData, 4>& Y) {
  std::map<MultiIndex, bool> z;
  std::vector<bool> out;
  for (const auto& a : order) {
    bool zero;
    if (a.order() == 1) {
      const int j = static_cast<int>(std::find(a.a.begin(), a.a.end(), 1) - a.a.begin());
      zero = field_is_zero(Y[j]);
    } else {
      zero = true;
      for (const auto& t : source_terms(a)) {
        bool dead = false;
        for (const auto& b : t.parts) dead = dead || z.at(b);
        if (!dead) zero = false;
      }
    }
    z[a] = zero;
    out.push_back(zero);
  }
  return out;
}

}  // namespace

const HierarchyMember& Hierarchy::at(const MultiIndex& a) const {
  auto it = members.find(a);
  if (it == members.end()) throw DependencyError("hierarchy has no member " + a.str());
  return it->second;
}

RadialTrajectory solve_background(const ScatteringModel& m, const RadiationFieldData& Y0, int store_stride) {
  HierarchyOptions o;
  o.indices = {MultiIndex::unit(0)};
  o.store_stride = std::max(1, store_stride);
  const auto zero = m.window();
  return solve_hierarchy(m, Y0, {zero, zero, zero, zero}, o).u0;
}

Hierarchy solve_hierarchy(const ScatteringModel& m, const RadiationFieldData& Y0,
                          const std::array<RadiationFieldData, 4>& Y, const HierarchyOptions& opts) {
  require_mean_zero(Y0);
  std::array<RadiationFieldData, 4> Yw;
  for (int j = 0; j < 4; ++j) {
    require_mean_zero(Y[j]);
    Yw[j] = m.on_window(Y[j]);
  }
  Hierarchy h;
  h.model = m;
  h.order = checked_order(opts);
  const auto zero = zero_members(h.order, Yw);
  const int n_mem = static_cast<int>(h.order.size());
  Marcher mr(m, h.order, zero);
  mr.bg_prev = free_level(m, Y0, -m.M - 1);
  mr.bg_cur = free_level(m, Y0, -m.M);
  for (int a = 0; a < n_mem; ++a) {
    if (h.order[a].order() != 1 || zero[a]) continue;
    const int j = static_cast<int>(std::find(h.order[a].a.begin(), h.order[a].a.end(), 1) -
                                   h.order[a].a.begin());
    mr.prev[a] = free_level(m, Yw[j], -m.M - 1);
    mr.cur[a] = free_level(m, Yw[j], -m.M);
  }

  const RadialGrid& g = m.grid;
  const int N = g.n_points;
  const double hh = m.h();
  const auto vol = radial_volume_weights(g);
  std::vector<double> l5(n_mem, 0.0);
  auto accumulate_norms = [&]() {
    for (int a = 0; a < n_mem; ++a) {
      if (zero[a]) continue;
      double s = 0.0;
      for (int i = 1; i <= N; ++i) {
        const double u = mr.cur[a][i] / g.r(i);
        const double u2 = u * u, u4 = u2 * u2;
        s += vol[i] * u4 * u4 * u2;
      }
      l5[a] += hh * std::sqrt(s);
    }
  };

  std::vector<double> bg_m1, bg_0;
  std::vector<std::vector<double>> mem_m1, mem_0;
  h.u0.grid = g;
  const RadialStepper& st = mr.stepper();
  std::vector<double> u(N + 1), ut(N + 1);
  accumulate_norms();
  for (long n = -m.M; n < m.M; ++n) {
    const bool store = opts.store_stride > 0 && n % opts.store_stride == 0;
    std::vector<double> before;
    if (store) before = mr.bg_prev;
    if (n == -1) {
      bg_m1 = mr.bg_cur;
      mem_m1 = mr.cur;
    }
    if (n == 0) {
      bg_0 = mr.bg_cur;
      mem_0 = mr.cur;
    }
    mr.step(n);
    accumulate_norms();
    if (store) {
      // bg_prev is level n, bg_cur level n + 1
      st.to_u(mr.bg_prev, u);
      st.to_u(st.recover_velocity(mr.bg_cur, before), ut);
      h.u0.times.push_back(n * hh);
      h.u0.u.push_back(u);
      h.u0.ut.push_back(ut);
    }
    if (n == 0) {
      h.u0_data = data_from_levels(m, bg_m1, bg_0, mr.bg_cur);
      for (int a = 0; a < n_mem; ++a) {
        HierarchyMember mem;
        mem.alpha = h.order[a];
        mem.identically_zero = zero[a];
        mem.data = zero[a] ? RadialCauchyData::zeros(g) : data_from_levels(m, mem_m1[a], mem_0[a], mr.cur[a]);
        mem.energy = energy_linear(mem.data);
        if (mem.alpha.order() == 1) {
          const int j = static_cast<int>(std::find(mem.alpha.a.begin(), mem.alpha.a.end(), 1) -
                                         mem.alpha.a.begin());
          mem.backward = Yw[j];
        } else {
          mem.backward = m.window();
        }
        h.members[mem.alpha] = std::move(mem);
      }
    }
  }
  h.background_forward = read_forward(m, mr.bg_prev, mr.bg_cur);
  for (int a = 0; a < n_mem; ++a) {
    auto& mem = h.members[h.order[a]];
    mem.xi = zero[a] ? m.window() : read_forward(m, mr.prev[a], mr.cur[a]);
    mem.l5l10 = std::pow(l5[a], 0.2);
  }
  return h;
}

double backward_consistency(const Hierarchy& h, const std::array<RadiationFieldData, 4>& Y) {
  const ScatteringModel& m = h.model;
  std::vector<bool> zero;
  for (const auto& a : h.order) zero.push_back(h.at(a).identically_zero);
  Marcher mr(m, h.order, zero);
  RadialStepper st(m.grid, m.h(), true);
  // levels 0 and +1 from the data through the start map; stepping from n = 0 then reproduces
  // level -1 with the level-0 forcing, which the members share through u0
  const int N = m.grid.n_points;
  auto levels = [&](const RadialCauchyData& d, std::vector<double>& w0, std::vector<double>& wp,
                    const std::vector<double>* G) {
    std::vector<double> w1;
    st.from_u(d.phi, w0);
    st.from_u(d.psi, w1);
    st.start(w0, w1, G, 1, wp);
  };
  std::vector<double> Gb(N + 1, 0.0);
  for (int i = 1; i <= N; ++i)
    Gb[i] = m.nl.is_zero() ? 0.0 : -m.grid.r(i) * m.nl.eval(h.u0_data.phi[i], 0);
  levels(h.u0_data, mr.bg_cur, mr.bg_prev, &Gb);
  std::map<MultiIndex, std::vector<double>> phi0;
  for (const auto& a : h.order) phi0[a] = h.at(a).data.phi;
  for (std::size_t k = 0; k < h.order.size(); ++k) {
    const auto& a = h.order[k];
    if (zero[k]) continue;
    std::vector<double> G(N + 1, 0.0);
    if (!m.nl.is_zero()) {
      const auto src = assemble_source(a, phi0, m.nl, h.u0_data.phi);
      for (int i = 1; i <= N; ++i)
        G[i] = m.grid.r(i) * (-m.nl.eval(h.u0_data.phi[i], 1) * h.at(a).data.phi[i] + src[i]);
    }
    levels(h.at(a).data, mr.cur[k], mr.prev[k], &G);
  }
  for (long n = 0; n > -m.M - 1; --n) mr.step(n);
  double err = 0.0, scale = 0.0;
  for (const auto& y : Y) scale = std::max(scale, m.on_window(y).l2_norm());
  for (std::size_t k = 0; k < h.order.size(); ++k) {
    if (zero[k]) continue;
    const auto back = read_backward(m, mr.prev[k], mr.cur[k]);
    err = std::max(err, l2_distance(back, h.at(h.order[k]).backward));
  }
  return scale > 0.0 ? err / scale : err;
}

RadiationFieldData expansion_sum(const Hierarchy& h, const std::array<double, 4>& eps, int max_order) {
  auto out = h.model.window();
  for (const auto& a : MultiIndex::all_up_to(max_order)) {
    double c = 1.0;
    for (int j = 0; j < 4; ++j) c *= std::pow(eps[j], a.a[j]);
    if (c == 0.0) continue;
    out = out.plus(h.at(a).xi, c);
  }
  return out;
}

SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  NLS_REQUIRE(x.size() == y.size(), ArgumentError, "slope fit needs matching samples");
  NLS_REQUIRE(x.size() >= 3, ArgumentError, "slope fit needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    NLS_REQUIRE(x[i] > 0.0 && y[i] > 0.0, ArgumentError, "slope fit needs positive samples");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  SlopeFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  for (std::size_t i = 0; i < x.size(); ++i)
    f.max_residual = std::max(f.max_residual,
                              std::abs(std::log(y[i]) - f.intercept - f.slope * std::log(x[i])));
  return f;
}

namespace {

RadiationFieldData scatter_checked(const ScatteringModel& m, const RadiationFieldData& in, double tol,
                                   int* iterations) {
  const auto inv = inverse_radiation(m, in, tol, 25);
  // below tol the fixed point may stall on roundoff; accept a small final residual
  if (!inv.converged && inv.residual_history.back() > 1e3 * tol) {
    std::ostringstream os;
    os << "inverse radiation did not converge; residual history:";
    for (double r : inv.residual_history) os << ' ' << r;
    throw NumericalGuardError(os.str());
  }
  if (iterations) *iterations = inv.iterations;
  return forward_field(m, inv.data);
}

}  // namespace

RemainderStudy remainder_study(const Hierarchy& h, const RadiationFieldData& Y0,
                               const std::array<RadiationFieldData, 4>& Y, const std::vector<double>& eps,
                               double tol) {
  NLS_REQUIRE(eps.size() >= 3, ArgumentError, "remainder study needs at least 3 eps values");
  for (const auto& a : MultiIndex::all_up_to(4)) h.at(a);
  const ScatteringModel& m = h.model;
  RemainderStudy st;
  st.eps = eps;
  int it = 0;
  const auto A0 = scatter_checked(m, m.on_window(Y0), tol, &it);
  for (double e : eps) {
    auto in = m.on_window(Y0);
    for (const auto& y : Y) in = in.plus(m.on_window(y), e);
    const auto A = scatter_checked(m, in, tol, &it);
    st.fixed_point_iterations.push_back(it);
    const auto diff = A.plus(A0, -1.0);
    st.delta.push_back(diff.plus(expansion_sum(h, {e, e, e, e}, 4), -1.0).l2_norm());
    st.delta_order1.push_back(diff.plus(expansion_sum(h, {e, e, e, e}, 1), -1.0).l2_norm());
  }
  st.fit = loglog_fit(st.eps, st.delta);
  st.fit_order1 = loglog_fit(st.eps, st.delta_order1);
  return st;
}

PolarizationCheck polarization_check(const ScatteringModel& m, const RadiationFieldData& Y0,
                                     const RadiationFieldData& Y1, double delta) {
  NLS_REQUIRE(delta > 0.0, ArgumentError, "polarization spacing must be positive");
  std::vector<MultiIndex> idx;
  for (const auto& a : MultiIndex::all_up_to(4))
    if (a.a[2] == 0 && a.a[3] == 0) idx.push_back(a);
  HierarchyOptions o;
  o.indices = idx;
  const auto zero = m.window();
  const auto h = solve_hierarchy(m, Y0, {Y1, Y1, zero, zero}, o);

  // nine-point fit of eps -> A(Y0 + 2 eps Y1), degree 8
  constexpr int P = 9;
  const auto base = m.on_window(Y0), dir = m.on_window(Y1);
  Eigen::MatrixXd V(P, P), rhs(P, base.n_s);
  for (int j = 0; j < P; ++j) {
    const double e = (j - 4) * delta;
    for (int k = 0; k < P; ++k) V(j, k) = std::pow(j - 4.0, k);
    const auto A = scatter_checked(m, base.plus(dir, 2.0 * e), 1e-13, nullptr);
    for (int i = 0; i < base.n_s; ++i) rhs(j, i) = A.at(i);
  }
  const Eigen::MatrixXd coef = V.partialPivLu().solve(rhs);

  PolarizationCheck pc;
  for (int k = 1; k <= 4; ++k) {
    auto hier = m.window();
    for (const auto& a : idx)
      if (a.order() == k) hier = hier.plus(h.at(a).xi);
    auto fd = m.window();
    const double scale = std::pow(delta, k);
    for (int i = 0; i < fd.n_s; ++i) fd.at(i) = coef(k, i) / scale;
    const double ref = std::max(hier.l2_norm(), 1e-300);
    pc.relative_error[k - 1] = l2_distance(fd, hier) / ref;
    pc.max_error = std::max(pc.max_error, pc.relative_error[k - 1]);
  }
  return pc;
}

}  // namespace nlscatter
