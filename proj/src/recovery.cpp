#include "nlscatter/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlscatter/expansion.hpp"

namespace nlscatter {

std::string DetectionReport::csv_row() const {
  std::ostringstream os;
  os.precision(10);
  os << on << ',' << off_mean << ',' << ratio << ',' << (detected ? "detected" : "absent");
  return os.str();
}

double plane_location(const ConeConfig& cones, int j, const Vec3& omega, double R) {
  const Vec3& z = cones.z[j];
  if (R <= 0.0) return cones.s[j] - dot(omega, z);
  const Vec3 d{R * omega[0] - z[0], R * omega[1] - z[1], R * omega[2] - z[2]};
  return cones.s[j] + norm(d) - R;
}

namespace {

double window_energy(const RadiationFieldData& xi, int k, double lo, double hi) {
  double e = 0.0;
  for (int j = 1; j + 1 < xi.n_s; ++j) {
    const double s = xi.s(j);
    if (s < lo || s > hi) continue;
    const double d2 = xi.at(j + 1, k) - 2.0 * xi.at(j, k) + xi.at(j - 1, k);
    e += d2 * d2 * xi.ds;
  }
  return e;
}

}  // namespace

DetectionReport detect_new_singularities(const RadiationFieldData& xi, const SingularityProbe& p) {
  NLS_REQUIRE(p.omega_index >= 0 && p.omega_index < xi.n_omega(), ProbeError, "probe direction index out of range");
  NLS_REQUIRE(p.half_width > 0.0 && p.off_offsets.size() >= 1, ProbeError, "probe needs a window and references");
  const Vec3 omega = xi.is_radial() ? Vec3{0.0, 0.0, 1.0} : xi.omegas[p.omega_index];
  std::vector<double> walls;
  for (int j = 0; j < p.cones.count(); ++j) walls.push_back(plane_location(p.cones, j, omega, p.probe_radius));
  for (const auto& pl : p.planes) walls.push_back(pl.offset - dot(omega, pl.normal));
  const double s_lo = xi.s(1), s_hi = xi.s(xi.n_s - 2);
  auto check = [&](double c) {
    const double lo = c - p.half_width, hi = c + p.half_width;
    NLS_REQUIRE(lo >= s_lo && hi <= s_hi, ProbeError, "probe window leaves the recorded s-range");
    for (double w : walls)
      NLS_REQUIRE(w < lo - p.plane_margin || w > hi + p.plane_margin, ProbeError,
                  "probe window meets a plane pattern");
  };
  check(p.s_center);
  for (double o : p.off_offsets) check(p.s_center + o);
  DetectionReport r;
  r.on = window_energy(xi, p.omega_index, p.s_center - p.half_width, p.s_center + p.half_width);
  double peak = r.on;
  for (double o : p.off_offsets) {
    const double c = p.s_center + o;
    r.off.push_back(window_energy(xi, p.omega_index, c - p.half_width, c + p.half_width));
    r.off_mean += r.off.back() / p.off_offsets.size();
    peak = std::max(peak, r.off.back());
  }
  r.floor = std::max(1e-300, 1e-12 * peak);
  r.ratio = (r.on + r.floor) / (r.off_mean + r.floor);
  r.detected = r.ratio >= p.threshold;
  return r;
}

namespace {

ExperimentSetup make_setup(const ConeConfig& cones, const MultiIndex& target, int n, double amplitude,
                           const Vec3& omega, double R, double s_center, std::vector<double> offsets,
                           double t_end) {
  ExperimentSetup e;
  e.run.grid = Grid3D(6.0, n);
  e.run.cones = cones;
  e.run.Y0 = default_background_field(amplitude);
  e.run.target = target;
  e.run.probe_radius = R;
  e.run.probe_dirs = {omega};
  e.run.t_start = -3.3;
  e.run.t_end = t_end;
  e.probe.omega_index = 0;
  e.probe.s_center = s_center;
  e.probe.off_offsets = std::move(offsets);
  e.probe.probe_radius = R;
  e.probe.cones = cones;
  e.probe.planes = plane_patterns(cones);
  return e;
}

}  // namespace

ExperimentSetup triple_experiment(int n, double amplitude) {
  // omega = (1,1,0)/sqrt2 meets Q-inf at s = -2 sqrt2 for every radius
  const double r2 = std::sqrt(0.5);
  return make_setup(ConeConfig::triple(1.0, 1.0), MultiIndex::parse("1110"), n, amplitude, {r2, r2, 0.0}, 6.5,
                    -2.0 * std::sqrt(2.0), {-0.8, -1.6, 0.8}, 8.0);
}

ExperimentSetup quadruple_experiment(int n, double amplitude) {
  // omega = (1,1,1)/sqrt3 meets the cone from (-sqrt3, gamma) at s = -2 sqrt3 for every radius
  const double r3 = 1.0 / std::sqrt(3.0);
  return make_setup(ConeConfig::quadruple(1.0, 1.0, 1.0), MultiIndex::parse("1111"), n, amplitude, {r3, r3, r3},
                    7.5, -2.0 * std::sqrt(3.0), {-0.8, -1.6, 0.8}, 9.0);
}

ScalingReport amplitude_scaling_probe(const ExperimentSetup& setup, const std::vector<double>& kappa) {
  NLS_REQUIRE(kappa.size() >= 2, ArgumentError, "scaling probe needs at least two kappa values");
  auto run = setup.run;
  run.source_scales = kappa;
  const auto res = run_interaction_3d(run);
  ScalingReport rep;
  rep.kappa = kappa;
  for (std::size_t q = 0; q < kappa.size(); ++q) {
    const auto& xi = res.xi[q];
    rep.detections.push_back(detect_new_singularities(xi, setup.probe));
    rep.amplitude.push_back(std::sqrt(rep.detections.back().on));
  }
  std::vector<double> xs, ys;
  for (std::size_t q = 0; q < kappa.size(); ++q)
    if (kappa[q] > 0.0 && rep.amplitude[q] > 0.0) {
      xs.push_back(kappa[q]);
      ys.push_back(rep.amplitude[q]);
    }
  if (xs.size() >= 2) {
    const double mx = [&] { double s = 0; for (double x : xs) s += std::log(x); return s / xs.size(); }();
    const double my = [&] { double s = 0; for (double y : ys) s += std::log(y); return s / ys.size(); }();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
      sxx += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
    }
    rep.slope = sxy / sxx;
  }
  return rep;
}

namespace {

// Trapezoid antiderivative vanishing at u = 0 on the uniform grid u_i = lo + i h.
std::vector<double> primitive_from_zero(double lo, double h, const std::vector<double>& g) {
  const int n = static_cast<int>(g.size());
  std::vector<double> c(n, 0.0);
  for (int i = 1; i < n; ++i) c[i] = c[i - 1] + 0.5 * h * (g[i - 1] + g[i]);
  const double p = -lo / h;
  const int i0 = std::min(static_cast<int>(std::floor(p)), n - 2);
  const double w = p - i0;
  const double g0 = (1.0 - w) * g[i0] + w * g[i0 + 1];
  const double c0 = c[i0] + 0.5 * w * h * (g[i0] + g0);
  for (double& v : c) v -= c0;
  return c;
}

double linear_at(double lo, double h, const std::vector<double>& v, double u) {
  const int n = static_cast<int>(v.size());
  const double p = std::clamp((u - lo) / h, 0.0, static_cast<double>(n - 1));
  const int i = std::min(static_cast<int>(p), n - 2);
  const double w = p - i;
  return (1.0 - w) * v[i] + w * v[i + 1];
}

}  // namespace

Nonlinearity reconstruct_f_from_third_derivative(double u_lo, double u_hi, const std::vector<double>& g3) {
  NLS_REQUIRE(g3.size() >= 3 && u_hi > u_lo, ArgumentError, "need at least three samples on an interval");
  NLS_REQUIRE(u_lo < 0.0 && u_hi > 0.0, PreconditionError,
              "the sample interval must contain 0 in its interior to fix the integration constants");
  for (double v : g3) NLS_REQUIRE(std::isfinite(v), ArgumentError, "non-finite third-derivative sample");
  const double h = (u_hi - u_lo) / (g3.size() - 1);
  const auto f2 = primitive_from_zero(u_lo, h, g3);
  const auto f1 = primitive_from_zero(u_lo, h, f2);
  const auto f0 = primitive_from_zero(u_lo, h, f1);
  const double U = std::min(-u_lo, u_hi);
  const bool symmetric = std::abs(u_lo + u_hi) <= 1e-12 * U;
  const int n = symmetric ? static_cast<int>(g3.size()) : 2 * static_cast<int>(std::ceil(U / h)) + 1;
  std::vector<double> t0(n), t1(n), t2(n), t3(n);
  for (int i = 0; i < n; ++i) {
    const double u = -U + 2.0 * U * i / (n - 1);
    t0[i] = symmetric ? f0[i] : linear_at(u_lo, h, f0, u);
    t1[i] = symmetric ? f1[i] : linear_at(u_lo, h, f1, u);
    t2[i] = symmetric ? f2[i] : linear_at(u_lo, h, f2, u);
    t3[i] = symmetric ? g3[i] : linear_at(u_lo, h, g3, u);
  }
  return Nonlinearity::tabulated(U, t0, t1, t2, t3, "reconstructed");
}

PhiEqualityReport verify_phi_equality(const std::vector<double>& phi1, const std::vector<double>& phi2, double ds,
                                      const Nonlinearity& nl1, const Nonlinearity& nl2, double tol) {
  NLS_REQUIRE(phi1.size() == phi2.size() && phi1.size() >= 3 && ds > 0.0, ArgumentError,
              "profiles must share a grid of at least three samples");
  const int n = static_cast<int>(phi1.size());
  auto deriv = [&](const std::vector<double>& p, int i) {
    if (i == 0) return (p[1] - p[0]) / ds;
    if (i == n - 1) return (p[n - 1] - p[n - 2]) / ds;
    return (p[i + 1] - p[i - 1]) / (2.0 * ds);
  };
  PhiEqualityReport r;
  auto flag = [&](int i, const char* what) {
    if (r.first_violation < 0) {
      r.first_violation = i;
      r.violated_check = what;
    }
  };
  double scale = 1.0;
  for (int i = 0; i < n; ++i) scale = std::max({scale, std::abs(nl1.eval(phi1[i], 3)), std::abs(nl2.eval(phi2[i], 3))});
  for (int i = 0; i < n; ++i) {
    const double e3 = std::abs(nl1.eval(phi1[i], 3) - nl2.eval(phi2[i], 3));
    r.third_error = std::max(r.third_error, e3);
    if (e3 > tol * scale) flag(i, "third derivative");
    const double e4 = std::abs(nl1.eval(phi1[i], 4) * deriv(phi1, i) - nl2.eval(phi2[i], 4) * deriv(phi2, i));
    r.fourth_error = std::max(r.fourth_error, e4);
    if (e4 > tol * scale / ds) flag(i, "fourth derivative");
  }
  // O = {phi1 != 0 and phi2 != 0}, split into index runs
  double amp = 0.0;
  for (int i = 0; i < n; ++i) amp = std::max({amp, std::abs(phi1[i]), std::abs(phi2[i])});
  const double zero = 1e-12 * std::max(amp, 1e-300);
  auto in_o = [&](int i) { return std::abs(phi1[i]) > zero && std::abs(phi2[i]) > zero; };
  for (int i = 0; i < n;) {
    if (!in_o(i)) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 < n && in_o(j + 1)) ++j;
    r.components.push_back({i, j});
    i = j + 1;
  }
  double dscale = 0.0;
  for (int i = 0; i < n; ++i) dscale = std::max(dscale, std::abs(deriv(phi1, i)));
  dscale = std::max(dscale, 1e-300);
  for (std::size_t c = 0; c < r.components.size(); ++c) {
    const auto [a, b] = r.components[c];
    for (int i = a; i <= b; ++i) {
      const double e = std::abs(deriv(phi1, i) - deriv(phi2, i));
      r.derivative_error = std::max(r.derivative_error, e);
      if (e > 1e-6 * dscale && r.offending_component < 0) {
        r.offending_component = static_cast<int>(c);
        flag(i, "derivative on O");
      }
    }
    // phi1 - phi2 is constant on the component; continuity at its ends forces the constant to 0
    const double ca = phi1[a] - phi2[a], cb = phi1[b] - phi2[b];
    const double cst = std::abs(ca) >= std::abs(cb) ? ca : cb;
    r.constants.push_back(cst);
    if (std::abs(cst) > tol * std::max(amp, 1.0)) {
      if (r.offending_component < 0) r.offending_component = static_cast<int>(c);
      flag(std::abs(ca) >= std::abs(cb) ? a : b, "component constant");
    }
  }
  r.equal = r.first_violation < 0;
  return r;
}

}  // namespace nlscatter
