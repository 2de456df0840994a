#include "nlscatter/conormal.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nlscatter/errors.hpp"

namespace nlscatter {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

// derivative of the smoothstep on (0, 1)
double smoothstep7_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 140.0 * x * x * x * (1.0 - x) * (1.0 - x) * (1.0 - x);
}

}  // namespace

double smoothstep7(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x4 = x * x * x * x;
  return x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

double cutoff(double x) { return smoothstep7(2.0 * (1.0 - std::abs(x))); }

double cutoff_derivative(double x) {
  const double sgn = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  return -2.0 * sgn * smoothstep7_derivative(2.0 * (1.0 - std::abs(x)));
}

ConeConfig ConeConfig::triple(double a, double b, double s_star) {
  ConeConfig c;
  c.z = {{0.0, 0.0, 0.0}, {2.0 * a, 0.0, 0.0}, {0.0, 2.0 * b, 0.0}};
  c.s = {s_star, s_star, s_star};
  return c;
}

ConeConfig ConeConfig::quadruple(double a, double b, double cc, double s_star) {
  ConeConfig c = triple(a, b, s_star);
  c.z.push_back({0.0, 0.0, 2.0 * cc});
  c.s.push_back(s_star);
  return c;
}

void ConeConfig::validate() const {
  NLS_REQUIRE(z.size() == s.size() && !z.empty(), ConfigurationError, "cone config needs one time per vertex");
  NLS_REQUIRE(m > 0.0, ConfigurationError, "profile order m must be positive");
  NLS_REQUIRE(half_width > 0.0, ConfigurationError, "cutoff half-width must be positive");
  for (size_t i = 0; i < z.size(); ++i)
    for (size_t j = i + 1; j < z.size(); ++j)
      NLS_REQUIRE(norm(sub(z[i], z[j])) > 0.0, ConfigurationError, "cone vertices must be distinct");
}

double profile(const ConeConfig& cfg, double y) {
  if (y <= 0.0) return 0.0;
  return std::pow(y, cfg.m) * cutoff(y / cfg.half_width);
}

double profile_derivative(const ConeConfig& cfg, double y) {
  if (y <= 0.0) return 0.0;
  const double c = cfg.half_width;
  return cfg.m * std::pow(y, cfg.m - 1.0) * cutoff(y / c) + std::pow(y, cfg.m) * cutoff_derivative(y / c) / c;
}

double spherical_wave_eval(const ConeConfig& cfg, int j, double t, const Vec3& z, Family fam) {
  NLS_REQUIRE(j >= 0 && j < cfg.count(), ArgumentError, "wave index out of range");
  const double d = norm(sub(z, cfg.z[j]));
  NLS_REQUIRE(d > 0.0, DomainError, "spherical wave evaluated at its vertex");
  const double y = fam == Family::Minus ? t - cfg.s[j] + d : t - cfg.s[j] - d;
  return profile(cfg, y) / d;
}

double upsilon_j(const ConeConfig& cfg, int j, double s, const Vec3& omega) {
  NLS_REQUIRE(j >= 0 && j < cfg.count(), ArgumentError, "wave index out of range");
  return profile_derivative(cfg, s - cfg.s[j] - dot(omega, cfg.z[j]));
}

double spherical_wave_field_at(const ConeConfig& cfg, int j, double s, const Vec3& omega, double R) {
  NLS_REQUIRE(j >= 0 && j < cfg.count(), ArgumentError, "wave index out of range");
  const Vec3 z{R * omega[0], R * omega[1], R * omega[2]};
  const double d = norm(sub(z, cfg.z[j]));
  NLS_REQUIRE(d > 0.0, DomainError, "spherical wave evaluated at its vertex");
  return R * profile_derivative(cfg, s - R - cfg.s[j] + d) / d;
}

double PatternSet::residual(const PatternPoint& p) const {
  const Vec3& w = p.omega;
  switch (kind) {
    case PatternKind::Plane:
    case PatternKind::QuadrupleCone:
    case PatternKind::Extrapolated:
      return p.s - offset + dot(w, normal);
    case PatternKind::TripleFlowout: {
      // x30 = omega3 t0 with t0 = -sqrt((a^2 + b^2) / (1 - omega3^2)) eliminated
      const double c2 = std::max(0.0, 1.0 - w[2] * w[2]);
      return p.s + a * w[0] + b * w[1] + std::sqrt((a * a + b * b) * c2) - s_star;
    }
  }
  return 0.0;
}

bool PatternSet::contains(const PatternPoint& p, double tol) const {
  if (kind == PatternKind::TripleFlowout && std::abs(p.omega[2]) >= 1.0) return false;
  return std::abs(residual(p)) <= tol;
}

std::string PatternSet::kind_name() const {
  switch (kind) {
    case PatternKind::Plane: return "plane";
    case PatternKind::TripleFlowout: return "triple-flowout";
    case PatternKind::QuadrupleCone: return "quadruple";
    case PatternKind::Extrapolated: return "extrapolated";
  }
  return "unknown";
}

void PatternSet::write_csv(std::ostream& os) const {
  os << "s,omega1,omega2,omega3\n";
  os.precision(17);
  for (const auto& p : points) os << p.s << ',' << p.omega[0] << ',' << p.omega[1] << ',' << p.omega[2] << '\n';
}

std::vector<PatternSet> plane_patterns(const ConeConfig& cfg) {
  cfg.validate();
  std::vector<PatternSet> out;
  for (int j = 0; j < cfg.count(); ++j) {
    PatternSet p;
    p.kind = PatternKind::Plane;
    p.normal = cfg.z[j];
    p.offset = cfg.s[j];
    out.push_back(p);
  }
  return out;
}

SpaceTimePoint TripleGeometry::gamma(double x3, Family fam) const {
  const double r = std::sqrt(x3 * x3 + a * a + b * b);
  return {fam == Family::Minus ? s_star - r : s_star + r, {a, b, x3}};
}

double TripleGeometry::t0(double x30) const { return -std::sqrt(x30 * x30 + a * a + b * b); }

Vec3 TripleGeometry::direction(double x30, double theta) const {
  const double w3 = x30 / t0(x30);
  const double c = std::sqrt(1.0 - w3 * w3);
  return {c * std::cos(theta), c * std::sin(theta), w3};
}

SpaceTimePoint TripleGeometry::q_minus(double x30, double theta, double rho) const {
  const Vec3 w = direction(x30, theta);
  return {s_star + t0(x30) + rho, {a + rho * w[0], b + rho * w[1], x30 + rho * w[2]}};
}

std::array<double, 2> TripleGeometry::q_minus_residual(double x30, const SpaceTimePoint& p) const {
  const double tt = p.t - s_star, t0v = t0(x30);
  const Vec3 d = sub(p.z, {a, b, x30});
  return {dot(d, d) - (tt - t0v) * (tt - t0v), x30 * tt - p.z[2] * t0v};
}

PatternPoint TripleGeometry::pattern_point(double x30, double theta) const {
  const Vec3 w = direction(x30, theta);
  return {(t0(x30) - dot(w, {a, b, x30})) + s_star, w};
}

PatternSet TripleGeometry::pattern(const std::vector<double>& x30, int n_theta) const {
  PatternSet p;
  p.kind = PatternKind::TripleFlowout;
  p.a = a;
  p.b = b;
  p.s_star = s_star;
  for (double x : x30)
    for (int k = 0; k < n_theta; ++k) p.points.push_back(pattern_point(x, 2.0 * M_PI * k / n_theta));
  return p;
}

TripleGeometry triple_interaction_geometry(double a, double b, double s_star) {
  NLS_REQUIRE(std::isfinite(a) && std::isfinite(b) && a >= 0.0 && b >= 0.0, ArgumentError,
              "triple geometry needs a, b >= 0");
  NLS_REQUIRE(a * b > 0.0, DomainError, "a b = 0: the cones are tangent");
  TripleGeometry g;
  g.a = a;
  g.b = b;
  g.s_star = s_star;
  g.cones = ConeConfig::triple(a, b, s_star);
  return g;
}

double QuadrupleGeometry::t0(Family fam) const {
  const double r = norm(vertex());
  return fam == Family::Minus ? s_star - r : s_star + r;
}

PatternSet QuadrupleGeometry::pattern(Family fam, int n_theta, int n_phi) const {
  PatternSet p;
  p.kind = PatternKind::QuadrupleCone;
  p.normal = vertex();
  p.offset = t0(fam);
  for (int i = 0; i < n_theta; ++i) {
    const double th = M_PI * (i + 0.5) / n_theta;
    for (int k = 0; k < n_phi; ++k) {
      const double ph = 2.0 * M_PI * k / n_phi;
      const Vec3 w{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
      p.points.push_back({p.offset - dot(w, p.normal), w});
    }
  }
  return p;
}

QuadrupleGeometry quadruple_interaction_geometry(double a, double b, double c, double s_star) {
  NLS_REQUIRE(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && a >= 0.0 && b >= 0.0 && c >= 0.0,
              ArgumentError, "quadruple geometry needs a, b, c >= 0");
  NLS_REQUIRE(a * b * c > 0.0, DomainError, "a b c = 0: the cones are tangent");
  QuadrupleGeometry g;
  g.a = a;
  g.b = b;
  g.c = c;
  g.s_star = s_star;
  g.cones = ConeConfig::quadruple(a, b, c, s_star);
  return g;
}

namespace {

// Neville extrapolation of (x_k, y_k) to x = 0; returns the value and |last - previous diagonal|.
std::pair<double, double> neville_at_zero(const std::vector<double>& x, std::vector<double> y) {
  const int n = static_cast<int>(x.size());
  double prev = y[n - 1];
  for (int level = 1; level < n; ++level) {
    for (int i = n - 1; i >= level; --i)
      y[i] = (x[i] * y[i - 1] - x[i - level] * y[i]) / (x[i] - x[i - level]);
    if (level < n - 1) prev = y[n - 1];
  }
  return {y[n - 1], std::abs(y[n - 1] - prev)};
}

}  // namespace

RayTrace radiation_pattern_of_ray(const std::function<SpaceTimePoint(double)>& ray, double rho0, int levels) {
  NLS_REQUIRE(rho0 > 0.0 && levels >= 3, ArgumentError, "ray trace needs rho0 > 0 and >= 3 levels");
  std::vector<double> x(levels);
  std::array<std::vector<double>, 4> y;
  for (auto& v : y) v.resize(levels);
  for (int k = 0; k < levels; ++k) {
    const auto p = ray(rho0 * std::ldexp(1.0, k));
    const double r = norm(p.z);
    NLS_REQUIRE(r > 0.0 && std::isfinite(r) && std::isfinite(p.t), NumericalGuardError,
                "ray sample at the origin or non-finite");
    x[k] = 1.0 / r;
    y[0][k] = p.t - r;
    for (int i = 0; i < 3; ++i) y[i + 1][k] = p.z[i] / r;
  }
  // bounded s converges at least like 1/r: successive differences must shrink
  const double d1 = std::abs(y[0][levels - 1] - y[0][levels - 2]);
  const double d0 = std::abs(y[0][levels - 2] - y[0][levels - 3]);
  if (d1 > 0.9 * d0 && d1 > 1e-12 * (1.0 + std::abs(y[0][levels - 1])))
    throw NumericalGuardError("s = t - r is unbounded along the ray");
  RayTrace out;
  double err = 0.0;
  auto [s, es] = neville_at_zero(x, y[0]);
  out.point.s = s;
  err = es;
  Vec3 w;
  for (int i = 0; i < 3; ++i) {
    auto [v, e] = neville_at_zero(x, y[i + 1]);
    w[i] = v;
    err = std::max(err, e);
  }
  const double n = norm(w);
  for (double& c : w) c /= n;
  out.point.omega = w;
  out.error_estimate = err;
  return out;
}

PatternSet radiation_pattern_of_surface(const std::vector<std::function<SpaceTimePoint(double)>>& rays,
                                        double rho0, int levels) {
  PatternSet p;
  p.kind = PatternKind::Extrapolated;
  for (const auto& r : rays) p.points.push_back(radiation_pattern_of_ray(r, rho0, levels).point);
  return p;
}

namespace {

double second_derivative(const std::vector<double>& f, int i, double dr) {
  const int n = static_cast<int>(f.size());
  if (n < 4) return 0.0;
  if (i == 0) return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (dr * dr);
  if (i == n - 1) return (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (dr * dr);
  return (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (dr * dr);
}

}  // namespace

TransportCoefficients solve_transport(const std::vector<std::vector<double>>& gamma, double dr, double m, int K,
                                      Family fam, const TransportCoefficients* minus) {
  NLS_REQUIRE(dr > 0.0 && m > 0.0 && K >= 0, ArgumentError, "transport needs dr > 0, m > 0, K >= 0");
  NLS_REQUIRE(!gamma.empty() && gamma[0].size() >= 4, ArgumentError, "transport needs gamma_0 on >= 4 nodes");
  const int n = static_cast<int>(gamma[0].size());
  for (const auto& g : gamma) NLS_REQUIRE(static_cast<int>(g.size()) == n, ArgumentError, "gamma sizes differ");
  const int match = 2;
  if (fam == Family::Minus) {
    for (const auto& g : gamma) {
      double peak = 0.0;
      for (double v : g) peak = std::max(peak, std::abs(v));
      NLS_REQUIRE(std::abs(g[n - 1]) <= 1e-8 * peak, PreconditionError,
                  "gamma does not decay at the outer grid end: no decaying transport solution");
    }
  } else {
    NLS_REQUIRE(minus != nullptr && minus->size() == n && static_cast<int>(minus->beta.size()) >= K + 1 &&
                    n > match,
                DependencyError, "plus-family transport needs the minus family on the same grid");
  }
  TransportCoefficients tc;
  tc.family = fam;
  tc.dr = dr;
  tc.m = m;
  tc.gamma = gamma;
  tc.beta.assign(K + 1, std::vector<double>(n, 0.0));
  std::fill(tc.beta[0].begin(), tc.beta[0].end(), 1.0);
  std::vector<double> d(n);
  for (int k = 0; k < K; ++k) {
    for (int i = 0; i < n; ++i) {
      if (k == 0) {
        d[i] = gamma[0][i] / (2.0 * (m + 1.0));
        continue;
      }
      double src = second_derivative(tc.beta[k], i, dr);
      for (int l = 0; l <= k && l < static_cast<int>(gamma.size()); ++l) src += gamma[l][i] * tc.beta[k - l][i];
      d[i] = -src / (2.0 * (m + k + 1.0));
    }
    auto& b = tc.beta[k + 1];
    if (fam == Family::Minus) {
      b[n - 1] = 0.0;
      for (int i = n - 2; i >= 0; --i) b[i] = b[i + 1] - 0.5 * dr * (d[i] + d[i + 1]);
    } else {
      b[match] = minus->beta[k + 1][match];
      for (int i = match + 1; i < n; ++i) b[i] = b[i - 1] + 0.5 * dr * (d[i] + d[i - 1]);
      for (int i = match - 1; i >= 0; --i) b[i] = b[i + 1] - 0.5 * dr * (d[i] + d[i + 1]);
    }
  }
  return tc;
}

}  // namespace nlscatter
