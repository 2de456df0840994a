#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace nlscatter {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);

// Clamped smoothstep of order 7 and the even cutoff chi(x) = S(2 (1 - |x|)):
// chi = 1 for |x| <= 1/2, chi = 0 for |x| >= 1.
double smoothstep7(double x);
double cutoff(double x);
double cutoff_derivative(double x);

struct ConeConfig {
  std::vector<Vec3> z;       // vertices
  std::vector<double> s;     // emission times
  double m = 2.0;            // profile order
  double half_width = 1.0;   // chi is applied to y / half_width

  static ConeConfig triple(double a, double b, double s_star = 0.0);
  static ConeConfig quadruple(double a, double b, double c, double s_star = 0.0);
  int count() const { return static_cast<int>(z.size()); }
  void validate() const;
};

// p(y) = y_+^m chi(y / c) and its derivative.
double profile(const ConeConfig& cfg, double y);
double profile_derivative(const ConeConfig& cfg, double y);

enum class Family { Minus, Plus };

// zeta_j^-(t, z) = p(t - s_j + |z - z_j|) / |z - z_j|, zeta_j^+ = p(t - s_j - |z - z_j|) / |z - z_j|.
// Throws DomainError at the vertex.
double spherical_wave_eval(const ConeConfig& cfg, int j, double t, const Vec3& z, Family fam);

// Closed-form backward field Upsilon_j(s, omega) = p'(s - s_j - <omega, z_j>).
double upsilon_j(const ConeConfig& cfg, int j, double s, const Vec3& omega);

// R d_s zeta_j^-(s - R, R omega): the finite-R approximant of the backward field.
double spherical_wave_field_at(const ConeConfig& cfg, int j, double s, const Vec3& omega, double R);

struct PatternPoint {
  double s = 0.0;
  Vec3 omega{0.0, 0.0, 1.0};
};

enum class PatternKind { Plane, TripleFlowout, QuadrupleCone, Extrapolated };

struct PatternSet {
  PatternKind kind = PatternKind::Plane;
  // Plane: {s = offset - <omega, normal>}; quadruple: vertex gamma, t0 absolute.
  // Triple: the family over x30 with fixed (a, b) and emission time s_star.
  Vec3 normal{0.0, 0.0, 0.0};
  double offset = 0.0;
  double a = 0.0, b = 0.0, s_star = 0.0;
  std::vector<PatternPoint> points;

  // Signed defining residual at (s, omega); zero on the pattern.
  double residual(const PatternPoint& p) const;
  bool contains(const PatternPoint& p, double tol = 1e-9) const;
  std::string kind_name() const;
  void write_csv(std::ostream& os) const;
};

// The outgoing plane patterns {s - s_j + <omega, z_j> = 0}, one per vertex.
std::vector<PatternSet> plane_patterns(const ConeConfig& cfg);

struct SpaceTimePoint {
  double t = 0.0;
  Vec3 z{0.0, 0.0, 0.0};
};

struct TripleGeometry {
  double a = 0.0, b = 0.0, s_star = 0.0;
  ConeConfig cones;  // z = 0, (2a,0,0), (0,2b,0), all emitting at s_star

  // Gamma-/+ at height x3: (a, b, x3, s* -/+ sqrt(x3^2 + a^2 + b^2)).
  SpaceTimePoint gamma(double x3, Family fam) const;
  // t0(x30) = -sqrt(x30^2 + a^2 + b^2), relative to s_star.
  double t0(double x30) const;
  // Point of Q- on the ray leaving (a, b, x30) at time s* + t0 in the admissible direction
  // omega(x30, theta), at distance rho along the ray.
  Vec3 direction(double x30, double theta) const;
  SpaceTimePoint q_minus(double x30, double theta, double rho) const;
  // Residuals of the two defining equations of Q- at a space-time point, given x30.
  std::array<double, 2> q_minus_residual(double x30, const SpaceTimePoint& p) const;
  // Closed-form pattern Q-_inf sampled over x30 and theta.
  PatternSet pattern(const std::vector<double>& x30, int n_theta) const;
  PatternPoint pattern_point(double x30, double theta) const;
};

// Throws DomainError when a b = 0 (tangent cones).
TripleGeometry triple_interaction_geometry(double a, double b, double s_star = 0.0);

struct QuadrupleGeometry {
  double a = 0.0, b = 0.0, c = 0.0, s_star = 0.0;
  ConeConfig cones;  // z = 0, (2a,0,0), (0,2b,0), (0,0,2c)
  Vec3 vertex() const { return {a, b, c}; }
  // Absolute times of gamma-/+.
  double t0(Family fam) const;
  // Flow-out pattern of the cone from gamma_-/+: {s = t0 - <omega, gamma>}, sampled on n_theta x n_phi.
  PatternSet pattern(Family fam, int n_theta, int n_phi) const;
};

QuadrupleGeometry quadruple_interaction_geometry(double a, double b, double c, double s_star = 0.0);

// Large-r trace of a surface along a ray rho -> (t, z): s = t - |z|, omega = z / |z| sampled at
// rho = rho0 2^k and extrapolated to 1/r = 0 by Neville's scheme. Throws NumericalGuardError when
// s grows without bound along the ray.
struct RayTrace {
  PatternPoint point;
  double error_estimate = 0.0;
};
RayTrace radiation_pattern_of_ray(const std::function<SpaceTimePoint(double)>& ray, double rho0 = 8.0,
                                  int levels = 10);
PatternSet radiation_pattern_of_surface(const std::vector<std::function<SpaceTimePoint(double)>>& rays,
                                        double rho0 = 8.0, int levels = 10);

// Transport chain on r_i = i dr, i = 0..n-1 (radial reduction, angular Laplacian dropped):
//   2 (m + 1) beta_1' = gamma_0,
//   2 (m + k + 1) beta_{k+1}' = -beta_k'' - sum_{l + mu = k} gamma_l beta_mu,  k >= 1.
// Minus family: beta_k(r_max) = 0. Plus family: beta_k(r_match) equals the minus value there,
// r_match = 2 dr.
struct TransportCoefficients {
  Family family = Family::Minus;
  double dr = 0.0;
  double m = 2.0;
  std::vector<std::vector<double>> gamma;  // gamma[k][i]
  std::vector<std::vector<double>> beta;   // beta[k][i], k = 0..K, beta[0] = 1
  double r(int i) const { return i * dr; }
  int size() const { return beta.empty() ? 0 : static_cast<int>(beta[0].size()); }
};

TransportCoefficients solve_transport(const std::vector<std::vector<double>>& gamma, double dr, double m,
                                      int K, Family fam = Family::Minus,
                                      const TransportCoefficients* minus = nullptr);

}  // namespace nlscatter
