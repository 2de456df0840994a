#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "nlscatter/conormal.hpp"
#include "nlscatter/errors.hpp"

using namespace nlscatter;

namespace {

double wave_box_residual(const ConeConfig& c, int j, double t, const Vec3& z, double h) {
  auto u = [&](double tt, const Vec3& p) { return spherical_wave_eval(c, j, tt, p, Family::Minus); };
  double lap = -6.0 * u(t, z);
  for (int i = 0; i < 3; ++i) {
    Vec3 p = z, q = z;
    p[i] += h;
    q[i] -= h;
    lap += u(t, p) + u(t, q);
  }
  lap /= h * h;
  const double utt = (u(t + h, z) - 2.0 * u(t, z) + u(t - h, z)) / (h * h);
  return utt - lap;
}

double bump(double r) {
  const double x = r - 2.0;
  return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
}

}  // namespace

TEST(Conormal, CutoffShape) {
  EXPECT_EQ(cutoff(0.3), 1.0);
  EXPECT_EQ(cutoff(-0.5), 1.0);
  EXPECT_EQ(cutoff(1.0), 0.0);
  EXPECT_NEAR(cutoff(0.75), 0.5, 1e-15);
  const double h = 1e-6;
  EXPECT_NEAR(cutoff_derivative(0.7), (cutoff(0.7 + h) - cutoff(0.7 - h)) / (2 * h), 1e-8);
}

TEST(Conormal, SphericalWaveVanishesBeforeTheCone) {
  const auto c = ConeConfig::triple(1.0, 1.0);
  EXPECT_EQ(spherical_wave_eval(c, 1, -3.0, {0.0, 0.0, 0.0}, Family::Minus), 0.0);
  EXPECT_THROW(spherical_wave_eval(c, 1, 0.0, {2.0, 0.0, 0.0}, Family::Minus), DomainError);
}

TEST(Conormal, SphericalWaveSolvesTheWaveEquation) {
  auto c = ConeConfig::triple(1.0, 1.0);
  c.m = 4.0;
  c.half_width = 2.0;
  // y = t + |z - z_1| = 1.2, inside the smooth part of the shell
  const Vec3 z{1.2, 0.9, 0.0};
  const double t = 1.2 - std::sqrt(0.8 * 0.8 + 0.9 * 0.9);
  const double r1 = wave_box_residual(c, 1, t, z, 0.02);
  const double r2 = wave_box_residual(c, 1, t, z, 0.01);
  EXPECT_LT(std::abs(r2), 1e-2);
  EXPECT_NEAR(std::abs(r1 / r2), 4.0, 0.5);
}

TEST(Conormal, FiniteRadiusFieldApproachesUpsilon) {
  for (double m : {1.0, 2.0, 3.0}) {
    auto c = ConeConfig::triple(1.0, 1.0);
    c.m = m;
    const Vec3 w{0.6, 0.0, 0.8};
    double prev = 0.0;
    for (double R : {20.0, 40.0, 80.0}) {
      double err = 0.0;
      for (int k = 0; k <= 600; ++k) {  // Upsilon_1 lives on s in (1.2, 2.2)
        const double s = -3.0 + 0.01 * k;
        const double e = spherical_wave_field_at(c, 1, s, w, R) - upsilon_j(c, 1, s, w);
        err += e * e * 0.01;
      }
      err = std::sqrt(err);
      ASSERT_GT(err, 0.0);
      if (prev > 0.0) EXPECT_NEAR(prev / err, 2.0, 0.3);
      prev = err;
    }
  }
}

TEST(Conormal, PlanePatterns) {
  const double a = 0.7;
  const auto p = plane_patterns(ConeConfig::triple(a, 1.0));
  ASSERT_EQ(p.size(), 3u);
  EXPECT_TRUE(p[0].contains({0.0, {0.0, 0.6, 0.8}}));
  EXPECT_FALSE(p[0].contains({0.1, {0.0, 0.6, 0.8}}));
  // vertex (2a, 0, 0) emitting at 0: s = -2a omega_1
  EXPECT_TRUE(p[1].contains({-2.0 * a, {1.0, 0.0, 0.0}}));
  EXPECT_FALSE(p[1].contains({a, {1.0, 0.0, 0.0}}));
}

TEST(Conormal, CurvesGammaLieOnAllCones) {
  const auto g = triple_interaction_geometry(1.0, 1.0, 0.3);
  const auto p = g.gamma(0.0, Family::Minus);
  EXPECT_NEAR(p.t, 0.3 - std::sqrt(2.0), 1e-15);
  for (double x3 = -5.0; x3 <= 5.0; x3 += 0.25)
    for (auto fam : {Family::Minus, Family::Plus}) {
      const auto q = g.gamma(x3, fam);
      for (int j = 0; j < 3; ++j) {
        Vec3 d{q.z[0] - g.cones.z[j][0], q.z[1] - g.cones.z[j][1], q.z[2] - g.cones.z[j][2]};
        EXPECT_NEAR(norm(d), std::abs(q.t - g.cones.s[j]), 1e-12);
      }
    }
  EXPECT_THROW(triple_interaction_geometry(0.0, 1.0), DomainError);
}

TEST(Conormal, TripleFlowoutClosedFormAndExtrapolation) {
  const auto g = triple_interaction_geometry(1.0, 1.0);
  // x30 = 0: omega_3 = 0 and s = -sqrt(2) - omega_1 - omega_2
  const auto p = g.pattern_point(0.0, 0.4);
  EXPECT_EQ(p.omega[2], 0.0);
  EXPECT_NEAR(p.s, -std::sqrt(2.0) - p.omega[0] - p.omega[1], 1e-15);
  const auto set = g.pattern({-1.5, -0.5, 0.0, 0.5, 1.5}, 16);
  for (const auto& q : set.points) {
    EXPECT_LT(std::abs(set.residual(q)), 1e-12);
    EXPECT_NEAR(norm(q.omega), 1.0, 1e-14);
  }
  for (double x30 : {-1.5, 0.0, 0.8})
    for (double th : {0.1, 2.0, 4.0}) {
      const auto q = g.q_minus(x30, th, 3.7);
      const auto res = g.q_minus_residual(x30, q);
      EXPECT_LT(std::abs(res[0]), 1e-12);
      EXPECT_LT(std::abs(res[1]), 1e-12);
      const auto tr = radiation_pattern_of_ray([&](double rho) { return g.q_minus(x30, th, rho); });
      const auto exact = g.pattern_point(x30, th);
      EXPECT_NEAR(tr.point.s, exact.s, 1e-6);
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(tr.point.omega[i], exact.omega[i], 1e-6);
      EXPECT_TRUE(set.contains(tr.point, 1e-6));
    }
}

TEST(Conormal, TripleFlowoutMeetsPlanesOnlyAtIsolatedPoints) {
  const auto g = triple_interaction_geometry(1.0, 1.0);
  const auto planes = plane_patterns(g.cones);
  const int n = 720;
  // each plane touches the x30 = 0 circle at one tangency point
  for (const auto& pl : planes) {
    int hits = 0, runs = 0;
    bool prev = false;
    for (int k = 0; k <= n; ++k) {
      const bool in = pl.contains(g.pattern_point(0.0, 2.0 * M_PI * k / n), 1e-3);
      hits += in && k < n ? 1 : 0;
      runs += in && !prev ? 1 : 0;
      prev = in;
    }
    EXPECT_GE(hits, 1);
    EXPECT_LE(runs, 2);  // one run, possibly split by the seam
    EXPECT_LT(hits, n / 20);
  }
}

TEST(Conormal, TimeTranslationEquivariance) {
  const auto g0 = triple_interaction_geometry(0.8, 1.3, 0.0);
  const auto g1 = triple_interaction_geometry(0.8, 1.3, 0.625);
  for (double x30 : {-1.0, 0.25})
    for (double th : {0.0, 1.0, 3.0}) {
      const auto p0 = g0.pattern_point(x30, th);
      const auto p1 = g1.pattern_point(x30, th);
      EXPECT_EQ(p1.s, p0.s + 0.625);
      EXPECT_EQ(p1.omega, p0.omega);
    }
}

TEST(Conormal, QuadrupleGeometry) {
  const auto g = quadruple_interaction_geometry(1.0, 1.0, 1.0);
  EXPECT_NEAR(g.t0(Family::Minus), -std::sqrt(3.0), 1e-15);
  for (int j = 0; j < 4; ++j) {
    const Vec3 v = g.vertex();
    Vec3 d{v[0] - g.cones.z[j][0], v[1] - g.cones.z[j][1], v[2] - g.cones.z[j][2]};
    EXPECT_NEAR(norm(d), std::abs(g.t0(Family::Minus) - g.cones.s[j]), 1e-12);
  }
  const auto pat = g.pattern(Family::Minus, 12, 24);
  for (const auto& p : pat.points) {
    EXPECT_LT(std::abs(pat.residual(p)), 1e-12);
    EXPECT_NEAR(p.s, -std::sqrt(3.0) - p.omega[0] - p.omega[1] - p.omega[2], 1e-12);
  }
  // a cone from (t0, gamma) traces to the same pattern
  const Vec3 w{0.48, 0.6, 0.64};
  const double t0 = g.t0(Family::Minus);
  const auto tr = radiation_pattern_of_ray([&](double rho) {
    return SpaceTimePoint{t0 + rho, {1.0 + rho * w[0], 1.0 + rho * w[1], 1.0 + rho * w[2]}};
  });
  EXPECT_TRUE(pat.contains(tr.point, 1e-6));
  const auto planes = plane_patterns(g.cones);
  int hits = 0;
  for (const auto& p : pat.points)
    for (const auto& pl : planes) hits += pl.contains(p, 1e-3) ? 1 : 0;
  EXPECT_LT(hits, static_cast<int>(pat.points.size()) / 20);
  EXPECT_THROW(quadruple_interaction_geometry(1.0, 0.0, 1.0), DomainError);
}

TEST(Conormal, RayTraceOfLightConeAndDivergence) {
  const Vec3 w{0.0, 0.6, 0.8};
  const auto tr = radiation_pattern_of_ray([&](double r) {
    return SpaceTimePoint{r, {r * w[0], r * w[1], r * w[2]}};
  });
  EXPECT_NEAR(tr.point.s, 0.0, 1e-12);
  EXPECT_THROW(radiation_pattern_of_ray([&](double r) {
                 return SpaceTimePoint{2.0 * r, {r * w[0], r * w[1], r * w[2]}};
               }),
               NumericalGuardError);
}

TEST(Conormal, PatternCsv) {
  const auto g = triple_interaction_geometry(1.0, 1.0);
  std::ostringstream os;
  g.pattern({0.0}, 4).write_csv(os);
  EXPECT_EQ(os.str().substr(0, 22), "s,omega1,omega2,omega3");
}

TEST(Conormal, TransportZeroGamma) {
  std::vector<std::vector<double>> gamma(3, std::vector<double>(101, 0.0));
  const auto tc = solve_transport(gamma, 0.05, 2.0, 3);
  for (double v : tc.beta[0]) EXPECT_EQ(v, 1.0);
  for (int k = 1; k <= 3; ++k)
    for (double v : tc.beta[k]) EXPECT_EQ(v, 0.0);
}

TEST(Conormal, TransportFirstCoefficientIsExplicitIntegral) {
  const double dr = 2.5e-4, m = 2.0;
  const int n = static_cast<int>(std::lround(4.0 / dr)) + 1;
  std::vector<std::vector<double>> gamma(1, std::vector<double>(n));
  for (int i = 0; i < n; ++i) gamma[0][i] = bump(i * dr);
  const auto tc = solve_transport(gamma, dr, m, 1);
  double worst = 0.0;
  for (double r : {0.0, 1.3, 1.8, 2.0, 2.45, 2.9, 3.5}) {
    const double lo = std::max(r, 1.0);
    const double q = lo >= 3.0 ? 0.0 : boost::math::quadrature::gauss_kronrod<double, 61>::integrate(bump, lo, 3.0, 15, 1e-14);
    const double expected = -q / (2.0 * (m + 1.0));
    worst = std::max(worst, std::abs(tc.beta[1][static_cast<int>(std::lround(r / dr))] - expected));
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Conormal, TransportSecondOrderConvergence) {
  auto solve = [](double dr) {
    const int n = static_cast<int>(std::lround(8.0 / dr)) + 1;
    std::vector<std::vector<double>> gamma(2, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
      const double r = i * dr;
      gamma[0][i] = std::exp(-(r - 2.0) * (r - 2.0) * 2.0);
      gamma[1][i] = r * std::exp(-r * r);
    }
    return solve_transport(gamma, dr, 2.0, 3);
  };
  const auto a = solve(0.04), b = solve(0.02), c = solve(0.01);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    e1 = std::max(e1, std::abs(a.beta[3][i] - b.beta[3][2 * i]));
    e2 = std::max(e2, std::abs(b.beta[3][2 * i] - c.beta[3][4 * i]));
  }
  EXPECT_NEAR(e1 / e2, 4.0, 0.5);
  for (int k = 1; k <= 3; ++k) EXPECT_LT(std::abs(c.beta[k].back()), 1e-8);
}

TEST(Conormal, TransportPlusFamilyMatchesAtTheVertex) {
  const double dr = 0.01;
  const int n = 601;
  std::vector<std::vector<double>> gm(1, std::vector<double>(n)), gp(1, std::vector<double>(n));
  for (int i = 0; i < n; ++i) {
    gm[0][i] = std::exp(-(i * dr) * (i * dr));
    gp[0][i] = 0.5 * gm[0][i];
  }
  const auto minus = solve_transport(gm, dr, 2.0, 2);
  const auto plus = solve_transport(gp, dr, 2.0, 2, Family::Plus, &minus);
  for (int k = 1; k <= 2; ++k) EXPECT_EQ(plus.beta[k][2], minus.beta[k][2]);
  EXPECT_THROW(solve_transport(gp, dr, 2.0, 2, Family::Plus), DependencyError);
  std::vector<std::vector<double>> flat(1, std::vector<double>(n, 1.0));
  EXPECT_THROW(solve_transport(flat, dr, 2.0, 1), PreconditionError);
}
