#include <gtest/gtest.h>

#include <cmath>

#include "nlscatter/errors.hpp"
#include "nlscatter/norms.hpp"
#include "nlscatter/radial_solver.hpp"

using namespace nlscatter;

namespace {

double bump(double x) { return std::exp(-(x - 5.0) * (x - 5.0) / 0.25); }
double dbump(double x) { return -8.0 * (x - 5.0) * bump(x); }

// w = g(t - r) - g(t + r) at t = 0, with g(x) = bump(-x) so the wave is incoming
RadialCauchyData dalembert_data(const RadialGrid& g) {
  auto d = RadialCauchyData::zeros(g);
  for (int i = 1; i < g.size(); ++i) {
    const double r = g.r(i);
    d.phi[i] = (bump(r) - bump(-r)) / r;
    d.psi[i] = (-dbump(r) - dbump(-r)) / r;
  }
  return d;
}

double exact_u(double t, double r) { return (bump(r - t) - bump(-t - r)) / r; }

}  // namespace

TEST(RadialSolver, ZeroDataStaysZero) {
  RadialGrid g(4.0, 400);
  SolverConfig cfg;
  cfg.end_time = 2.0;
  const auto tr = solve_semilinear_radial(Nonlinearity::power(1.0, 5), RadialCauchyData::zeros(g), cfg);
  for (const auto& s : tr.u)
    for (double v : s) EXPECT_EQ(v, 0.0);
}

TEST(RadialSolver, CflViolationIsConfigurationError) {
  RadialGrid g(4.0, 400);
  SolverConfig cfg;
  cfg.time_step = 0.02;
  cfg.cfl_ratio = 1.0;
  EXPECT_THROW(solve_linear_radial(RadialCauchyData::zeros(g), cfg), ConfigurationError);
  cfg.cfl_ratio = 1.5;
  cfg.time_step = 0.0;
  EXPECT_THROW(solve_linear_radial(RadialCauchyData::zeros(g), cfg), ConfigurationError);
}

TEST(RadialSolver, CharacteristicTranslateIsExact) {
  RadialGrid g(12.0, 2400);
  SolverConfig cfg;
  cfg.end_time = 4.0;
  const auto tr = solve_linear_radial(dalembert_data(g), cfg);
  double err = 0.0;
  for (std::size_t n = 0; n < tr.size(); ++n)
    for (int i = 1; i < g.size(); ++i)
      err = std::max(err, std::abs(tr.u[n][i] - exact_u(tr.times[n], g.r(i))));
  // only the third-order start contributes (Simpson remainder of a smooth profile)
  EXPECT_LT(err, 1e-9);
}

TEST(RadialSolver, LinearEnergyConservedToRoundoff) {
  RadialGrid g(12.0, 2400);
  SolverConfig cfg;
  cfg.end_time = 3.0;
  const auto tr = solve_linear_radial(dalembert_data(g), cfg);
  const double e0 = energy_linear(tr.snapshot(1));
  for (std::size_t n = 1; n < tr.size(); ++n)
    EXPECT_NEAR(energy_linear(tr.snapshot(n)), e0, 1e-10 * e0);
}

TEST(RadialSolver, PotentialPathsCoincide) {
  RadialGrid g(12.0, 1200);
  SolverConfig cfg;
  cfg.end_time = 2.0;
  const double dt = cfg.resolve_step(g.dr(), 1.0);
  const int nt = static_cast<int>(std::lround(2.0 / dt)) + 1;
  auto zero = RadialSpacetimeField::from_function(g, 0.0, dt, nt, [](double, double) { return 0.0; });
  auto forcing = RadialSpacetimeField::from_function(
      g, 0.0, dt, nt, [](double t, double r) { return std::sin(t) * std::exp(-r * r); });
  const auto d = dalembert_data(g);
  const auto a = solve_linear_radial(d, cfg);
  const auto b = solve_potential_radial(zero, zero, d, cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t n = 0; n < a.size(); ++n) EXPECT_EQ(a.u[n], b.u[n]);
  const auto c = solve_linear_radial(d, forcing, cfg);
  const auto e = solve_potential_radial(zero, forcing, d, cfg);
  for (std::size_t n = 0; n < c.size(); ++n)
    for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(c.u[n][i], e.u[n][i], 1e-10);
}

namespace {

// u* = cos t exp(-r^2), V = 1 + 0.5 sin t exp(-r^2): g = box u* + V u*
double mms_error(int n) {
  RadialGrid g(6.0, n);
  SolverConfig cfg;
  cfg.cfl_ratio = 0.5;
  cfg.end_time = 1.0;
  const double dt = cfg.resolve_step(g.dr(), 1.0);
  const int nt = static_cast<int>(std::lround(1.0 / dt)) + 2;
  auto ustar = [](double t, double r) { return std::cos(t) * std::exp(-r * r); };
  auto V = RadialSpacetimeField::from_function(
      g, 0.0, dt, nt, [](double t, double r) { return 1.0 + 0.5 * std::sin(t) * std::exp(-r * r); });
  auto src = RadialSpacetimeField::from_function(g, 0.0, dt, nt, [&](double t, double r) {
    const double box = std::cos(t) * std::exp(-r * r) * (5.0 - 4.0 * r * r);
    return box + (1.0 + 0.5 * std::sin(t) * std::exp(-r * r)) * ustar(t, r);
  });
  auto d = RadialCauchyData::from_functions(
      g, [&](double r) { return ustar(0.0, r); }, [](double) { return 0.0; });
  const auto tr = solve_potential_radial(V, src, d, cfg);
  double err = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k)
    for (int i = 1; i < g.size(); ++i) err = std::max(err, std::abs(tr.u[k][i] - ustar(tr.times[k], g.r(i))));
  return err;
}

}  // namespace

TEST(RadialSolver, ManufacturedSolutionSecondOrder) {
  const double e1 = mms_error(200), e2 = mms_error(400), e3 = mms_error(800);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.25);
  EXPECT_NEAR(std::log2(e2 / e3), 2.0, 0.25);
}

TEST(RadialSolver, QuinticCorrectionScalesAsFifthPower) {
  RadialGrid g(10.0, 1000);
  SolverConfig cfg;
  cfg.cfl_ratio = 0.8;
  cfg.end_time = 4.0;
  const auto f = Nonlinearity::power(1.0, 5);
  std::vector<double> lam = {0.2, 0.1, 0.05}, diff;
  for (double l : lam) {
    auto d = RadialCauchyData::from_functions(
        g, [&](double r) { return l * 3.0 * std::exp(-r * r); }, [](double) { return 0.0; });
    const auto a = solve_semilinear_radial(f, d, cfg);
    const auto b = solve_linear_radial(d, cfg);
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n)
      for (int i = 0; i < g.size(); ++i) m = std::max(m, std::abs(a.u[n][i] - b.u[n][i]));
    diff.push_back(m);
  }
  const double slope = std::log(diff[0] / diff[2]) / std::log(lam[0] / lam[2]);
  EXPECT_NEAR(slope, 5.0, 0.3);
}

TEST(RadialSolver, TimeReversalReturnsData) {
  RadialGrid g(12.0, 1200);
  SolverConfig cfg;
  cfg.cfl_ratio = 0.7;
  cfg.end_time = 2.0;
  auto d = RadialCauchyData::from_functions(
      g, [](double r) { return 0.5 * std::exp(-(r - 3) * (r - 3)); }, [](double) { return 0.0; });
  const auto f = Nonlinearity::power(1.0, 5);
  const auto fwd = solve_semilinear_radial(f, d, cfg);
  auto back_data = fwd.snapshot(fwd.size() - 1);
  for (auto& v : back_data.psi) v = -v;
  const auto back = solve_semilinear_radial(f, back_data, cfg);
  const auto& u = back.u.back();
  for (int i = 1; i < g.size(); ++i) EXPECT_NEAR(u[i], d.phi[i], 1e-11);
}

TEST(RadialSolver, FinitePropagationSpeed) {
  RadialGrid g(10.0, 1000);
  SolverConfig cfg;
  cfg.end_time = 0.9;
  auto d = RadialCauchyData::from_functions(
      g, [](double r) { return r < 1.0 ? 0.1 : 0.0; }, [](double) { return 0.0; });
  const auto tr = solve_semilinear_radial(Nonlinearity::power(1.0, 5), d, cfg);
  for (std::size_t n = 0; n < tr.size(); ++n)
    for (int i = 0; i < g.size(); ++i)
      if (g.r(i) > 1.0 + tr.times[n] + 2 * g.dr()) EXPECT_EQ(tr.u[n][i], 0.0);
}

TEST(RadialSolver, BackwardSolveAndTruncationWarning) {
  RadialGrid g(6.0, 600);
  SolverConfig cfg;
  cfg.end_time = -5.0;
  auto d = RadialCauchyData::from_functions(
      g, [](double r) { return std::exp(-(r - 3) * (r - 3) * 4); }, [](double) { return 0.0; });
  const auto tr = solve_linear_radial(d, cfg);
  EXPECT_NEAR(tr.times.front(), -5.0, 1e-12);
  EXPECT_NEAR(tr.times.back(), 0.0, 1e-12);
  EXPECT_FALSE(tr.warnings.empty());
}
