#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlscatter/errors.hpp"
#include "nlscatter/expansion.hpp"
#include "nlscatter/norms.hpp"

using namespace nlscatter;

namespace {

// kind 1: a d/ds exp(-4x^2); kind 2: a d2/ds2 exp(-4x^2); x = s - c
RadiationFieldData shape(double a, double c, int kind, double h = 0.02) {
  auto f = RadiationFieldData::radial(-4.0, h, static_cast<int>(std::lround(8.0 / h)) + 1);
  for (int j = 0; j < f.n_s; ++j) {
    const double x = f.s(j) - c, g = std::exp(-4 * x * x);
    f.at(j) = kind == 1 ? -8 * a * x * g : a * (64 * x * x - 8) * g;
  }
  return f;
}

const Nonlinearity kQuintic = Nonlinearity::power(1.0, 5);

std::array<RadiationFieldData, 4> suite() {
  return {shape(0.5, -1, 1), shape(0.05, 0.5, 2), shape(0.4, 1, 1), shape(0.04, -0.5, 2)};
}

ScatteringModel model() { return ScatteringModel::make(kQuintic, 4.2, 0.0, 0.02); }

}  // namespace

TEST(MultiIndex, Enumeration) {
  EXPECT_EQ(MultiIndex::all_up_to(4).size(), 69u);
  EXPECT_EQ(MultiIndex::binary().size(), 15u);
  EXPECT_EQ(MultiIndex::parse("1101").str(), "1101");
  EXPECT_THROW(MultiIndex::parse("2210"), ArgumentError);
  EXPECT_EQ(ordered_decompositions(MultiIndex::parse("1111"), 4).size(), 24u);
  EXPECT_EQ(ordered_decompositions(MultiIndex::parse("1100"), 2).size(), 2u);
  EXPECT_EQ(ordered_decompositions(MultiIndex::parse("2000"), 2).size(), 1u);
}

TEST(Sources, MergedCoefficients) {
  const auto t2 = source_terms(MultiIndex::parse("1100"));
  ASSERT_EQ(t2.size(), 1u);
  EXPECT_DOUBLE_EQ(t2[0].coeff, 1.0);
  double quad = 0.0;
  for (const auto& t : source_terms(MultiIndex::parse("1111")))
    if (t.k == 4) quad = t.coeff;
  EXPECT_DOUBLE_EQ(quad, 1.0);
  // 2000 = 1000 + 1000 has one ordering: f''/2 w1^2
  EXPECT_DOUBLE_EQ(source_terms(MultiIndex::parse("2000"))[0].coeff, 0.5);
}

TEST(Sources, GroupedMatchesBruteForce) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::map<MultiIndex, double> w;
    for (const auto& a : MultiIndex::all_up_to(4)) w[a] = U(rng);
    std::array<double, 5> fd{};
    for (double& v : fd) v = 10 * U(rng);
    auto get = [&](const MultiIndex& b) { return w.at(b); };
    for (const auto& a : MultiIndex::all_up_to(4)) {
      const double x = assemble_source_point(a, fd, get);
      const double y = assemble_source_point_bruteforce(a, fd, get);
      EXPECT_NEAR(x, y, 1e-12 * std::max(1.0, std::abs(y)));
    }
  }
}

TEST(Sources, ZeroBackgroundAndMissingMember) {
  const auto a = MultiIndex::parse("1100");
  std::map<MultiIndex, std::vector<double>> mem;
  mem[MultiIndex::parse("1000")] = {1.0, 2.0};
  EXPECT_THROW(assemble_source(a, mem, kQuintic, {0.0, 0.0}), DependencyError);
  mem[MultiIndex::parse("0100")] = {3.0, 4.0};
  for (double v : assemble_source(a, mem, kQuintic, {0.0, 0.0})) EXPECT_EQ(v, 0.0);
  const auto s = assemble_source(a, mem, kQuintic, {0.5, 0.5});
  EXPECT_NEAR(s[0], -20.0 * 0.125 * 3.0, 1e-14);
}

TEST(Hierarchy, ZeroBackgroundGivesFreeWaves) {
  const auto m = model();
  const auto Y = suite();
  const auto h = solve_hierarchy(m, m.window(), Y);
  for (int j = 0; j < 4; ++j) {
    const auto& xi = h.at(MultiIndex::unit(j)).xi;
    EXPECT_LT(l2_distance(xi, m.on_window(Y[j]).scaled(-1.0)), 1e-12);
  }
  for (const auto& a : MultiIndex::all_up_to(4))
    if (a.order() >= 2) EXPECT_EQ(h.at(a).xi.l2_norm(), 0.0) << a.str();
}

TEST(Hierarchy, LinearityAndSymmetry) {
  const auto m = model();
  const auto Y0 = shape(0.3, 0, 1);
  auto Y = suite();
  HierarchyOptions o;
  o.indices = MultiIndex::all_up_to(2);
  const auto h = solve_hierarchy(m, Y0, Y, o);
  auto Y2 = Y;
  Y2[0] = Y[0].scaled(2.0);
  std::swap(Y2[1], Y2[2]);
  const auto g = solve_hierarchy(m, Y0, Y2, o);
  const auto& x1 = h.at(MultiIndex::parse("1000")).xi;
  EXPECT_LT(l2_distance(g.at(MultiIndex::parse("1000")).xi, x1.scaled(2.0)), 1e-12 * x1.l2_norm());
  const auto& a = h.at(MultiIndex::parse("0200")).xi;
  EXPECT_LT(l2_distance(g.at(MultiIndex::parse("0020")).xi, a), 1e-12 * a.l2_norm());
  const auto& b = h.at(MultiIndex::parse("0110")).xi;
  EXPECT_LT(l2_distance(g.at(MultiIndex::parse("0110")).xi, b), 1e-12 * b.l2_norm());
}

TEST(Hierarchy, BackwardFieldsFromCauchyData) {
  const auto m = model();
  const auto Y = suite();
  const auto h = solve_hierarchy(m, shape(0.3, 0, 1), Y);
  EXPECT_LT(backward_consistency(h, Y), 1e-10);
}

TEST(Hierarchy, IndexSetMustBeDownwardClosed) {
  const auto m = model();
  const auto Y = suite();
  HierarchyOptions o;
  o.indices = {MultiIndex::parse("1000"), MultiIndex::parse("1100")};
  EXPECT_THROW(solve_hierarchy(m, m.window(), Y, o), ArgumentError);
}

TEST(Hierarchy, BackgroundRoundTrip) {
  const auto m = model();
  const auto Y0 = shape(0.3, 0, 1);
  const auto h = solve_hierarchy(m, Y0, suite(), HierarchyOptions{{MultiIndex::unit(0)}, 0});
  EXPECT_LT(l2_distance(backward_field(m, h.u0_data), m.on_window(Y0)), 1e-4 * Y0.l2_norm());
  const double e = energy_semilinear(h.u0_data, kQuintic);
  EXPECT_NEAR(e, std::pow(m.on_window(Y0).l2_norm(), 2), 1e-2 * e);
}

TEST(Remainder, FourthOrderExpansion) {
  const auto m = model();
  const auto Y0 = shape(0.3, 0, 1);
  const auto Y = suite();
  const auto h = solve_hierarchy(m, Y0, Y);
  const auto st = remainder_study(h, Y0, Y, {0.2, 0.1, 0.05});
  EXPECT_NEAR(st.fit.slope, 5.0, 0.3);
  EXPECT_NEAR(st.fit_order1.slope, 2.0, 0.3);
  EXPECT_GT(st.delta[0], st.delta[1]);
  EXPECT_GT(st.delta[1], st.delta[2]);
  EXPECT_THROW(loglog_fit({1.0, 2.0}, {1.0, 2.0}), ArgumentError);
}

TEST(Remainder, Polarization) {
  const auto m = model();
  const auto pc = polarization_check(m, shape(0.3, 0, 1), shape(0.5, -1, 1));
  EXPECT_LT(pc.max_error, 1e-3);
}
