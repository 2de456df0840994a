#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nlscatter/grid.hpp"
#include "nlscatter/nonlinearity.hpp"
#include "nlscatter/scattering.hpp"

namespace nlscatter {

struct MultiIndex {
  std::array<int, 4> a{0, 0, 0, 0};

  static MultiIndex unit(int j);
  int order() const { return a[0] + a[1] + a[2] + a[3]; }
  bool is_zero() const { return order() == 0; }
  MultiIndex operator+(const MultiIndex& o) const;
  bool operator==(const MultiIndex& o) const { return a == o.a; }
  bool operator<(const MultiIndex& o) const;  // by order, then lexicographic
  bool contains(const MultiIndex& o) const;   // o <= this componentwise
  std::string str() const;                    // "1100"
  static MultiIndex parse(const std::string& s);
  // All nonzero indices with |alpha| <= max_order, sorted by order (69 for max_order 4).
  static std::vector<MultiIndex> all_up_to(int max_order);
  // Nonzero indices with 0/1 components.
  static std::vector<MultiIndex> binary();
};

// Ordered decompositions alpha = beta_1 + ... + beta_k with every beta_i nonzero.
std::vector<std::vector<MultiIndex>> ordered_decompositions(const MultiIndex& alpha, int k);

// Source term grouped by the multiset {beta_1..beta_k}: coeff = (#orderings) / k!.
struct SourceTerm {
  int k = 0;
  double coeff = 0.0;
  std::vector<MultiIndex> parts;
};
std::vector<SourceTerm> source_terms(const MultiIndex& alpha);

// Pointwise right-hand side of box w_alpha = -f'(u0) w_alpha + source, excluding the first term:
//   source = -sum_{k>=2} f^(k)(u0)/k! sum_{ordered beta_1+..+beta_k = alpha} w_beta_1 .. w_beta_k.
// fd[k] = f^(k)(u0) for k = 0..4; w(beta) returns the member value.
double assemble_source_point(const MultiIndex& alpha, const std::array<double, 5>& fd,
                             const std::function<double(const MultiIndex&)>& w);
double assemble_source_point_bruteforce(const MultiIndex& alpha, const std::array<double, 5>& fd,
                                        const std::function<double(const MultiIndex&)>& w);

// Snapshot form: members are u-level fields on a common grid; throws DependencyError when a
// prerequisite member is missing.
std::vector<double> assemble_source(const MultiIndex& alpha,
                                    const std::map<MultiIndex, std::vector<double>>& members,
                                    const Nonlinearity& nl, const std::vector<double>& u0);

struct HierarchyMember {
  MultiIndex alpha;
  RadiationFieldData xi;        // N+ w_alpha
  RadiationFieldData backward;  // N- w_alpha (Y_j or 0 by construction)
  RadialCauchyData data;        // w_alpha at t = 0
  double energy = 0.0;          // linear energy at t = 0
  double l5l10 = 0.0;           // ||w_alpha||_{L^5 L^10} over the interaction window
  bool identically_zero = false;
};

struct Hierarchy {
  ScatteringModel model;
  RadialCauchyData u0_data;
  RadiationFieldData background_forward;  // A(Y0)
  RadialTrajectory u0;                    // stored when requested
  std::vector<MultiIndex> order;
  std::map<MultiIndex, HierarchyMember> members;
  const HierarchyMember& at(const MultiIndex& a) const;
};

struct HierarchyOptions {
  std::vector<MultiIndex> indices;  // empty: all |alpha| <= 4; must be downward closed
  int store_stride = 0;             // > 0 stores u0 every store_stride levels
};

// Background u0 with N- u0 = Y0, marched over the interaction window.
RadialTrajectory solve_background(const ScatteringModel& m, const RadiationFieldData& Y0,
                                  int store_stride = 1);

// All members march together with u0 from the far past: |alpha| = 1 carry the incoming fields
// Y_j, higher members start from zero.
Hierarchy solve_hierarchy(const ScatteringModel& m, const RadiationFieldData& Y0,
                          const std::array<RadiationFieldData, 4>& Y, const HierarchyOptions& opts = {});

// Re-marches u0 and the members backward from t = 0 and returns max_alpha ||N- w_alpha - expected||.
double backward_consistency(const Hierarchy& h, const std::array<RadiationFieldData, 4>& Y);

// Sum_{1 <= |alpha| <= max_order} eps^alpha Xi_alpha for eps = (e1..e4).
RadiationFieldData expansion_sum(const Hierarchy& h, const std::array<double, 4>& eps, int max_order = 4);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;  // of the log-log fit
};
SlopeFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct RemainderStudy {
  std::vector<double> eps;
  std::vector<double> delta;         // full order-4 correction
  std::vector<double> delta_order1;  // only Xi_j
  SlopeFit fit;
  SlopeFit fit_order1;
  std::vector<int> fixed_point_iterations;
};

// Delta(eps) = ||A(Y0 + eps sum Y_j) - A(Y0) - sum eps^|alpha| Xi_alpha|| for eps (1,1,1,1).
RemainderStudy remainder_study(const Hierarchy& h, const RadiationFieldData& Y0,
                               const std::array<RadiationFieldData, 4>& Y, const std::vector<double>& eps,
                               double tol = 1e-13);

struct PolarizationCheck {
  std::array<double, 4> relative_error{};  // per order k = 1..4
  double max_error = 0.0;
};

// With Y2 = Y1 and Y3 = Y4 = 0, compares sum_{|alpha| = k} Xi_alpha with the k-th Taylor
// coefficient of eps -> A(Y0 + 2 eps Y1) from a nine-point polynomial fit with spacing delta.
PolarizationCheck polarization_check(const ScatteringModel& m, const RadiationFieldData& Y0,
                                     const RadiationFieldData& Y1, double delta = 0.025);

}  // namespace nlscatter
