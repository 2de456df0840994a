#pragma once

#include <memory>
#include <string>
#include <vector>

namespace nlscatter {

class NonlinearityFamily;

// f(u) with derivatives through order 5 and antiderivative F(u) = int_0^u f.
// Cheap to copy; the underlying family is immutable and shared.
class Nonlinearity {
 public:
  static Nonlinearity power(double coeff, int exponent = 5);
  // f(u) = sum_k coeffs[k] u^k
  static Nonlinearity polynomial(std::vector<double> coeffs, std::string label = "");
  // f''''(u) = C u (1 + z0 u^2 / (1 + u^2)), integrated four times from 0.
  static Nonlinearity perturbed_quintic(double C, double z0);
  // Tabulated on a uniform symmetric grid; tables of f, f', f'', f''' at the nodes.
  static Nonlinearity tabulated(double u_max, std::vector<double> f0, std::vector<double> f1,
                                std::vector<double> f2, std::vector<double> f3,
                                std::string label = "tabulated");
  static Nonlinearity zero();

  double eval(double u, int order) const;
  double operator()(double u) const { return eval(u, 0); }
  double antiderivative(double u) const;
  const std::string& label() const;
  // Tightest C with C^-1 |u|^5 <= |f(u)| <= C |u|^5 known for the family (0 if unknown).
  double growth_constant() const;
  bool is_zero() const;

 private:
  explicit Nonlinearity(std::shared_ptr<const NonlinearityFamily> impl);
  std::shared_ptr<const NonlinearityFamily> impl_;
};

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  double metric = 0.0;
  std::vector<double> witnesses;
  std::string detail;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;
  double empirical_C = 0.0;
  double convexity_deficit = 0.0;
  bool all_passed() const;
  const HypothesisCheck& get(const std::string& name) const;
};

struct ValidationBounds {
  double oddness_tol = 1e-12;
  double ratio_spread_max = 1e3;   // H1: max/min of |f|/|u|^5
  double h2_ratio_max = 1e2;       // H2: |u f'/f| at extreme samples
  double h4_scaled_max = 1e4;      // H4: C_j relative to the H1 scale
  double zero_tol = 1e-12;
};

ValidationReport validate_hypotheses(const Nonlinearity& nl, const std::vector<double>& grid,
                                     const ValidationBounds& bounds = {});

std::vector<double> symmetric_grid(double u_max, int n_points);

}  // namespace nlscatter
