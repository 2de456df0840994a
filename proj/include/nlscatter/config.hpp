#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nlscatter/conormal.hpp"
#include "nlscatter/grid.hpp"
#include "nlscatter/nonlinearity.hpp"

namespace nlscatter {

inline constexpr int kConfigSchema = 1;

struct NonlinearitySpec {
  std::string name = "power";  // power | polynomial | perturbed_quintic | zero
  double coeff = 1.0;
  int exponent = 5;
  std::vector<double> coeffs;  // polynomial: coeffs[k] multiplies u^k
  double C = 120.0;
  double z0 = 0.5;
  Nonlinearity build() const;
};

struct GridSpec {
  double r_max = 20.0;
  int n = 4096;
};

struct SolverSpec {
  double cfl_ratio = 1.0;
  double end_time = 10.0;
  int store_stride = 1;
};

// Radial Cauchy data phi = amplitude g, psi = velocity_amplitude g, g = exp(-((r - center) / width)^2).
struct DataSpec {
  double amplitude = 0.5;
  double velocity_amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;
  RadialCauchyData build(const RadialGrid& g) const;
};

// Radial radiation field on s = s0 + j ds.
//   dipole: a d/ds exp(-4 (s - c)^2)        second_derivative: a d2/ds2 exp(-4 (s - c)^2)
//   zero | table (values) | file (CSV written by the field writers)
struct FieldSpec {
  std::string kind = "dipole";
  double amplitude = 1.0;
  double center = 0.0;
  double s0 = -3.0;
  double s1 = 3.0;
  double ds = 0.01;
  std::vector<double> values;
  std::string path;
  RadiationFieldData build() const;
};

struct ValidateSpec {
  double u_max = 10.0;
  int n_points = 10000;
};

struct ExpandSpec {
  FieldSpec Y0;
  std::array<FieldSpec, 4> Y;
  std::vector<double> eps{0.2, 0.1, 0.05};
  double h = 0.02;
  double s_half_width = 4.2;
  ExpandSpec();
};

struct ConeSpec {
  std::string type = "triple";  // triple | quadruple
  double a = 1.0, b = 1.0, c = 1.0;
  double s_star = 0.0;
  double m = 2.0;
  double half_width = 1.0;
  int n_theta = 64;
  ConeConfig build() const;
};

struct RecoverSpec {
  std::string mode = "reconstruct";  // reconstruct | triple | quadruple | scaling
  double u_lo = -1.0, u_hi = 1.0;
  int n_points = 10001;
  std::vector<double> g3;  // empty: sampled from the configured nonlinearity
  int n = 160;
  double background_amplitude = 1.0;
  std::vector<double> kappa{0.5, 1.0, 2.0};
};

struct RunConfig {
  int schema = kConfigSchema;
  std::string kind = "validate";  // validate | solve | radiate | scatter | expand | geometry | recover
  NonlinearitySpec nonlinearity;
  GridSpec grid;
  SolverSpec solver;
  DataSpec data;
  FieldSpec field;
  ValidateSpec validate;
  ExpandSpec expand;
  ConeSpec cones;
  RecoverSpec recover;
  std::string out;
  std::uint64_t seed = 0;

  // Range and file checks; throws ConfigurationError.
  void check() const;
};

const std::vector<std::string>& experiment_kinds();

// JSON text <-> config. Unknown keys, a missing or wrong schema and bad ranges raise ConfigurationError.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

}  // namespace nlscatter
