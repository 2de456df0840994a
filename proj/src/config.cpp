#include "nlscatter/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nlscatter/errors.hpp"
#include "nlscatter/field_io.hpp"

namespace nlscatter {

using nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(NonlinearitySpec, name, coeff, exponent, coeffs, C, z0)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(GridSpec, r_max, n)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SolverSpec, cfl_ratio, end_time, store_stride)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DataSpec, amplitude, velocity_amplitude, center, width)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FieldSpec, kind, amplitude, center, s0, s1, ds, values, path)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ValidateSpec, u_max, n_points)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ExpandSpec, Y0, Y, eps, h, s_half_width)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ConeSpec, type, a, b, c, s_star, m, half_width, n_theta)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RecoverSpec, mode, u_lo, u_hi, n_points, g3, n,
                                                background_amplitude, kappa)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, schema, kind, nonlinearity, grid, solver, data, field,
                                                validate, expand, cones, recover, out, seed)

namespace {

FieldSpec shape(const std::string& kind, double a, double c) {
  FieldSpec f;
  f.kind = kind;
  f.amplitude = a;
  f.center = c;
  f.s0 = -4.0;
  f.s1 = 4.0;
  f.ds = 0.02;
  return f;
}

// Every key of `in` must exist in the default-valued reference.
void check_keys(const json& in, const json& ref, const std::string& where) {
  if (in.is_object() && ref.is_object()) {
    for (const auto& [k, v] : in.items()) {
      NLS_REQUIRE(ref.contains(k), ConfigurationError, "unknown config key '" + where + k + "'");
      check_keys(v, ref.at(k), where + k + ".");
    }
  } else if (in.is_array() && ref.is_array() && !ref.empty()) {
    for (const auto& v : in) check_keys(v, ref.front(), where);
  }
}

bool one_of(const std::string& v, std::initializer_list<const char*> opts) {
  return std::any_of(opts.begin(), opts.end(), [&](const char* o) { return v == o; });
}

void check_field(const FieldSpec& f, const std::string& where) {
  NLS_REQUIRE(one_of(f.kind, {"dipole", "second_derivative", "zero", "table", "file"}), ConfigurationError,
              where + ".kind must be dipole, second_derivative, zero, table or file");
  NLS_REQUIRE(std::isfinite(f.amplitude) && std::isfinite(f.center), ConfigurationError,
              where + " amplitude and center must be finite");
  NLS_REQUIRE(f.ds > 0.0 && f.ds <= 1.0, ConfigurationError, where + ".ds must lie in (0, 1]");
  if (f.kind == "file") {
    NLS_REQUIRE(std::filesystem::exists(f.path), ConfigurationError, where + ".path does not exist: " + f.path);
  } else if (f.kind == "table") {
    NLS_REQUIRE(f.values.size() >= 2, ConfigurationError, where + ".values needs at least two samples");
  } else {
    NLS_REQUIRE(f.s1 > f.s0 && (f.s1 - f.s0) / f.ds <= 1e7, ConfigurationError,
                where + " needs s0 < s1 and at most 1e7 samples");
  }
}

}  // namespace

ExpandSpec::ExpandSpec()
    : Y0(shape("dipole", 0.3, 0.0)),
      Y{shape("dipole", 0.5, -1.0), shape("second_derivative", 0.05, 0.5), shape("dipole", 0.4, 1.0),
        shape("second_derivative", 0.04, -0.5)} {}

Nonlinearity NonlinearitySpec::build() const {
  if (name == "power") return Nonlinearity::power(coeff, exponent);
  if (name == "polynomial") return Nonlinearity::polynomial(coeffs);
  if (name == "perturbed_quintic") return Nonlinearity::perturbed_quintic(C, z0);
  if (name == "zero") return Nonlinearity::zero();
  throw ConfigurationError("unknown nonlinearity '" + name + "'");
}

RadialCauchyData DataSpec::build(const RadialGrid& g) const {
  return RadialCauchyData::from_functions(
      g, [&](double r) { return amplitude * std::exp(-std::pow((r - center) / width, 2)); },
      [&](double r) { return velocity_amplitude * std::exp(-std::pow((r - center) / width, 2)); });
}

RadiationFieldData FieldSpec::build() const {
  if (kind == "file") return read_radiation_csv(path);
  if (kind == "table") {
    auto f = RadiationFieldData::radial(s0, ds, static_cast<int>(values.size()));
    f.values = values;
    return f;
  }
  const int n = static_cast<int>(std::lround((s1 - s0) / ds)) + 1;
  auto f = RadiationFieldData::radial(s0, ds, n);
  for (int j = 0; j < n; ++j) {
    const double x = f.s(j) - center, g = std::exp(-4.0 * x * x);
    if (kind == "dipole") f.at(j) = -8.0 * amplitude * x * g;
    else if (kind == "second_derivative") f.at(j) = amplitude * (64.0 * x * x - 8.0) * g;
    else f.at(j) = 0.0;
  }
  return f;
}

ConeConfig ConeSpec::build() const {
  ConeConfig c = type == "quadruple" ? ConeConfig::quadruple(a, b, this->c, s_star) : ConeConfig::triple(a, b, s_star);
  c.m = m;
  c.half_width = half_width;
  c.validate();
  return c;
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"validate", "solve", "radiate", "scatter",
                                              "expand", "geometry", "recover"};
  return kinds;
}

void RunConfig::check() const {
  NLS_REQUIRE(schema == kConfigSchema, ConfigurationError, "unsupported config schema " + std::to_string(schema));
  const auto& kinds = experiment_kinds();
  NLS_REQUIRE(std::find(kinds.begin(), kinds.end(), kind) != kinds.end(), ConfigurationError,
              "unknown experiment kind '" + kind + "'");
  const auto& nl = nonlinearity;
  NLS_REQUIRE(one_of(nl.name, {"power", "polynomial", "perturbed_quintic", "zero"}), ConfigurationError,
              "unknown nonlinearity '" + nl.name + "'");
  NLS_REQUIRE(nl.exponent >= 1 && nl.exponent <= 15, ConfigurationError, "exponent must lie in 1..15");
  NLS_REQUIRE(nl.coeffs.size() <= 16, ConfigurationError, "at most 16 polynomial coefficients");
  NLS_REQUIRE(nl.C > 0.0 && nl.z0 > 0.0, ConfigurationError, "perturbed_quintic needs C > 0 and z0 > 0");
  NLS_REQUIRE(grid.r_max > 0.0 && grid.n >= 16 && grid.n <= (1 << 22), ConfigurationError,
              "grid needs r_max > 0 and 16 <= n <= 2^22");
  NLS_REQUIRE(solver.cfl_ratio > 0.0 && solver.cfl_ratio <= 1.0, ConfigurationError, "cfl_ratio must lie in (0, 1]");
  NLS_REQUIRE(solver.end_time > 0.0 && solver.end_time <= 1e4, ConfigurationError, "end_time must lie in (0, 1e4]");
  NLS_REQUIRE(solver.store_stride >= 1, ConfigurationError, "store_stride must be positive");
  NLS_REQUIRE(data.width > 0.0 && data.center >= 0.0, ConfigurationError, "data needs width > 0 and center >= 0");
  NLS_REQUIRE(validate.u_max > 0.0 && validate.n_points >= 3 && validate.n_points <= 10000000, ConfigurationError,
              "validate needs u_max > 0 and 3 <= n_points <= 1e7");
  if (kind == "scatter" || kind == "radiate") check_field(field, "field");
  if (kind == "expand") {
    check_field(expand.Y0, "expand.Y0");
    for (int j = 0; j < 4; ++j) check_field(expand.Y[j], "expand.Y[" + std::to_string(j) + "]");
    NLS_REQUIRE(!expand.eps.empty(), ConfigurationError, "expand.eps must not be empty");
    for (double e : expand.eps) NLS_REQUIRE(e > 0.0 && e <= 1.0, ConfigurationError, "expand.eps entries must lie in (0, 1]");
    NLS_REQUIRE(expand.h > 0.0 && expand.s_half_width > 0.0, ConfigurationError, "expand needs h > 0 and s_half_width > 0");
  }
  NLS_REQUIRE(one_of(cones.type, {"triple", "quadruple"}), ConfigurationError, "cones.type must be triple or quadruple");
  NLS_REQUIRE(cones.m > 0.0 && cones.half_width > 0.0 && cones.n_theta >= 4, ConfigurationError,
              "cones need m > 0, half_width > 0 and n_theta >= 4");
  const auto& r = recover;
  NLS_REQUIRE(one_of(r.mode, {"reconstruct", "triple", "quadruple", "scaling"}), ConfigurationError,
              "recover.mode must be reconstruct, triple, quadruple or scaling");
  NLS_REQUIRE(r.u_lo < 0.0 && r.u_hi > 0.0 && r.n_points >= 5, ConfigurationError,
              "recover needs u_lo < 0 < u_hi and n_points >= 5");
  NLS_REQUIRE(r.g3.empty() || r.g3.size() >= 5, ConfigurationError, "recover.g3 needs at least five samples");
  NLS_REQUIRE(r.n >= 16 && r.n <= 512, ConfigurationError, "recover.n must lie in 16..512");
  NLS_REQUIRE(r.kappa.size() >= 2, ConfigurationError, "recover.kappa needs at least two values");
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
  }
  NLS_REQUIRE(j.is_object(), ConfigurationError, "config must be a JSON object");
  NLS_REQUIRE(j.contains("schema"), ConfigurationError, "config lacks the schema field");
  check_keys(j, json(RunConfig{}), "");
  RunConfig cfg;
  try {
    cfg = j.get<RunConfig>();
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("config has a mistyped value: ") + e.what());
  }
  cfg.check();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  NLS_REQUIRE(is.good(), ConfigurationError, "cannot open config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) { return json(cfg).dump(2); }

}  // namespace nlscatter
