#include "nlscatter/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nlscatter/errors.hpp"

namespace nlscatter {

static_assert(std::endian::native == std::endian::little, "binary layout assumes little-endian host");

void write_binary(const std::string& path, const std::vector<double>& values) {
  std::ofstream os(path, std::ios::binary);
  NLS_REQUIRE(os.good(), ArgumentError, "cannot open " + path);
  const std::uint64_t n = values.size();
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
}

std::vector<double> read_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  NLS_REQUIRE(is.good(), ArgumentError, "cannot open " + path);
  std::uint64_t n = 0;
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  std::vector<double> v(n);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  NLS_REQUIRE(is.good(), ArgumentError, "truncated binary field " + path);
  return v;
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream os(path);
  NLS_REQUIRE(os.good(), ArgumentError, "cannot open " + path);
  os << std::setprecision(17);
  return os;
}

}  // namespace

void write_csv(const std::string& path, const RadialGrid& g, const std::vector<double>& values) {
  NLS_REQUIRE(static_cast<int>(values.size()) == g.size(), ArgumentError, "field/grid mismatch");
  auto os = open_csv(path);
  os << "r,value\n";
  for (int i = 0; i < g.size(); ++i) os << g.r(i) << ',' << values[i] << '\n';
}

void write_csv(const std::string& path, const Grid3D& g, const std::vector<double>& values) {
  NLS_REQUIRE(values.size() == g.size(), ArgumentError, "field/grid mismatch");
  auto os = open_csv(path);
  os << "x,y,z,value\n";
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k)
        os << g.x(i) << ',' << g.x(j) << ',' << g.x(k) << ',' << values[g.index(i, j, k)] << '\n';
}

void write_csv(const std::string& path, const RadiationFieldData& f) {
  auto os = open_csv(path);
  if (f.is_radial()) {
    os << "s,value\n";
    for (int j = 0; j < f.n_s; ++j) os << f.s(j) << ',' << f.at(j) << '\n';
    return;
  }
  os << "s,omega1,omega2,omega3,value\n";
  for (int j = 0; j < f.n_s; ++j)
    for (int k = 0; k < f.n_omega(); ++k) {
      const auto& w = f.omegas[k];
      os << f.s(j) << ',' << w[0] << ',' << w[1] << ',' << w[2] << ',' << f.at(j, k) << '\n';
    }
}

RadiationFieldData read_radiation_csv(const std::string& path) {
  std::ifstream is(path);
  NLS_REQUIRE(is.good(), ArgumentError, "cannot open " + path);
  std::string line;
  std::getline(is, line);
  NLS_REQUIRE(line.rfind("s,value", 0) == 0, ArgumentError,
              "only radial radiation CSV (s,value) can be read: " + path);
  std::vector<double> s, v;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double a = 0, b = 0;
    char comma = 0;
    ls >> a >> comma >> b;
    NLS_REQUIRE(!ls.fail(), ArgumentError, "malformed row in " + path);
    s.push_back(a);
    v.push_back(b);
  }
  NLS_REQUIRE(s.size() >= 2, ArgumentError, "radiation CSV needs at least two rows");
  const double ds = s[1] - s[0];
  for (std::size_t j = 1; j < s.size(); ++j)
    NLS_REQUIRE(std::abs(s[j] - s[0] - j * ds) <= 1e-9 * (1.0 + std::abs(s[j])), ArgumentError,
                "radiation CSV s-grid is not uniform");
  auto out = RadiationFieldData::radial(s[0], ds, static_cast<int>(s.size()));
  out.values = v;
  return out;
}

}  // namespace nlscatter
