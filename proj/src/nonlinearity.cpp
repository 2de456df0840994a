#include "nlscatter/nonlinearity.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlscatter/errors.hpp"

namespace nlscatter {

class NonlinearityFamily {
 public:
  virtual ~NonlinearityFamily() = default;
  virtual double derivative(double u, int order) const = 0;
  virtual double antiderivative(double u) const {
    if (u == 0.0) return 0.0;
    auto f = [this](double s) { return derivative(s, 0); };
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, u, 15, 1e-10,
                                                                         &err);
  }
  virtual double growth_constant() const { return 0.0; }
  virtual bool is_zero() const { return false; }
  std::string label;
};

namespace {

double falling_factorial(int p, int j) {
  double r = 1.0;
  for (int k = 0; k < j; ++k) r *= static_cast<double>(p - k);
  return r;
}

class PolynomialFamily final : public NonlinearityFamily {
 public:
  explicit PolynomialFamily(std::vector<double> c) : coeffs_(std::move(c)) {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
  }
  double derivative(double u, int order) const override {
    double acc = 0.0;
    for (int k = static_cast<int>(coeffs_.size()) - 1; k >= order; --k)
      acc = acc * u + coeffs_[k] * falling_factorial(k, order);
    return acc;
  }
  double antiderivative(double u) const override {
    double acc = 0.0;
    for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k)
      acc = acc * u + coeffs_[k] / (k + 1);
    return acc * u;
  }
  double growth_constant() const override {
    for (std::size_t k = 0; k < coeffs_.size(); ++k)
      if (k != 5 && coeffs_[k] != 0.0) return 0.0;
    if (coeffs_.size() < 6 || coeffs_[5] <= 0.0) return 0.0;
    return std::max(coeffs_[5], 1.0 / coeffs_[5]);
  }
  bool is_zero() const override { return coeffs_.empty(); }

 private:
  std::vector<double> coeffs_;
};

class PowerFamily final : public NonlinearityFamily {
 public:
  PowerFamily(double c, int p) : c_(c), p_(p) {}
  double derivative(double u, int order) const override {
    if (order > p_) return 0.0;
    return c_ * falling_factorial(p_, order) * std::pow(u, p_ - order);
  }
  double antiderivative(double u) const override {
    return c_ * std::pow(u, p_ + 1) / (p_ + 1);
  }
  double growth_constant() const override {
    if (p_ != 5 || c_ <= 0.0) return 0.0;
    return std::max(c_, 1.0 / c_);
  }
  bool is_zero() const override { return c_ == 0.0; }

 private:
  double c_;
  int p_;
};

// f'''' = C (u + z0 u^3/(1+u^2)); lower orders by the Cauchy repeated-integral formula.
class PerturbedQuinticFamily final : public NonlinearityFamily {
 public:
  PerturbedQuinticFamily(double C, double z0) : C_(C), z0_(z0) {}

  double f4(double s) const { return C_ * (s + z0_ * s * s * s / (1.0 + s * s)); }
  double f5(double s) const {
    const double s2 = s * s;
    return C_ * (1.0 + z0_ * (s2 * s2 + 3.0 * s2) / ((1.0 + s2) * (1.0 + s2)));
  }

  // int_0^u (u-s)^(k-1)/(k-1)! f''''(s) ds
  double repeated(double u, int k) const {
    if (u == 0.0) return 0.0;
    double fact = 1.0;
    for (int i = 2; i < k; ++i) fact *= i;
    auto integrand = [&](double s) { return std::pow(u - s, k - 1) / fact * f4(s); };
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(u) / 0.5)));
    const double w = u / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p)
      acc += boost::math::quadrature::gauss<double, 20>::integrate(integrand, p * w, (p + 1) * w);
    return acc;
  }

  double derivative(double u, int order) const override {
    switch (order) {
      case 5: return f5(u);
      case 4: return f4(u);
      default: return repeated(u, 4 - order);
    }
  }
  double antiderivative(double u) const override { return repeated(u, 5); }
  double growth_constant() const override {
    const double a = C_ / 120.0, b = C_ * (1.0 + z0_) / 120.0;
    return std::max({a, b, 1.0 / a, 1.0 / b});
  }

 private:
  double C_, z0_;
};

// Piecewise cubic Hermite tables: order j uses (table j, table j+1) for j <= 2.
class TabulatedFamily final : public NonlinearityFamily {
 public:
  TabulatedFamily(double u_max, std::vector<std::vector<double>> tables)
      : u_max_(u_max), t_(std::move(tables)) {
    n_ = static_cast<int>(t_[0].size());
    du_ = 2.0 * u_max_ / (n_ - 1);
    // f'''' table by central differences of f'''
    std::vector<double> d4(n_);
    for (int k = 0; k < n_; ++k) {
      if (k == 0) d4[k] = (t_[3][1] - t_[3][0]) / du_;
      else if (k == n_ - 1) d4[k] = (t_[3][k] - t_[3][k - 1]) / du_;
      else d4[k] = (t_[3][k + 1] - t_[3][k - 1]) / (2.0 * du_);
    }
    t_.push_back(std::move(d4));
    cum_.assign(n_, 0.0);
    for (int k = 1; k < n_; ++k)
      cum_[k] = cum_[k - 1] + du_ * 0.5 * (t_[0][k - 1] + t_[0][k]) +
                du_ * du_ * (t_[1][k - 1] - t_[1][k]) / 12.0;
    zero_index_ = (n_ - 1) / 2;
  }

  double derivative(double u, int order) const override {
    locate(u);
    const auto [k, x] = cell(u);
    const double h = du_;
    if (order <= 3) return hermite(t_[order], t_[order + 1], k, x, h, 0);
    // orders 4 and 5 differentiate the f''' interpolant
    return hermite(t_[3], t_[4], k, x, h, order - 3);
  }

  double antiderivative(double u) const override {
    locate(u);
    const auto [k, x] = cell(u);
    const double h = du_;
    // exact integral of the Hermite cubic over [0, x]
    const double t = x / h;
    const double y0 = t_[0][k], y1 = t_[0][k + 1], m0 = t_[1][k] * h, m1 = t_[1][k + 1] * h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    const double i00 = t4 / 2 - t3 + t, i10 = t4 / 4 - 2 * t3 / 3 + t2 / 2;
    const double i01 = -t4 / 2 + t3, i11 = t4 / 4 - t3 / 3;
    const double part = h * (y0 * i00 + m0 * i10 + y1 * i01 + m1 * i11);
    return cum_[k] + part - cum_[zero_index_];
  }

 private:
  void locate(double u) const {
    if (std::abs(u) > u_max_ * (1.0 + 1e-12))
      throw DomainError("tabulated nonlinearity evaluated outside its table");
  }
  std::pair<int, double> cell(double u) const {
    const double pos = (u + u_max_) / du_;
    int k = std::clamp(static_cast<int>(std::floor(pos)), 0, n_ - 2);
    return {k, (pos - k) * du_};
  }
  static double hermite(const std::vector<double>& y, const std::vector<double>& m, int k,
                        double x, double h, int deriv) {
    const double t = x / h;
    const double y0 = y[k], y1 = y[k + 1], m0 = m[k] * h, m1 = m[k + 1] * h;
    const double a = 2 * y0 - 2 * y1 + m0 + m1;
    const double b = -3 * y0 + 3 * y1 - 2 * m0 - m1;
    const double c = m0, d = y0;
    switch (deriv) {
      case 0: return ((a * t + b) * t + c) * t + d;
      case 1: return ((3 * a * t + 2 * b) * t + c) / h;
      default: return (6 * a * t + 2 * b) / (h * h);
    }
  }

  double u_max_;
  std::vector<std::vector<double>> t_;
  std::vector<double> cum_;
  int n_ = 0;
  int zero_index_ = 0;
  double du_ = 0.0;
};

}  // namespace

Nonlinearity::Nonlinearity(std::shared_ptr<const NonlinearityFamily> impl)
    : impl_(std::move(impl)) {}

Nonlinearity Nonlinearity::power(double coeff, int exponent) {
  NLS_REQUIRE(exponent >= 1, ArgumentError, "power nonlinearity needs exponent >= 1");
  auto fam = std::make_shared<PowerFamily>(coeff, exponent);
  std::ostringstream os;
  os << coeff << "*u^" << exponent;
  fam->label = os.str();
  return Nonlinearity(fam);
}

Nonlinearity Nonlinearity::polynomial(std::vector<double> coeffs, std::string label) {
  auto fam = std::make_shared<PolynomialFamily>(coeffs);
  if (label.empty()) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      if (coeffs[k] == 0.0) continue;
      os << (first ? "" : "+") << coeffs[k] << "*u^" << k;
      first = false;
    }
    label = first ? "0" : os.str();
  }
  fam->label = std::move(label);
  return Nonlinearity(fam);
}

Nonlinearity Nonlinearity::perturbed_quintic(double C, double z0) {
  NLS_REQUIRE(C > 0.0, ArgumentError, "perturbed quintic needs C > 0");
  NLS_REQUIRE(std::abs(z0) < 1.0, ArgumentError, "perturbed quintic needs |z0| < 1");
  auto fam = std::make_shared<PerturbedQuinticFamily>(C, z0);
  std::ostringstream os;
  os << "perturbed_quintic(C=" << C << ",z0=" << z0 << ")";
  fam->label = os.str();
  return Nonlinearity(fam);
}

Nonlinearity Nonlinearity::tabulated(double u_max, std::vector<double> f0, std::vector<double> f1,
                                     std::vector<double> f2, std::vector<double> f3,
                                     std::string label) {
  const std::size_t n = f0.size();
  NLS_REQUIRE(n >= 3 && n % 2 == 1, ArgumentError, "tabulated nonlinearity needs an odd table size >= 3");
  NLS_REQUIRE(f1.size() == n && f2.size() == n && f3.size() == n, ArgumentError,
              "tabulated nonlinearity tables differ in size");
  NLS_REQUIRE(u_max > 0.0, ArgumentError, "tabulated nonlinearity needs u_max > 0");
  auto fam = std::make_shared<TabulatedFamily>(
      u_max, std::vector<std::vector<double>>{std::move(f0), std::move(f1), std::move(f2),
                                              std::move(f3)});
  fam->label = std::move(label);
  return Nonlinearity(fam);
}

Nonlinearity Nonlinearity::zero() { return polynomial({}, "0"); }

double Nonlinearity::eval(double u, int order) const {
  NLS_REQUIRE(order >= 0 && order <= 5, ArgumentError, "derivative order must be in 0..5");
  return impl_->derivative(u, order);
}

double Nonlinearity::antiderivative(double u) const { return impl_->antiderivative(u); }
const std::string& Nonlinearity::label() const { return impl_->label; }
double Nonlinearity::growth_constant() const { return impl_->growth_constant(); }
bool Nonlinearity::is_zero() const { return impl_->is_zero(); }

//==============================================================================
// Hypothesis validators
//==============================================================================

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const HypothesisCheck& ValidationReport::get(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw ArgumentError("no hypothesis check named " + name);
}

std::vector<double> symmetric_grid(double u_max, int n_points) {
  NLS_REQUIRE(n_points >= 3, ArgumentError, "grid needs at least 3 points");
  if (n_points % 2 == 0) ++n_points;
  std::vector<double> g(n_points);
  const int half = n_points / 2;
  for (int k = 0; k < n_points; ++k) g[k] = u_max * (k - half) / half;
  g[half] = 0.0;
  return g;
}

namespace {

constexpr std::size_t kMaxWitnesses = 32;

void add_witness(HypothesisCheck& c, double u) {
  if (c.witnesses.size() < kMaxWitnesses) c.witnesses.push_back(u);
}

}  // namespace

ValidationReport validate_hypotheses(const Nonlinearity& nl, const std::vector<double>& grid_in,
                                     const ValidationBounds& b) {
  NLS_REQUIRE(!grid_in.empty(), ArgumentError, "sample grid is empty");
  std::vector<double> grid = grid_in;
  std::sort(grid.begin(), grid.end());
  NLS_REQUIRE(std::find(grid.begin(), grid.end(), 0.0) != grid.end(), ArgumentError,
              "sample grid must contain 0");

  const std::size_t n = grid.size();
  std::vector<std::array<double, 6>> d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j <= 5; ++j) d[i][j] = nl.eval(grid[i], j);

  ValidationReport rep;

  // H1: oddness and two-sided quintic bound
  HypothesisCheck h1;
  h1.name = "H1";
  bool odd = true;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  std::vector<double> ratios;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = grid[i];
    const double fm = nl.eval(-u, 0), fp = d[i][0];
    const double scale = std::abs(fm) + std::abs(fp);
    if (std::abs(fp + fm) > b.oddness_tol * std::max(scale, 1e-300) && scale > 0.0) {
      odd = false;
      add_witness(h1, u);
    }
    if (u != 0.0) {
      const double r = std::abs(fp) / std::pow(std::abs(u), 5);
      ratios.push_back(r);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
    }
  }
  const double spread = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
  rep.empirical_C = rmin > 0.0 ? std::max(rmax, 1.0 / rmin) : std::numeric_limits<double>::infinity();
  h1.metric = rep.empirical_C;
  h1.passed = odd && std::isfinite(spread) && spread <= b.ratio_spread_max;
  {
    std::ostringstream os;
    os << "odd=" << odd << " ratio_min=" << rmin << " ratio_max=" << rmax;
    h1.detail = os.str();
  }
  if (!h1.passed && odd) {
    // witness: the sample realizing the extreme ratio
    for (std::size_t i = 0; i < n; ++i)
      if (grid[i] != 0.0) {
        const double r = std::abs(d[i][0]) / std::pow(std::abs(grid[i]), 5);
        if (r == rmax || r == rmin) add_witness(h1, grid[i]);
      }
  }
  rep.checks.push_back(h1);

  // H2: bounded u f'/f ratio at the extreme nonzero samples
  HypothesisCheck h2;
  h2.name = "H2";
  {
    double worst = 0.0;
    bool ok = true;
    std::vector<std::size_t> idx;
    std::size_t i_small = n, i_large = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (grid[i] == 0.0) continue;
      if (i_small == n || std::abs(grid[i]) < std::abs(grid[i_small])) i_small = i;
      if (i_large == n || std::abs(grid[i]) > std::abs(grid[i_large])) i_large = i;
    }
    for (std::size_t i : {i_small, i_large}) {
      if (i == n) continue;
      const double f = d[i][0];
      const double r = f != 0.0 ? grid[i] * d[i][1] / f : std::numeric_limits<double>::infinity();
      const double dev = std::isfinite(r) && r > 0.0 ? std::max(r, 1.0 / r)
                                                     : std::numeric_limits<double>::infinity();
      worst = std::max(worst, dev);
      if (!(dev <= b.h2_ratio_max)) {
        ok = false;
        add_witness(h2, grid[i]);
      }
    }
    h2.metric = worst;
    h2.passed = ok;
  }
  rep.checks.push_back(h2);

  // H3: F(0) = 0 and convexity of F through second divided differences
  HypothesisCheck h3;
  h3.name = "H3";
  {
    std::vector<double> F(n);
    for (std::size_t i = 0; i < n; ++i) F[i] = nl.antiderivative(grid[i]);
    const bool f0 = std::abs(nl.antiderivative(0.0)) <= b.zero_tol;
    double deficit = 0.0, scale = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = grid[i] - grid[i - 1], h1v = grid[i + 1] - grid[i];
      const double dd =
          2.0 * ((F[i + 1] - F[i]) / h1v - (F[i] - F[i - 1]) / h0) / (h0 + h1v);
      scale = std::max(scale, std::abs(dd));
      if (dd < 0.0) {
        if (-dd > deficit) deficit = -dd;
      }
    }
    const double rel = scale > 0.0 ? deficit / scale : 0.0;
    if (rel > 1e-10)
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = grid[i] - grid[i - 1], h1v = grid[i + 1] - grid[i];
        const double dd = 2.0 * ((F[i + 1] - F[i]) / h1v - (F[i] - F[i - 1]) / h0) / (h0 + h1v);
        if (dd < -1e-10 * scale) add_witness(h3, grid[i]);
      }
    rep.convexity_deficit = rel;
    h3.metric = rel;
    h3.passed = f0 && rel <= 1e-10;
    if (!f0) add_witness(h3, 0.0);
  }
  rep.checks.push_back(h3);

  // H4: derivatives vanish at 0 through order 4, |f^(j)| <= C_j |u|^(5-j)
  HypothesisCheck h4;
  h4.name = "H4";
  {
    std::vector<double> sorted = ratios;
    double ref = 1.0;
    if (!sorted.empty()) {
      std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
      ref = sorted[sorted.size() / 2];
    }
    bool ok = ref > 0.0;
    double worst = 0.0;
    for (int j = 0; j <= 4; ++j) {
      const double at0 = nl.eval(0.0, j);
      if (std::abs(at0) > b.zero_tol) {
        ok = false;
        add_witness(h4, 0.0);
      }
      double cj = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (grid[i] != 0.0) cj = std::max(cj, std::abs(d[i][j]) / std::pow(std::abs(grid[i]), 5 - j));
      const double scaled = ref > 0.0 ? cj / ref : std::numeric_limits<double>::infinity();
      worst = std::max(worst, scaled);
      if (!(scaled <= b.h4_scaled_max)) ok = false;
    }
    h4.metric = worst;
    h4.passed = ok;
  }
  rep.checks.push_back(h4);

  // B1: f''''(u) = 0 exactly at u = 0
  HypothesisCheck b1;
  b1.name = "B1";
  {
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(d[i][4]));
    const double tol = b.zero_tol * std::max(scale, 1.0);
    bool ok = scale > 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = grid[i];
      const bool vanishes = std::abs(d[i][4]) <= tol;
      if ((u == 0.0) != vanishes) {
        ok = false;
        add_witness(b1, u);
      }
      if (i + 1 < n && grid[i] != 0.0 && grid[i + 1] != 0.0 && (grid[i] > 0) == (grid[i + 1] > 0) &&
          d[i][4] * d[i + 1][4] < 0.0) {
        ok = false;
        add_witness(b1, 0.5 * (grid[i] + grid[i + 1]));
      }
    }
    b1.metric = static_cast<double>(b1.witnesses.size());
    b1.passed = ok;
  }
  rep.checks.push_back(b1);
  return rep;
}

}  // namespace nlscatter
