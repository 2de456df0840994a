#include "nlscatter/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "json.hpp"
#include "nlscatter/errors.hpp"
#include "nlscatter/expansion.hpp"
#include "nlscatter/field_io.hpp"
#include "nlscatter/norms.hpp"
#include "nlscatter/radial_solver.hpp"
#include "nlscatter/radiation.hpp"
#include "nlscatter/recovery.hpp"
#include "nlscatter/scattering.hpp"

namespace nlscatter {

using nlohmann::json;
namespace fs = std::filesystem;

std::string version_string() { return "0.1.0"; }

namespace {

class Run {
 public:
  Run(const RunConfig& cfg, fs::path dir, int threads) : cfg_(cfg), dir_(std::move(dir)), threads_(threads) {}

  void norm(const std::string& name, double v) { norms_[name] = v; }
  std::string file(const std::string& name) {
    outputs_.push_back(name);
    return (dir_ / name).string();
  }
  template <class F>
  auto timed(const std::string& step, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    auto r = fn();
    runtimes_[step] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }
  void write_manifest(const std::string& status, int code, const std::string& message) const {
    json m;
    m["tool"] = "nlscatter";
    m["version"] = version_string();
    m["schema"] = kConfigSchema;
    m["config"] = json::parse(dump_config(cfg_));
    m["threads"] = threads_;
    m["status"] = status;
    m["exit_code"] = code;
    m["message"] = message;
    m["runtimes"] = runtimes_;
    json n = json::object();
    for (const auto& [k, v] : norms_) n[k] = std::isfinite(v) ? json(v) : json(std::to_string(v));
    m["norms"] = n;
    m["outputs"] = outputs_;
    std::ofstream os(dir_ / "manifest.json");
    os << m.dump(2) << '\n';
  }

 private:
  const RunConfig& cfg_;
  fs::path dir_;
  int threads_;
  std::map<std::string, double> norms_;
  std::map<std::string, double> runtimes_;
  std::vector<std::string> outputs_;
};

std::ofstream open_csv(const std::string& path) {
  std::ofstream os(path);
  NLS_REQUIRE(os.good(), PreconditionError, "cannot write " + path);
  os.precision(17);
  return os;
}

void run_validate(const RunConfig& c, Run& run, std::ostream& log) {
  const auto nl = c.nonlinearity.build();
  const auto rep = run.timed("validate", [&] {
    return validate_hypotheses(nl, symmetric_grid(c.validate.u_max, c.validate.n_points));
  });
  auto os = open_csv(run.file("validation.csv"));
  os << "check,passed,metric,detail\n";
  for (const auto& ch : rep.checks) {
    os << ch.name << ',' << (ch.passed ? 1 : 0) << ',' << ch.metric << ",\"" << ch.detail << "\"\n";
    run.norm(ch.name + ".metric", ch.metric);
    run.norm(ch.name + ".passed", ch.passed ? 1.0 : 0.0);
    log << ch.name << (ch.passed ? " pass " : " FAIL ") << ch.metric << '\n';
  }
  run.norm("all_passed", rep.all_passed() ? 1.0 : 0.0);
  run.norm("empirical_C", rep.empirical_C);
  run.norm("convexity_deficit", rep.convexity_deficit);
}

void run_solve(const RunConfig& c, Run& run, std::ostream& log) {
  const auto nl = c.nonlinearity.build();
  const RadialGrid g(c.grid.r_max, c.grid.n);
  const auto d = c.data.build(g);
  SolverConfig sc;
  sc.cfl_ratio = c.solver.cfl_ratio;
  sc.end_time = c.solver.end_time;
  sc.store_stride = c.solver.store_stride;
  const auto tr = run.timed("solve", [&] { return solve_semilinear_radial(nl, d, sc); });
  auto os = open_csv(run.file("energy.csv"));
  os << "t,energy\n";
  const double e0 = energy_semilinear(tr.snapshot(0), nl);
  double drift = 0.0;
  for (std::size_t n = 0; n < tr.size(); ++n) {
    const double e = energy_semilinear(tr.snapshot(n), nl);
    os << tr.times[n] << ',' << e << '\n';
    drift = std::max(drift, std::abs(e - e0));
  }
  write_csv(run.file("u_final.csv"), g, tr.u.back());
  write_binary(run.file("u_final.bin"), tr.u.back());
  run.norm("energy_initial", e0);
  run.norm("energy_relative_drift", e0 > 0.0 ? drift / e0 : drift);
  run.norm("l5l10", norm_lplq(tr, 5.0, 10.0).value);
  run.norm("steps", static_cast<double>(tr.size()));
  log << "energy " << e0 << " relative drift " << (e0 > 0.0 ? drift / e0 : drift) << '\n';
}

void run_radiate(const RunConfig& c, Run& run, std::ostream& log) {
  const auto nl = c.nonlinearity.build();
  const RadialGrid g(c.grid.r_max, c.grid.n);
  const auto d = c.data.build(g);
  SemilinearRadiationOptions o;
  o.T = c.solver.end_time;
  const auto back = run.timed("backward", [&] { return radiation_semilinear(nl, d, Direction::Minus, o); });
  const auto fwd = run.timed("forward", [&] { return radiation_semilinear(nl, d, Direction::Plus, o); });
  write_csv(run.file("backward.csv"), back);
  write_csv(run.file("forward.csv"), fwd);
  const double e = energy_semilinear(d, nl);
  const double nb = back.l2_norm(), nf = fwd.l2_norm();
  run.norm("energy", e);
  run.norm("backward_l2", nb);
  run.norm("forward_l2", nf);
  run.norm("backward_isometry_error", e > 0.0 ? std::abs(nb * nb - e) / e : nb * nb);
  run.norm("forward_isometry_error", e > 0.0 ? std::abs(nf * nf - e) / e : nf * nf);
  log << "energy " << e << " |L-|^2 " << nb * nb << " |L+|^2 " << nf * nf << '\n';
}

void run_scatter(const RunConfig& c, Run& run, std::ostream& log) {
  const auto nl = c.nonlinearity.build();
  const auto target = c.field.build();
  const auto out = run.timed("scatter", [&] { return scattering_forward(nl, target); });
  write_csv(run.file("forward.csv"), out);
  run.norm("input_l2", target.l2_norm());
  run.norm("output_l2", out.l2_norm());
  log << "|in| " << target.l2_norm() << " |out| " << out.l2_norm() << '\n';
}

void run_expand(const RunConfig& c, Run& run, std::ostream& log) {
  const auto nl = c.nonlinearity.build();
  const auto& e = c.expand;
  const auto Y0 = e.Y0.build();
  const std::array<RadiationFieldData, 4> Y{e.Y[0].build(), e.Y[1].build(), e.Y[2].build(), e.Y[3].build()};
  const auto model = ScatteringModel::make(nl, e.s_half_width, 0.0, e.h);
  const auto h = run.timed("hierarchy", [&] { return solve_hierarchy(model, Y0, Y); });
  const auto st = run.timed("remainder", [&] { return remainder_study(h, Y0, Y, e.eps); });
  auto os = open_csv(run.file("remainder.csv"));
  os << "eps,delta,delta_order1\n";
  for (std::size_t i = 0; i < st.eps.size(); ++i)
    os << st.eps[i] << ',' << st.delta[i] << ',' << st.delta_order1[i] << '\n';
  auto ms = open_csv(run.file("members.csv"));
  ms << "alpha,xi_l2,energy,l5l10,identically_zero\n";
  for (const auto& a : h.order) {
    const auto& m = h.at(a);
    ms << a.str() << ',' << m.xi.l2_norm() << ',' << m.energy << ',' << m.l5l10 << ',' << m.identically_zero << '\n';
  }
  run.norm("slope", st.fit.slope);
  run.norm("slope_order1", st.fit_order1.slope);
  run.norm("backward_consistency", backward_consistency(h, Y));
  for (std::size_t i = 0; i < st.eps.size(); ++i) run.norm("delta[" + std::to_string(i) + "]", st.delta[i]);
  log << "remainder slope " << st.fit.slope << " order-1 slope " << st.fit_order1.slope << '\n';
}

double cone_error(const ConeConfig& cones, const SpaceTimePoint& p, int count) {
  double err = 0.0;
  for (int j = 0; j < count; ++j) {
    const Vec3 d{p.z[0] - cones.z[j][0], p.z[1] - cones.z[j][1], p.z[2] - cones.z[j][2]};
    err = std::max(err, std::abs(norm(d) - std::abs(p.t - cones.s[j])));
  }
  return err;
}

void run_geometry(const RunConfig& c, Run& run, std::ostream& log) {
  const auto cones = c.cones.build();
  const auto planes = plane_patterns(cones);
  for (std::size_t j = 0; j < planes.size(); ++j) {
    auto os = open_csv(run.file("plane_" + std::to_string(j) + ".csv"));
    auto p = planes[j];
    for (int k = 0; k < c.cones.n_theta; ++k) {
      const double th = 2.0 * M_PI * k / c.cones.n_theta;
      const Vec3 om{std::cos(th), std::sin(th), 0.0};
      p.points.push_back({p.offset - dot(om, p.normal), om});
    }
    p.write_csv(os);
  }
  double on_cone = 0.0, residual = 0.0, extrap = 0.0;
  PatternSet pat;
  if (c.cones.type == "triple") {
    const auto tg = triple_interaction_geometry(c.cones.a, c.cones.b, c.cones.s_star);
    std::vector<double> x30;
    for (int k = -8; k <= 8; ++k) x30.push_back(0.25 * k);
    for (double x : x30)
      for (Family f : {Family::Minus, Family::Plus}) on_cone = std::max(on_cone, cone_error(cones, tg.gamma(x, f), 3));
    pat = run.timed("pattern", [&] { return tg.pattern(x30, c.cones.n_theta); });
    run.timed("extrapolation", [&] {
      for (double x : {-1.0, 0.0, 0.5})
        for (double th : {0.3, 1.7, 4.0}) {
          const auto tr = radiation_pattern_of_ray([&](double rho) { return tg.q_minus(x, th, rho); });
          extrap = std::max(extrap, std::abs(tr.point.s - tg.pattern_point(x, th).s));
        }
      return 0;
    });
  } else {
    const auto qg = quadruple_interaction_geometry(c.cones.a, c.cones.b, c.cones.c, c.cones.s_star);
    for (Family f : {Family::Minus, Family::Plus})
      on_cone = std::max(on_cone, cone_error(cones, {qg.t0(f), qg.vertex()}, 4));
    pat = run.timed("pattern", [&] { return qg.pattern(Family::Minus, c.cones.n_theta, c.cones.n_theta / 2); });
  }
  for (const auto& p : pat.points) residual = std::max(residual, std::abs(pat.residual(p)));
  auto os = open_csv(run.file("pattern.csv"));
  pat.write_csv(os);
  run.norm("gamma_on_cone_error", on_cone);
  run.norm("pattern_residual", residual);
  run.norm("pattern_points", static_cast<double>(pat.points.size()));
  if (c.cones.type == "triple") run.norm("extrapolation_error", extrap);
  log << pat.kind_name() << " pattern with " << pat.points.size() << " points, on-cone error " << on_cone << '\n';
}

void run_recover(const RunConfig& c, Run& run, std::ostream& log) {
  const auto& r = c.recover;
  if (r.mode == "reconstruct") {
    const auto nl = c.nonlinearity.build();
    std::vector<double> g3 = r.g3;
    if (g3.empty()) {
      g3.resize(r.n_points);
      for (int i = 0; i < r.n_points; ++i) g3[i] = nl.eval(r.u_lo + (r.u_hi - r.u_lo) * i / (r.n_points - 1), 3);
    }
    const auto f = run.timed("reconstruct", [&] { return reconstruct_f_from_third_derivative(r.u_lo, r.u_hi, g3); });
    const double u_max = std::min(-r.u_lo, r.u_hi);
    auto os = open_csv(run.file("reconstruction.csv"));
    os << "u,f,configured_f\n";
    double err = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double u = -u_max + 2.0 * u_max * i / 400;
      os << u << ',' << f(u) << ',' << nl(u) << '\n';
      err = std::max(err, std::abs(f(u) - nl(u)));
    }
    run.norm("sup_error_vs_configured", err);
    log << "reconstruction sup error vs configured f " << err << '\n';
    return;
  }
  auto setup = r.mode == "quadruple" ? quadruple_experiment(r.n, r.background_amplitude)
                                     : triple_experiment(r.n, r.background_amplitude);
  setup.run.nl = c.nonlinearity.build();
  if (r.mode == "scaling") {
    const auto rep = run.timed("scaling", [&] { return amplitude_scaling_probe(setup, r.kappa); });
    auto os = open_csv(run.file("scaling.csv"));
    os << "kappa,amplitude,on,off_mean,ratio,verdict\n";
    for (std::size_t q = 0; q < rep.kappa.size(); ++q)
      os << rep.kappa[q] << ',' << rep.amplitude[q] << ',' << rep.detections[q].csv_row() << '\n';
    run.norm("slope", rep.slope);
    log << "amplitude slope " << rep.slope << '\n';
    return;
  }
  const auto res = run.timed("interaction", [&] { return run_interaction_3d(setup.run); });
  write_csv(run.file("xi.csv"), res.xi[0]);
  const auto det = detect_new_singularities(res.xi[0], setup.probe);
  auto os = open_csv(run.file("detection.csv"));
  const Vec3& om = setup.run.probe_dirs[setup.probe.omega_index];
  os << "omega1,omega2,omega3,s_center,on,off_mean,ratio,verdict\n";
  os << om[0] << ',' << om[1] << ',' << om[2] << ',' << setup.probe.s_center << ',' << det.csv_row() << '\n';
  run.norm("on", det.on);
  run.norm("off_mean", det.off_mean);
  run.norm("ratio", det.ratio);
  run.norm("detected", det.detected ? 1.0 : 0.0);
  run.norm("u0_max", res.u0_max);
  log << "detection ratio " << det.ratio << (det.detected ? " (detected)" : " (absent)") << '\n';
}

}  // namespace

int run_experiment(const RunConfig& cfg, const std::string& out_dir, int threads, std::ostream& log) {
  NLS_REQUIRE(threads >= 1, ConfigurationError, "--threads must be at least 1");
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  Run run(cfg, dir, threads);
  run.write_manifest("incomplete", -1, "running");
  static const std::map<std::string, std::function<void(const RunConfig&, Run&, std::ostream&)>> pipelines{
      {"validate", run_validate}, {"solve", run_solve},       {"radiate", run_radiate},
      {"scatter", run_scatter},   {"expand", run_expand},     {"geometry", run_geometry},
      {"recover", run_recover}};
  int code = kExitOk;
  std::string message = "ok";
  try {
    const auto it = pipelines.find(cfg.kind);
    NLS_REQUIRE(it != pipelines.end(), ConfigurationError, "unknown experiment kind '" + cfg.kind + "'");
    it->second(cfg, run, log);
  } catch (const PreconditionError& e) {
    code = kExitPrecondition;
    message = e.what();
  } catch (const DependencyError& e) {
    code = kExitPrecondition;
    message = e.what();
  } catch (const NumericalGuardError& e) {
    code = kExitNumericalGuard;
    message = e.what();
  } catch (const std::exception& e) {
    code = kExitFailure;
    message = e.what();
  }
  run.write_manifest(code == kExitOk ? "complete" : "incomplete", code, message);
  if (code != kExitOk) log << "error: " << message << '\n';
  return code;
}

int run_config_file(const std::string& config_path, const std::string& out_dir, int threads, std::ostream& log) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const PreconditionError& e) {
    log << "error: " << e.what() << '\n';
    return kExitPrecondition;
  }
  return run_experiment(cfg, out_dir.empty() ? (cfg.out.empty() ? "out" : cfg.out) : out_dir, threads, log);
}

}  // namespace nlscatter
