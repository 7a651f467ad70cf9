// Scenario runner: executes verifier suites and holonomy pipelines for the
// built-in scenarios and emits residual reports in plain or records form.
#pragma once

#include <chrono>
#include <fstream>
#include <sstream>
#include <string>

#include "holo2/scenarios.hpp"

namespace holo2 {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ReportFormat { plain, records };

struct ScenarioConfig {
  std::string scenario = "trivial";
  int steps = 0;  // 0: use the scenario default
  uint64_t seed = 1;
  double tolerance_scale = 1.0;
  ReportFormat format = ReportFormat::plain;
  int flux = 1;  // sphere-gerbe quanta
  int mesh_n = 8, mesh_m = 8;
  int samples = 100;
};

struct CheckRecord {
  std::string name;
  std::string anchor;  // stable identifier of the identity being checked
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  long millis = 0;
};

struct RunReport {
  std::string scenario;
  uint64_t seed = 0;
  int steps = 0;
  std::vector<CheckRecord> checks;
  std::vector<std::pair<std::string, std::string>> outputs;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  int passed() const {
    int n = 0;
    for (const auto& c : checks) n += c.pass ? 1 : 0;
    return n;
  }
};

namespace detail {

struct Runner {
  RunReport rep;
  double tol_scale = 1.0;

  template <class Fn>
  void check(const std::string& name, const std::string& anchor, double tol,
             Fn&& residual_fn) {
    auto start = std::chrono::steady_clock::now();
    CheckRecord rec;
    rec.name = name;
    rec.anchor = anchor;
    rec.tolerance = tol * tol_scale;
    rec.residual = residual_fn();
    rec.pass = rec.residual <= rec.tolerance;
    rec.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
    rep.checks.push_back(rec);
  }
  void out(const std::string& key, const std::string& value) {
    rep.outputs.emplace_back(key, value);
  }
  static std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
  }
  static std::string fmt(cplx v) {
    char buf[90];
    std::snprintf(buf, sizeof(buf), "%.12e%+.12ei", v.real(), v.imag());
    return buf;
  }
};

// residual formulation of a lower bound: 0 when value >= bound
inline double at_least(double value, double bound) {
  return value >= bound ? 0.0 : bound - value;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario implementations

namespace detail {

inline void run_trivial(Runner& r, const ScenarioConfig& cfg, int steps) {
  CrossedModule cm = trivial_module();
  r.check("axioms.trivial-module", "cm.axioms", 1e-12,
          [&] { return axioms_report(cm, cfg.samples, cfg.seed).max_residual(); });
  LocalConnection flat;
  flat.A = zero_form1(1);
  flat.B = zero_form2(1);
  BundleData b;
  b.atlas.charts.push_back({0, [](const Vec&) { return true; }});
  b.atlas.sample_point = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    Vec p(2);
    p << u(rng), u(rng);
    return p;
  };
  b.g = [](int, int) { return gm_const(mat_id(1)); };
  b.f = [](int, int, int) { return gm_const(mat_id(1)); };
  b.a = [](int, int) { return zero_form1(1); };
  b.connections[0] = flat;
  scenarios::AnnulusScenario loop_src = scenarios::inner_annulus_scenario();
  SurfaceLoop gamma = loop_src.gamma;
  StepSpec spec{steps, OdeMethod::rk4};
  MeshGrid mesh = uniform_mesh(2, 2);
  ChartAssignment assign;
  assign.chart.assign(2, std::vector<int>(2, 0));
  r.check("glue.zero-data", "glue.identity", 1e-12, [&] {
    GlobalHolonomy hol = glue(gamma, b, mesh, assign, spec, cm);
    return mat_dist(hol.arrow.h, cm.id_H());
  });
}

inline void run_abelian_stokes(Runner& r, const ScenarioConfig& cfg, int steps) {
  auto sc = scenarios::abelian_stokes_scenario();
  StepSpec spec{steps, OdeMethod::rk4};
  const double t = 1.0, s = 1.0;
  r.check("stokes.loop-vs-boundary-integral", "transport.abelian-stokes", 1e-6, [&] {
    Mat u = loop_holonomy_u(sc.conn.A, sc.patch, t, s, spec);
    cplx loop = scenarios::boundary_loop_integral(sc.conn.A, sc.patch, t, s);
    return std::abs(u(0, 0) - std::exp(loop));
  });
  r.check("stokes.surface-vs-double-quadrature", "surface.abelian-stokes", 1e-6, [&] {
    Mat H = local_2_holonomy(sc.conn, sc.patch, spec, sc.cm).H;
    cplx dbl = scenarios::surface_double_integral(sc.conn.B, sc.patch, t, s);
    return std::abs(H(0, 0) - std::exp(dbl));
  });
  r.check("stokes.row-integral-match", "transport.alpha-B-equals-A", 1e-8, [&] {
    Mat b = script_B(sc.conn, sc.patch, 0.9, 0.6, spec, sc.cm);
    Mat a = script_A(sc.conn.A, sc.patch, 0.9, 0.6, spec);
    return mat_dist(sc.cm.alpha_algebra(b), a);
  });
}

inline void run_inner_annulus(Runner& r, const ScenarioConfig& cfg, int steps) {
  auto sc = scenarios::inner_annulus_scenario();
  StepSpec spec{steps, OdeMethod::rk4};
  r.check("bundle.cocycle", "cocycle.identities", 1e-9, [&] {
    return verify_cocycle(sc.bundle, sc.cm, cfg.samples, cfg.seed).max_residual();
  });
  r.check("bundle.compatibility", "compat.identities", 1e-6, [&] {
    return verify_compatibility(sc.bundle, sc.cm, cfg.samples / 2, cfg.seed)
        .max_residual();
  });
  r.check("bundle.tetrahedron", "cocycle.tetrahedron-arrows", 1e-10, [&] {
    std::mt19937_64 rng(cfg.seed);
    double worst = 0.0;
    auto pts = sample_overlap_points(sc.bundle.atlas, 6, cfg.seed, 4);
    for (const auto& p : pts) {
      auto [lhs, rhs] = tetrahedron_two_arrow(sc.bundle, 0, 1, 2, 3, p, sc.cm);
      worst = std::max(worst, mat_dist(lhs.h, rhs.h));
    }
    return worst;
  });

  auto [mesh, assign] = build_mesh(sc.gamma, sc.bundle.atlas, cfg.mesh_n, cfg.mesh_m);
  GlueOptions opts;
  opts.check = false;  // record composability residuals as failing checks
  GlobalHolonomy base;
  r.check("glue.run", "glue.composability", 1e-4, [&] {
    base = glue(sc.gamma, sc.bundle, mesh, assign, spec, sc.cm, opts);
    return base.max_piece_residual;
  });
  if (base.invariant.size() >= 2)
    r.out("hol.class-invariant", Runner::fmt(cplx(base.invariant[0], base.invariant[1])));
  for (int i = 0; i < base.arrow.h.rows(); ++i)
    for (int j = 0; j < base.arrow.h.cols(); ++j)
      r.out("hol.h" + std::to_string(i) + std::to_string(j),
            Runner::fmt(base.arrow.h(i, j)));
  r.out("hol.closure-residual", Runner::fmt(base.closure_residual));
  r.check("glue.refinement-invariance", "theorem.refinement", 1e-5, [&] {
    return invariance_under_refinement(sc.gamma, sc.bundle, mesh, assign, spec,
                                       sc.cm, opts);
  });
  GlueOptions col = opts;
  col.order = GlueOptions::Order::column_major;
  r.check("glue.column-major-agreement", "theorem.order-independence", 1e-5, [&] {
    GlobalHolonomy other = glue(sc.gamma, sc.bundle, mesh, assign, spec, sc.cm, col);
    return class_distance(base.arrow.h, other.arrow.h, sc.cm);
  });

  auto other_chart = [&](int a, int b) -> int {
    auto cand = cell_chart_candidates(sc.gamma, sc.bundle.atlas, mesh, a, b);
    if (b == 0) {
      auto partner =
          cell_chart_candidates(sc.gamma, sc.bundle.atlas, mesh, a, mesh.ns() - 1);
      std::vector<int> joint;
      std::set_intersection(cand.begin(), cand.end(), partner.begin(),
                            partner.end(), std::back_inserter(joint));
      cand = joint;
    }
    for (int c : cand)
      if (c != assign.at(a, b)) return c;
    return -1;
  };
  int a_int = -1, a_bnd = -1;
  for (int a = 0; a < mesh.nt(); ++a) {
    if (a_int < 0 && other_chart(a, 3) >= 0) a_int = a;
    if (a_bnd < 0 && other_chart(a, 0) >= 0) a_bnd = a;
  }
  ReassignmentResult interior, boundary;
  r.check("glue.reassign-interior", "theorem.chart-independence", 1e-5, [&] {
    if (a_int < 0) return 1.0;
    interior = invariance_under_reassignment(sc.gamma, sc.bundle, mesh, assign,
                                             a_int, 3, other_chart(a_int, 3),
                                             spec, sc.cm, opts);
    return interior.class_dist;
  });
  r.check("glue.reassign-boundary-class", "theorem.quotient-invariance", 1e-5, [&] {
    if (a_bnd < 0) return 1.0;
    boundary = invariance_under_reassignment(sc.gamma, sc.bundle, mesh, assign,
                                             a_bnd, 0, other_chart(a_bnd, 0),
                                             spec, sc.cm, opts);
    return boundary.class_dist;
  });
  r.check("glue.reassign-boundary-raw-moves", "theorem.quotient-necessity", 0.0,
          [&] { return at_least(boundary.raw_dist, 1e-3); });
}

inline void run_sphere_gerbe(Runner& r, const ScenarioConfig& cfg, int steps) {
  SphereScenario sc = sphere_two_chart_scenario(cfg.flux);
  SurfaceLoop loop = scenarios::sphere_gerbe_loop(sc);
  StepSpec spec{steps, OdeMethod::rk4};
  r.check("bundle.compatibility", "compat.identities", 1e-9, [&] {
    return verify_compatibility(sc.bundle, sc.cm, cfg.samples, cfg.seed, {true, 1e-6})
        .max_residual();
  });
  auto [mesh, assign] = build_mesh(loop, sc.bundle.atlas, cfg.mesh_n, cfg.mesh_m);
  GlueOptions opts;
  opts.check = false;
  GlobalHolonomy hol;
  r.check("glue.run", "glue.composability", 1e-4, [&] {
    hol = glue(loop, sc.bundle, mesh, assign, spec, sc.cm, opts);
    return hol.max_piece_residual;
  });
  r.out("hol.value", Runner::fmt(hol.arrow.h(0, 0)));
  r.out("hol.flux-oracle", Runner::fmt(sc.holonomy_oracle));
  r.check("glue.alpha-kernel", "theorem.sphere-kernel", 1e-12,
          [&] { return sphere_kernel_check(hol, sc.cm); });
  r.check("glue.flux-oracle", "glue.flux", 1e-5,
          [&] { return std::abs(hol.arrow.h(0, 0) - sc.holonomy_oracle); });
  r.check("glue.refinement-invariance", "theorem.refinement", 1e-5, [&] {
    return invariance_under_refinement(loop, sc.bundle, mesh, assign, spec, sc.cm,
                                       opts);
  });
  GlueOptions col = opts;
  col.order = GlueOptions::Order::column_major;
  r.check("glue.column-major-agreement", "theorem.order-independence", 1e-5, [&] {
    GlobalHolonomy other = glue(loop, sc.bundle, mesh, assign, spec, sc.cm, col);
    return class_distance(hol.arrow.h, other.arrow.h, sc.cm);
  });
}

inline void run_reparam_shear(Runner& r, const ScenarioConfig& cfg, int steps) {
  SphereScenario sc = sphere_two_chart_scenario(cfg.flux);
  SurfaceLoop loop = scenarios::sphere_gerbe_loop(sc);
  StepSpec spec{steps, OdeMethod::rk4};
  r.check("glue.reparametrization", "theorem.reparametrization", 1e-4, [&] {
    return reparametrization_residual(loop, scenarios::shear_reparametrization(),
                                      sc.bundle, spec, sc.cm, cfg.mesh_n,
                                      cfg.mesh_m);
  });
}

inline void run_refinement_sweep(Runner& r, const ScenarioConfig& cfg, int steps) {
  LocalConnection conn = scenarios::planar_flat_connection();
  CrossedModule cm = inner_module(2);
  scenarios::AnnulusScenario annulus = scenarios::inner_annulus_scenario();
  SurfacePatch patch = annulus.gamma.patch;
  std::vector<int> ladder = {steps / 4, steps / 2, steps};

  r.check("sweep.path-composition-order", "transport.composition-order", 0.0, [&] {
    std::vector<std::pair<double, double>> sweep;
    ParamPath rho = row_path(patch, 0.33, 0.0, 1.0);
    for (int n : ladder) {
      StepSpec s2{n, OdeMethod::rk4};
      Mat whole = holonomy1(conn.A, rho, s2).endpoint;
      ParamPath l = rho, rr = rho;
      l.b = 0.37;
      rr.a = 0.37;
      Mat split = holonomy1(conn.A, l, s2).endpoint * holonomy1(conn.A, rr, s2).endpoint;
      sweep.push_back({1.0 / n, mat_dist(whole, split)});
    }
    return at_least(convergence_order(sweep).order, 2.0);
  });
  r.check("sweep.target-matching-order", "surface.target-matching-order", 0.0, [&] {
    std::vector<std::pair<double, double>> sweep;
    for (int n : ladder) {
      StepSpec s2{n, OdeMethod::rk4};
      sweep.push_back({1.0 / n, local_2_holonomy(conn, patch, s2, cm).target_residual});
    }
    return at_least(convergence_order(sweep).order, 2.0);
  });
  r.check("sweep.refinement-order", "glue.refinement-order", 0.0, [&] {
    auto [mesh, assign] =
        build_mesh(annulus.gamma, annulus.bundle.atlas, cfg.mesh_n, cfg.mesh_m);
    std::vector<std::pair<double, double>> sweep;
    for (int n : ladder) {
      StepSpec s2{n, OdeMethod::rk4};
      GlueOptions opts;
      opts.ctol = 1e-2;
      sweep.push_back(
          {1.0 / n, invariance_under_refinement(annulus.gamma, annulus.bundle,
                                                mesh, assign, s2, annulus.cm, opts)});
    }
    return at_least(convergence_order(sweep).order, 2.0);
  });
  r.check("sweep.invariant-step-halving", "glue.invariant-order", 0.0, [&] {
    auto [mesh, assign] =
        build_mesh(annulus.gamma, annulus.bundle.atlas, cfg.mesh_n, cfg.mesh_m);
    GlueOptions opts;
    opts.ctol = 1e-2;
    std::vector<std::vector<double>> inv;
    for (int n : ladder) {
      StepSpec s2{n, OdeMethod::rk4};
      inv.push_back(
          glue(annulus.gamma, annulus.bundle, mesh, assign, s2, annulus.cm, opts)
              .invariant);
    }
    double coarse = vec_dist(inv[0], inv[1]);
    double fine = vec_dist(inv[1], inv[2]);
    if (fine <= 1e-14) return 0.0;  // below floor
    return at_least(coarse / fine, 4.0);
  });
}

inline void run_verify(Runner& r, const ScenarioConfig& cfg, int steps) {
  for (const CrossedModule& cm :
       {trivial_module(), abelian_gerbe_module(), inner_module(2), ab_pair_module()}) {
    r.check("axioms." + cm.name, "cm.axioms", 1e-9, [&] {
      return axioms_report(cm, cfg.samples, cfg.seed).max_residual();
    });
  }
  StepSpec spec{steps, OdeMethod::rk4};
  CrossedModule cm = inner_module(2);
  LocalConnection conn = scenarios::planar_flat_connection();
  scenarios::AnnulusScenario annulus = scenarios::inner_annulus_scenario();
  SurfacePatch patch = annulus.gamma.patch;
  ParamPath rho = row_path(patch, 0.4, 0.0, 1.0);

  r.check("transport.composition", "transport.composition", 1e-6, [&] {
    Mat whole = holonomy1(conn.A, rho, spec).endpoint;
    ParamPath l = rho, rr = rho;
    l.b = 0.37;
    rr.a = 0.37;
    return mat_dist(whole, Mat(holonomy1(conn.A, l, spec).endpoint *
                               holonomy1(conn.A, rr, spec).endpoint));
  });
  r.check("transport.reversal", "transport.reversal", 1e-6, [&] {
    Mat f = holonomy1(conn.A, rho, spec).endpoint;
    Mat b = holonomy1(conn.A, reverse_path(rho), spec).endpoint;
    return mat_dist(Mat(f * b), cm.id_G());
  });
  r.check("transport.row-integral-match", "transport.alpha-B-equals-A", 1e-6, [&] {
    Mat b = script_B(conn, patch, 0.8, 0.5, spec, cm);
    Mat a = script_A(conn.A, patch, 0.8, 0.5, spec);
    return mat_dist(cm.alpha_algebra(b), a);
  });
  r.check("surface.target-matching", "surface.target-matching", 1e-5, [&] {
    return local_2_holonomy(conn, patch, spec, cm).target_residual;
  });
  r.check("surface.loop-identification", "surface.alpha-H-equals-u", 1e-5, [&] {
    auto hol = local_2_holonomy(conn, patch, spec, cm);
    Mat u = loop_holonomy_u(conn.A, patch, patch.t1, patch.s1, spec);
    return mat_dist(cm.alpha_group(Mat(hol.H.inverse())), u);
  });
  r.check("bundle.cocycle", "cocycle.identities", 1e-9, [&] {
    return verify_cocycle(annulus.bundle, annulus.cm, cfg.samples, cfg.seed)
        .max_residual();
  });
  r.check("bundle.compatibility", "compat.identities", 1e-6, [&] {
    return verify_compatibility(annulus.bundle, annulus.cm, cfg.samples / 2, cfg.seed)
        .max_residual();
  });
  r.check("bundle.cylinder", "compat.cylinder", 1e-5, [&] {
    ParamPath arc;
    arc.a = 0;
    arc.b = 1;
    arc.map = [](double t) {
      double ang = (0.35 + 0.3 * t) * M_PI;
      return scenarios::p2(std::cos(ang), std::sin(ang));
    };
    arc.velocity = [](double t) {
      double ang = (0.35 + 0.3 * t) * M_PI;
      return scenarios::p2(-0.3 * M_PI * std::sin(ang), 0.3 * M_PI * std::cos(ang));
    };
    double worst = 0.0;
    worst = std::max(worst, cylinder_residual(annulus.bundle, 0, 1, 2, arc, spec, cm));
    worst = std::max(worst, cylinder_residual(annulus.bundle, 0, 2, 3, arc, spec, cm));
    return worst;
  });
}

}  // namespace detail

inline std::vector<std::string> scenario_names() {
  return {"trivial",       "abelian-stokes",  "inner-annulus", "sphere-gerbe",
          "reparam-shear", "refinement-sweep", "verify"};
}

inline int default_steps(const std::string& scenario) {
  if (scenario == "reparam-shear" || scenario == "verify") return 128;
  return 64;
}

inline RunReport run_scenario(const ScenarioConfig& cfg) {
  detail::Runner r;
  r.tol_scale = cfg.tolerance_scale;
  if (cfg.tolerance_scale <= 0) throw ConfigError("tolerance scale must be positive");
  if (cfg.mesh_n < 1 || cfg.mesh_m < 1) throw ConfigError("mesh dimensions must be >= 1");
  const int steps = cfg.steps > 0 ? cfg.steps : default_steps(cfg.scenario);
  r.rep.scenario = cfg.scenario;
  r.rep.seed = cfg.seed;
  r.rep.steps = steps;
  if (cfg.scenario == "trivial")
    detail::run_trivial(r, cfg, steps);
  else if (cfg.scenario == "abelian-stokes")
    detail::run_abelian_stokes(r, cfg, steps);
  else if (cfg.scenario == "inner-annulus")
    detail::run_inner_annulus(r, cfg, steps);
  else if (cfg.scenario == "sphere-gerbe")
    detail::run_sphere_gerbe(r, cfg, steps);
  else if (cfg.scenario == "reparam-shear")
    detail::run_reparam_shear(r, cfg, steps);
  else if (cfg.scenario == "refinement-sweep")
    detail::run_refinement_sweep(r, cfg, steps);
  else if (cfg.scenario == "verify")
    detail::run_verify(r, cfg, steps);
  else
    throw ConfigError("unknown scenario: " + cfg.scenario);
  return r.rep;
}

inline std::string list_scenarios() {
  std::ostringstream os;
  os << "trivial          identity crossed module, zero fields, zero residuals\n"
     << "abelian-stokes   single-chart scalar pair: loop and surface transport vs quadrature\n"
     << "inner-annulus    four-chart synthesized bundle, gluing and well-definedness battery\n"
     << "sphere-gerbe     two-chart circle gerbe on the sphere, flux oracle (--flux n)\n"
     << "reparam-shear    sphere scenario rerun through a shear reparametrization\n"
     << "refinement-sweep measured convergence orders under step halving\n"
     << "verify           algebra, transport, surface and bundle verifier suites\n";
  return os.str();
}

// Records format: '#'-prefixed header lines, then one line per check with
// stable field order: name anchor residual tolerance status millis. The
// millis slot holds '-' so identical runs are byte-identical.
inline std::string emit_report(const RunReport& rep, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::records) {
    os << "#holo2-records v1\n";
    os << "#scenario " << rep.scenario << " seed " << rep.seed << " steps "
       << rep.steps << "\n";
    for (const auto& [k, v] : rep.outputs) os << "#out " << k << " " << v << "\n";
    for (const auto& c : rep.checks) {
      os << c.name << " " << c.anchor << " " << detail::Runner::fmt(c.residual)
         << " " << detail::Runner::fmt(c.tolerance) << " "
         << (c.pass ? "PASS" : "FAIL") << " -\n";
    }
    os << "#summary passed " << rep.passed() << "/" << rep.checks.size() << "\n";
    return os.str();
  }
  os << "scenario " << rep.scenario << " (seed " << rep.seed << ", steps "
     << rep.steps << ")\n";
  for (const auto& [k, v] : rep.outputs) os << "  " << k << " = " << v << "\n";
  for (const auto& c : rep.checks) {
    char buf[200];
    std::snprintf(buf, sizeof(buf), "  %-38s %-32s %11.4e  tol %9.2e  %s  %ldms\n",
                  c.name.c_str(), c.anchor.c_str(), c.residual, c.tolerance,
                  c.pass ? "PASS" : "FAIL", c.millis);
    os << buf;
  }
  os << "passed " << rep.passed() << "/" << rep.checks.size() << "\n";
  return os.str();
}

// Parses the records format back into a report (header outputs are kept,
// timings are not recorded).
inline RunReport parse_records(const std::string& text) {
  RunReport rep;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line);
      std::string tag;
      ls >> tag;
      if (tag == "#scenario") {
        std::string kw;
        ls >> rep.scenario >> kw >> rep.seed >> kw >> rep.steps;
      } else if (tag == "#out") {
        std::string k, v;
        ls >> k >> v;
        rep.outputs.emplace_back(k, v);
      }
      continue;
    }
    std::istringstream ls(line);
    CheckRecord c;
    std::string status, millis;
    ls >> c.name >> c.anchor >> c.residual >> c.tolerance >> status >> millis;
    if (!ls) throw ConfigError("malformed records line: " + line);
    c.pass = status == "PASS";
    rep.checks.push_back(c);
  }
  return rep;
}

// Flat key = value configuration file.
inline ScenarioConfig parse_config_text(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    try {
      if (key == "scenario")
        cfg.scenario = value;
      else if (key == "steps")
        cfg.steps = std::stoi(value);
      else if (key == "seed")
        cfg.seed = std::stoull(value);
      else if (key == "tolerance")
        cfg.tolerance_scale = std::stod(value);
      else if (key == "flux")
        cfg.flux = std::stoi(value);
      else if (key == "mesh_n")
        cfg.mesh_n = std::stoi(value);
      else if (key == "mesh_m")
        cfg.mesh_m = std::stoi(value);
      else if (key == "samples")
        cfg.samples = std::stoi(value);
      else if (key == "format") {
        if (value == "plain")
          cfg.format = ReportFormat::plain;
        else if (value == "records")
          cfg.format = ReportFormat::records;
        else
          throw ConfigError("config: format must be plain or records");
      } else
        throw ConfigError("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ConfigError("config: bad value for '" + key + "'");
    }
  }
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace holo2
