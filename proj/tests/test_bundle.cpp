#include <catch2/catch_amalgamated.hpp>

#include "holo2/bundle.hpp"

using namespace holo2;

namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << cplx(a), cplx(b), cplx(c), cplx(d);
  return m;
}

Vec pt2(double x, double y) {
  Vec p(2);
  p << x, y;
  return p;
}

Form1 poly_form_2d() {
  Mat k1 = mat2(0.3, 0.8, -0.2, 0.1), k2 = mat2(-0.1, 0.4, 0.7, -0.5);
  Form1 f;
  f.value = [k1, k2](const Vec& p, const Vec& u) {
    return Mat(k1 * (p[0] * u[1]) + k2 * (std::sin(p[1]) * u[0]));
  };
  f.d = [k1, k2](const Vec& p, const Vec& u, const Vec& v) {
    double wedge = u[0] * v[1] - v[0] * u[1];
    return Mat(k1 * wedge - k2 * (std::cos(p[1]) * wedge));
  };
  return f;
}

LocalConnection inner_flat_connection() {
  LocalConnection conn;
  conn.A = poly_form_2d();
  Form1 a = conn.A;
  conn.B.value = [a](const Vec& p, const Vec& u, const Vec& v) {
    return curvature1(a, p, u, v);
  };
  return conn;
}

// Four half-plane charts of the square [-1,1]^2 whose quadruple overlap is
// the middle block.
Atlas square_atlas() {
  Atlas atlas;
  atlas.charts.push_back({0, [](const Vec& p) { return p[0] < 0.4; }});
  atlas.charts.push_back({1, [](const Vec& p) { return p[0] > -0.4; }});
  atlas.charts.push_back({2, [](const Vec& p) { return p[1] < 0.4; }});
  atlas.charts.push_back({3, [](const Vec& p) { return p[1] > -0.4; }});
  atlas.sample_point = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return pt2(u(rng), u(rng));
  };
  return atlas;
}

GaugeTransformation smooth_gauge(double c1, double c2, const Mat& k, const Mat& l) {
  GaugeTransformation gt;
  ScalarField theta{[c1, c2](const Vec& q) { return c1 * q[0] + c2 * q[1] * q[1]; },
                    [c1, c2](const Vec& q, const Vec& u) {
                      return c1 * u[0] + 2 * c2 * q[1] * u[1];
                    }};
  gt.g = gm_exp(theta, k);
  gt.phi.value = [l, c1](const Vec& q, const Vec& u) {
    return Mat(l * (c1 * q[1] * u[0] + 0.3 * u[1]));
  };
  gt.phi.d = [l, c1](const Vec&, const Vec& u, const Vec& v) {
    return Mat(l * (c1 * (u[1] * v[0] - v[1] * u[0])));
  };
  return gt;
}

BundleData synthesized_square_bundle(const CrossedModule& cm, bool with_twists) {
  BundleSynthesis syn;
  syn.gauges[0] = smooth_gauge(0.30, 0.20, mat2(0, 0.8, -0.8, 0.1), mat2(0.2, 0, 0.1, -0.2));
  syn.gauges[1] = smooth_gauge(-0.25, 0.15, mat2(0.2, 0.5, -0.5, 0), mat2(0, 0.3, -0.1, 0.1));
  syn.gauges[2] = smooth_gauge(0.18, -0.22, mat2(0.1, -0.6, 0.6, 0.2), mat2(0.15, 0.1, 0, -0.15));
  syn.gauges[3] = smooth_gauge(-0.12, -0.3, mat2(-0.2, 0.4, -0.4, 0.3), mat2(0.1, -0.2, 0.2, 0));
  if (with_twists) {
    double mu = 0.35;
    int idx = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        ++idx;
        double c = mu * (0.5 + 0.1 * idx);
        Mat l = mat2(0, 0.5 + 0.05 * idx, -(0.5 + 0.05 * idx), 0.1 * idx - 0.2);
        ScalarField f{[c](const Vec& q) { return c * (q[0] + 0.5 * q[1]); },
                      [c](const Vec&, const Vec& u) { return c * (u[0] + 0.5 * u[1]); }};
        syn.twists[{i, j}] = gm_exp(f, l);
      }
  }
  return synthesize_bundle(cm, square_atlas(), inner_flat_connection(), syn);
}

}  // namespace

TEST_CASE("trivial synthesis gives a strictly flat bundle") {
  CrossedModule cm = inner_module(2);
  BundleSynthesis syn;
  for (int i = 0; i < 4; ++i) syn.gauges[i] = identity_gauge(cm);
  LocalConnection global = inner_flat_connection();
  BundleData b = synthesize_bundle(cm, square_atlas(), global, syn);
  REQUIRE(verify_cocycle(b, cm, 40, 5).max_residual() < 1e-14);
  REQUIRE(verify_compatibility(b, cm, 40, 5).max_residual() < 1e-8);
}

TEST_CASE("synthesized bundle passes the cocycle and compatibility checks") {
  CrossedModule cm = inner_module(2);
  BundleData b = synthesized_square_bundle(cm, true);
  ResidualReport coc = verify_cocycle(b, cm, 60, 7);
  INFO("triangle " << coc.get("cocycle.triangle") << " tetra "
                   << coc.get("cocycle.tetrahedron"));
  REQUIRE(coc.max_residual() < 1e-10);

  ResidualReport comp = verify_compatibility(b, cm, 40, 7);
  INFO("triple " << comp.get("compat.triple") << " linkA "
                 << comp.get("compat.gauge-link-A") << " linkB "
                 << comp.get("compat.gauge-link-B"));
  REQUIRE(comp.get("compat.triple") < 1e-10);
  REQUIRE(comp.get("compat.gauge-link-A") < 1e-10);
  REQUIRE(comp.get("compat.gauge-link-B") < 1e-6);
}

TEST_CASE("perturbed cocycle data is flagged") {
  CrossedModule cm = inner_module(2);
  BundleData b = synthesized_square_bundle(cm, true);
  BundleData broken = b;
  auto f0 = b.f;
  Mat bump = expm(mat2(0, 0.02, -0.02, 0));
  broken.f = [f0, bump](int i, int j, int k) {
    GroupMap g = f0(i, j, k);
    auto val = g.value;
    g.value = [val, bump](const Vec& p) { return Mat(val(p) * bump); };
    return g;
  };
  ResidualReport coc = verify_cocycle(broken, cm, 40, 7);
  REQUIRE(coc.get("cocycle.tetrahedron") > 1e-4);
}

TEST_CASE("tetrahedron two-arrows coincide on consistent data") {
  CrossedModule cm = inner_module(2);
  BundleData b = synthesized_square_bundle(cm, true);
  Vec p = pt2(0.05, -0.1);
  auto [lhs, rhs] = tetrahedron_two_arrow(b, 0, 1, 2, 3, p, cm);
  REQUIRE(mat_dist(lhs.source, rhs.source) < 1e-12);
  REQUIRE(mat_dist(lhs.h, rhs.h) < 1e-10);

  BundleData broken = b;
  auto f0 = b.f;
  Mat bump = expm(mat2(0, 0.05, -0.05, 0));
  broken.f = [f0, bump](int i, int j, int k) {
    GroupMap g = f0(i, j, k);
    if (!(i == 0 && j == 1 && k == 2)) return g;
    auto val = g.value;
    g.value = [val, bump](const Vec& q) { return Mat(val(q) * bump); };
    return g;
  };
  auto [bl, br] = tetrahedron_two_arrow(broken, 0, 1, 2, 3, p, cm, 1.0);
  REQUIRE(mat_dist(bl.h, br.h) > 1e-3);

  REQUIRE_THROWS_AS(tetrahedron_two_arrow(b, 0, 1, 2, 3, pt2(0.9, 0.9), cm),
                    BundleError);
}

TEST_CASE("compatibility cylinders on the synthesized bundle") {
  CrossedModule cm = inner_module(2);
  BundleData b = synthesized_square_bundle(cm, true);
  StepSpec spec{64, OdeMethod::rk4};
  ParamPath rho;
  rho.a = 0;
  rho.b = 1;
  rho.map = [](double t) { return pt2(0.25 * std::cos(t), 0.25 * std::sin(t)); };
  rho.velocity = [](double t) { return pt2(-0.25 * std::sin(t), 0.25 * std::cos(t)); };

  // the four cylinders over the quadruple overlap, including the derived one
  REQUIRE(cylinder_residual(b, 0, 1, 2, rho, spec, cm) < 1e-6);
  REQUIRE(cylinder_residual(b, 1, 2, 3, rho, spec, cm) < 1e-6);
  REQUIRE(cylinder_residual(b, 0, 1, 3, rho, spec, cm) < 1e-6);
  REQUIRE(cylinder_residual(b, 0, 2, 3, rho, spec, cm) < 1e-6);

  // trivial data: everything collapses to zero
  BundleSynthesis syn;
  for (int i = 0; i < 4; ++i) syn.gauges[i] = identity_gauge(cm);
  BundleData flat = synthesize_bundle(cm, square_atlas(), inner_flat_connection(), syn);
  REQUIRE(cylinder_residual(flat, 0, 1, 2, rho, spec, cm) < 1e-12);

  // the residual decays at the method order under step refinement
  std::vector<std::pair<double, double>> sweep;
  for (int n : {4, 8, 16})
    sweep.push_back({1.0 / n, cylinder_residual(b, 0, 1, 2, rho,
                                                StepSpec{n, OdeMethod::rk4}, cm)});
  REQUIRE(convergence_order(sweep).order >= 2.0);

  // a perturbation of one gluing form grows the residual about linearly
  auto perturbed = [&](double eps) {
    BundleData mod = b;
    auto a0 = b.a;
    mod.a = [a0, eps](int i, int j) {
      Form1 f = a0(i, j);
      if (i == 0 && j == 2) {
        auto val = f.value;
        f.value = [val, eps](const Vec& p, const Vec& u) {
          return Mat(val(p, u) + eps * mat2(0, 1, 1, 0) * u[0]);
        };
      }
      return f;
    };
    return cylinder_residual(mod, 0, 1, 2, rho, spec, cm);
  };
  double r1 = perturbed(0.01), r2 = perturbed(0.02);
  REQUIRE(r1 > 1e-4);
  REQUIRE(r2 / r1 == Catch::Approx(2.0).margin(0.35));

  REQUIRE_THROWS_AS(cylinder_residual(
                        b, 0, 1, 2,
                        ParamPath{[](double t) { return pt2(t, 0); }, {}, 0, 1},
                        spec, cm),
                    BundleError);
}

TEST_CASE("sphere scenario bundle data") {
  SphereScenario sc = sphere_two_chart_scenario(1);
  ResidualReport comp = verify_compatibility(sc.bundle, sc.cm, 60, 11, {true, 1e-6});
  INFO("linkB " << comp.get("compat.gauge-link-B"));
  REQUIRE(comp.max_residual() < 1e-9);
  REQUIRE(verify_cocycle(sc.bundle, sc.cm, 60, 11).max_residual() < 1e-12);

  SphereScenario bad = sphere_two_chart_scenario(1, false);
  ResidualReport broken = verify_compatibility(bad.bundle, bad.cm, 60, 11, {true, 1e-6});
  REQUIRE(broken.get("compat.gauge-link-B") > 1e-2);
}

TEST_CASE("synthesis rejects modules without a solvable alpha") {
  CrossedModule cm = inner_module(2);
  cm.alpha_kind = AlphaKind::general;
  BundleSynthesis syn;
  syn.gauges[0] = identity_gauge(cm);
  REQUIRE_THROWS_AS(
      synthesize_bundle(cm, square_atlas(), inner_flat_connection(), syn),
      BundleError);
}
