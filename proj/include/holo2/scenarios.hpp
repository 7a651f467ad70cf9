// Built-in test scenarios: field data, bundles and surface loops used by the
// CLI runner, the test suites and the acceptance harness.
#pragma once

#include "holo2/global_holonomy.hpp"

namespace holo2 {
namespace scenarios {

inline Mat m2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << cplx(a), cplx(b), cplx(c), cplx(d);
  return m;
}

inline Vec p2(double x, double y) {
  Vec p(2);
  p << x, y;
  return p;
}

// gl(2)-valued 1-form on R^2 with analytic exterior derivative.
inline Form1 planar_test_form() {
  Mat k1 = m2(0.3, 0.8, -0.2, 0.1), k2 = m2(-0.1, 0.4, 0.7, -0.5);
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

inline LocalConnection planar_flat_connection() {
  LocalConnection conn;
  conn.A = planar_test_form();
  Form1 a = conn.A;
  conn.B.value = [a](const Vec& p, const Vec& u, const Vec& v) {
    return curvature1(a, p, u, v);
  };
  return conn;
}

// ---------------------------------------------------------------------------
// abelian-stokes: single chart, 1x1 positive reals, B forced to dA.

struct AbelianStokes {
  CrossedModule cm = ab_pair_module();
  LocalConnection conn;
  SurfacePatch patch;
};

inline AbelianStokes abelian_stokes_scenario() {
  AbelianStokes sc;
  sc.conn.A.value = [](const Vec& p, const Vec& u) {
    Mat m(1, 1);
    m(0, 0) = 0.4 * p[0] * u[1] - 0.25 * p[1] * u[0] + 0.1 * u[0];
    return m;
  };
  sc.conn.A.d = [](const Vec&, const Vec& u, const Vec& v) {
    Mat m(1, 1);
    m(0, 0) = 0.65 * (u[0] * v[1] - v[0] * u[1]);
    return m;
  };
  Form1 a = sc.conn.A;
  sc.conn.B.value = [a](const Vec& p, const Vec& u, const Vec& v) {
    return a.d(p, u, v);
  };
  sc.patch.map = [](double t, double s) {
    return p2(t + 0.2 * std::sin(s), s - 0.1 * t * t);
  };
  sc.patch.jacobian = [](double t, double s) -> std::pair<Vec, Vec> {
    return {p2(1.0, -0.2 * t), p2(0.2 * std::cos(s), 1.0)};
  };
  return sc;
}

// Composite-Simpson loop integral of a scalar 1-form around the patch
// boundary, oriented left edge up, top across, then back down and along the
// bottom (the orientation whose exponential the boundary-loop transport
// reproduces for abelian groups).
inline cplx boundary_loop_integral(const Form1& a, const SurfacePatch& g,
                                   double t, double s, int nodes = 513) {
  ParamPath left = col_path(g, g.t0, g.s0, s);
  ParamPath top = row_path(g, s, g.t0, t);
  ParamPath right = col_path(g, t, g.s0, s);
  ParamPath bot = row_path(g, g.s0, g.t0, t);
  auto seg = [&](const ParamPath& p, double sign) {
    return composite_line_integral(
               [&](double w) {
                 return a.value(p.map(p.a + w), path_velocity(p, p.a + w));
               },
               p.b - p.a, nodes)(0, 0) *
           sign;
  };
  return seg(left, 1.0) + seg(top, 1.0) + seg(right, -1.0) + seg(bot, -1.0);
}

// 2-d composite Simpson of the pulled-back 2-form over [t0,t]x[s0,s].
inline cplx surface_double_integral(const Form2& b, const SurfacePatch& g,
                                    double t, double s, int nodes = 129) {
  std::vector<Mat> outer;
  for (int i = 0; i < nodes; ++i) {
    double tt = g.t0 + (t - g.t0) * i / (nodes - 1);
    std::vector<Mat> inner;
    for (int j = 0; j < nodes; ++j) {
      double ss = g.s0 + (s - g.s0) * j / (nodes - 1);
      auto [jt, js] = patch_jacobian(g, tt, ss);
      inner.push_back(b.value(g.map(tt, ss), jt, js));
    }
    outer.push_back(composite_quadrature(inner, s - g.s0));
  }
  return composite_quadrature(outer, t - g.t0)(0, 0);
}

// ---------------------------------------------------------------------------
// inner-annulus: four charts (two sectors x two radial bands) on an annulus,
// synthesized consistent bundle over the inner module, loop of circles.

struct AnnulusScenario {
  CrossedModule cm = inner_module(2);
  BundleData bundle;
  SurfaceLoop gamma;
};

inline Atlas annulus_atlas() {
  const double half_angle = 2.8;  // sector half-width, radians
  auto in_sector_1 = [half_angle](const Vec& p) {
    return std::abs(std::atan2(p[1], p[0])) < half_angle;
  };
  auto in_sector_2 = [half_angle](const Vec& p) {
    double a = std::atan2(p[1], p[0]);
    double d = a > 0 ? M_PI - a : M_PI + a;  // distance to the negative x-axis
    return std::abs(d) < half_angle;
  };
  auto inner_band = [](const Vec& p) { return p.norm() < 1.08 && p.norm() > 0.3; };
  auto outer_band = [](const Vec& p) { return p.norm() > 0.92 && p.norm() < 2.0; };
  Atlas atlas;
  atlas.charts.push_back({0, [=](const Vec& p) { return in_sector_1(p) && inner_band(p); }});
  atlas.charts.push_back({1, [=](const Vec& p) { return in_sector_1(p) && outer_band(p); }});
  atlas.charts.push_back({2, [=](const Vec& p) { return in_sector_2(p) && inner_band(p); }});
  atlas.charts.push_back({3, [=](const Vec& p) { return in_sector_2(p) && outer_band(p); }});
  atlas.sample_point = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> rad(0.7, 1.3), ang(-M_PI, M_PI);
    double r = rad(rng), a = ang(rng);
    return p2(r * std::cos(a), r * std::sin(a));
  };
  return atlas;
}

inline AnnulusScenario inner_annulus_scenario(double twist_scale = 0.35) {
  AnnulusScenario sc;
  BundleSynthesis syn;
  auto gauge = [](double c1, double c2, const Mat& k, const Mat& l) {
    GaugeTransformation gt;
    ScalarField theta{[c1, c2](const Vec& q) { return c1 * q[0] + c2 * q[1]; },
                      [c1, c2](const Vec&, const Vec& u) {
                        return c1 * u[0] + c2 * u[1];
                      }};
    gt.g = gm_exp(theta, k);
    gt.phi.value = [l, c1](const Vec& q, const Vec& u) {
      return Mat(l * (c1 * q[1] * u[0] + 0.3 * u[1]));
    };
    gt.phi.d = [l, c1](const Vec&, const Vec& u, const Vec& v) {
      return Mat(l * (c1 * (u[1] * v[0] - v[1] * u[0])));
    };
    return gt;
  };
  syn.gauges[0] = gauge(0.30, 0.20, m2(0, 0.8, -0.8, 0.1), m2(0.2, 0, 0.1, -0.2));
  syn.gauges[1] = gauge(-0.25, 0.15, m2(0.2, 0.5, -0.5, 0), m2(0, 0.3, -0.1, 0.1));
  syn.gauges[2] = gauge(0.18, -0.22, m2(0.1, -0.6, 0.6, 0.2), m2(0.15, 0.1, 0, -0.15));
  syn.gauges[3] = gauge(-0.12, -0.3, m2(-0.2, 0.4, -0.4, 0.3), m2(0.1, -0.2, 0.2, 0));
  int idx = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      ++idx;
      double c = twist_scale * (0.5 + 0.1 * idx);
      Mat l = m2(0, 0.5 + 0.05 * idx, -(0.5 + 0.05 * idx), 0.1 * idx - 0.2);
      ScalarField f{[c](const Vec& q) { return c * (q[0] + 0.5 * q[1]); },
                    [c](const Vec&, const Vec& u) { return c * (u[0] + 0.5 * u[1]); }};
      syn.twists[{i, j}] = gm_exp(f, l);
    }
  sc.bundle = synthesize_bundle(sc.cm, annulus_atlas(), planar_flat_connection(), syn);

  // Circles of breathing radius with an extra full winding across the
  // s-family, so the left/right boundary gamma(0, .) is itself a
  // noncontractible loop and the glued element is not forced central.
  sc.gamma.sphere_mode = false;
  auto radius = [](double s) {
    return 1.15 - 0.4 * std::sin(M_PI * s) * std::sin(M_PI * s);
  };
  auto dradius = [](double s) { return -0.4 * M_PI * std::sin(2 * M_PI * s); };
  auto wind = [](double s) { return s * s * (3 - 2 * s); };
  auto dwind = [](double s) { return 6 * s * (1 - s); };
  sc.gamma.patch.map = [radius, wind](double t, double s) {
    double r = radius(s);
    double ang = 2 * M_PI * (t + wind(s));
    return p2(r * std::cos(ang), r * std::sin(ang));
  };
  sc.gamma.patch.jacobian = [radius, dradius, wind,
                             dwind](double t, double s) -> std::pair<Vec, Vec> {
    double r = radius(s), dr = dradius(s);
    double ang = 2 * M_PI * (t + wind(s)), dang = 2 * M_PI * dwind(s);
    double c = std::cos(ang), sn = std::sin(ang);
    Vec dt = p2(-2 * M_PI * r * sn, 2 * M_PI * r * c);
    Vec ds = p2(dr * c - r * sn * dang, dr * sn + r * c * dang);
    return {dt, ds};
  };
  return sc;
}

// ---------------------------------------------------------------------------
// inner-sphere: two caps over the inner module on the unit sphere; the
// gluing of a sphere-mode loop must land in ker(alpha) = {1}.

struct InnerSphereScenario {
  CrossedModule cm = inner_module(2);
  BundleData bundle;
  SurfaceLoop gamma;
};

inline InnerSphereScenario inner_sphere_scenario() {
  InnerSphereScenario sc;
  Atlas atlas;
  atlas.charts.push_back({0, [](const Vec& p) { return p[2] > -0.4; }});
  atlas.charts.push_back({1, [](const Vec& p) { return p[2] < 0.4; }});
  atlas.sample_point = [](std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec p(3);
    do {
      for (int d = 0; d < 3; ++d) p[d] = gauss(rng);
    } while (p.norm() < 1e-3);
    p /= p.norm();
    return p;
  };
  atlas.project_tangent = [](const Vec& p, const Vec& v) {
    return Vec(v - p * (p.dot(v) / p.squaredNorm()));
  };

  LocalConnection global;
  Mat k1 = m2(0, 0.6, -0.6, 0.2), k2 = m2(0.3, 0.1, -0.1, -0.3);
  global.A.value = [k1, k2](const Vec& p, const Vec& u) {
    return Mat(k1 * (p[0] * u[1]) + k2 * (p[2] * u[0]));
  };
  global.A.d = [k1, k2](const Vec&, const Vec& u, const Vec& v) {
    return Mat(k1 * (u[0] * v[1] - v[0] * u[1]) + k2 * (u[2] * v[0] - v[2] * u[0]));
  };
  Form1 a = global.A;
  global.B.value = [a](const Vec& p, const Vec& u, const Vec& v) {
    return curvature1(a, p, u, v);
  };

  BundleSynthesis syn;
  auto gauge3 = [](double c1, double c2, const Mat& k, const Mat& l) {
    GaugeTransformation gt;
    ScalarField theta{[c1, c2](const Vec& q) { return c1 * q[2] + c2 * q[0]; },
                      [c1, c2](const Vec&, const Vec& u) {
                        return c1 * u[2] + c2 * u[0];
                      }};
    gt.g = gm_exp(theta, k);
    gt.phi.value = [l](const Vec& q, const Vec& u) {
      return Mat(l * (q[1] * u[2] + 0.3 * u[0]));
    };
    gt.phi.d = [l](const Vec&, const Vec& u, const Vec& v) {
      return Mat(l * (u[1] * v[2] - v[1] * u[2]));
    };
    return gt;
  };
  syn.gauges[0] = gauge3(0.4, 0.2, m2(0, 0.7, -0.7, 0.1), m2(0.15, 0.05, -0.1, -0.15));
  syn.gauges[1] = gauge3(-0.3, 0.25, m2(0.2, -0.5, 0.5, 0), m2(0, 0.2, 0.1, 0));
  sc.bundle = synthesize_bundle(sc.cm, atlas, global, syn);

  sc.gamma.sphere_mode = true;
  SphereScenario gerbe = sphere_two_chart_scenario(0);
  sc.gamma.patch = gerbe.gamma;
  return sc;
}

inline SurfaceLoop sphere_gerbe_loop(const SphereScenario& sc) {
  SurfaceLoop loop;
  loop.patch = sc.gamma;
  loop.sphere_mode = true;
  return loop;
}

// The shear reparametrization used by the corresponding scenario:
// (t, s) -> (t + 0.2 t (1-t) s, s^2 (3 - 2 s)).
inline Reparametrization shear_reparametrization() {
  Reparametrization xi;
  xi.alpha = [](double t, double s) { return t + 0.2 * t * (1 - t) * s; };
  xi.dalpha_dt = [](double t, double s) { return 1 + 0.2 * s * (1 - 2 * t); };
  xi.dalpha_ds = [](double t, double /*s*/) { return 0.2 * t * (1 - t); };
  xi.beta = [](double s) { return s * s * (3 - 2 * s); };
  xi.dbeta = [](double s) { return 6 * s * (1 - s); };
  return xi;
}

}  // namespace scenarios
}  // namespace holo2
