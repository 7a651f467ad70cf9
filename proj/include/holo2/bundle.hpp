// Atlas, nonabelian 2-cocycle data, connection gluing data, consistency
// verifiers, and synthesis of guaranteed-consistent test bundles.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "holo2/surface_transport.hpp"

namespace holo2 {

struct BundleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Atlas {
  struct Chart {
    int id;
    std::function<bool(const Vec&)> contains;
  };
  std::vector<Chart> charts;
  // Seeded point sampler for verifier suites.
  std::function<Vec(std::mt19937_64&)> sample_point;
  // Tangent projector for manifolds embedded in a larger ambient space
  // (identity when the chart domain is an open subset of R^n).
  std::function<Vec(const Vec&, const Vec&)> project_tangent;
  // Optional overlap oracle; defaults to joint membership.
  std::function<bool(int, int, const Vec&)> overlap_oracle;

  bool contains(int id, const Vec& p) const {
    for (const auto& c : charts)
      if (c.id == id) return c.contains(p);
    return false;
  }
  bool in_overlap(int i, int j, const Vec& p) const {
    if (overlap_oracle) return overlap_oracle(i, j, p);
    return contains(i, p) && contains(j, p);
  }
  Vec tangent(const Vec& p, const Vec& v) const {
    return project_tangent ? project_tangent(p, v) : v;
  }
  std::vector<int> charts_containing(const Vec& p) const {
    std::vector<int> out;
    for (const auto& c : charts)
      if (c.contains(p)) out.push_back(c.id);
    return out;
  }
};

// The 2-bundle with 2-connection: cocycle pair (g_ij, f_ijk), chart-wise
// local connections and the h-valued gluing 1-forms a_ij. Conventions
// imposed on the data: g_ii = 1, g_ji = g_ij^-1, and f with a repeated index
// is 1_H (the accessors below normalize the degenerate cases).
struct BundleData {
  Atlas atlas;
  std::function<GroupMap(int, int)> g;       // ordered pairs, i != j
  std::function<GroupMap(int, int, int)> f;  // distinct ordered triples
  std::function<Form1(int, int)> a;          // ordered pairs, i != j
  std::map<int, LocalConnection> connections;

  GroupMap g_map(int i, int j, const CrossedModule& cm) const {
    if (i == j) return gm_const(cm.id_G());
    return g(i, j);
  }
  GroupMap f_map(int i, int j, int k, const CrossedModule& cm) const {
    if (i == j || j == k || i == k) return gm_const(cm.id_H());
    return f(i, j, k);
  }
  Mat g_val(int i, int j, const Vec& p, const CrossedModule& cm) const {
    return g_map(i, j, cm).value(p);
  }
  Mat f_val(int i, int j, int k, const Vec& p, const CrossedModule& cm) const {
    return f_map(i, j, k, cm).value(p);
  }
  Form1 a_form(int i, int j, const CrossedModule& cm) const {
    if (i == j) return zero_form1(cm.dim_H);
    return a(i, j);
  }
  const LocalConnection& conn(int i) const {
    auto it = connections.find(i);
    if (it == connections.end())
      throw BundleError("no connection for chart " + std::to_string(i));
    return it->second;
  }
};

// Draw points lying in at least `min_charts` charts.
inline std::vector<Vec> sample_overlap_points(const Atlas& atlas, int samples,
                                              uint64_t seed, int min_charts,
                                              int max_tries = 20000) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> out;
  for (int k = 0; k < max_tries && static_cast<int>(out.size()) < samples; ++k) {
    Vec p = atlas.sample_point(rng);
    if (static_cast<int>(atlas.charts_containing(p).size()) >= min_charts)
      out.push_back(p);
  }
  return out;
}

// Cocycle residuals: the triangle identity alpha(f_ijk^-1) g_ij g_jk = g_ik,
// the 2-cocycle identity g_ij |> f_jkl . f_ijl = f_ijk f_ikl, its rearranged
// form f_lkj f_lij^-1 = f_lik^-1 . g_li |> f_ikj, and the pair-inverse
// normalization g_ij g_ji = 1.
inline ResidualReport verify_cocycle(const BundleData& b, const CrossedModule& cm,
                                     int samples, uint64_t seed) {
  ResidualReport rep;
  rep.add("cocycle.triangle", 0.0);
  rep.add("cocycle.tetrahedron", 0.0);
  rep.add("cocycle.rearranged", 0.0);
  rep.add("cocycle.pair-inverse", 0.0);
  std::mt19937_64 rng(seed);
  int found = 0;
  for (int it = 0; it < 60 * samples && found < samples; ++it) {
    Vec p = b.atlas.sample_point(rng);
    auto cs = b.atlas.charts_containing(p);
    if (cs.size() < 2) continue;
    ++found;
    for (int i : cs)
      for (int j : cs) {
        if (i == j) continue;
        rep.add("cocycle.pair-inverse",
                mat_dist(b.g_val(i, j, p, cm) * b.g_val(j, i, p, cm), cm.id_G()));
        for (int k : cs) {
          if (k == i || k == j) continue;
          Mat lhs = cm.alpha_group(b.f_val(i, j, k, p, cm).inverse()) *
                    b.g_val(i, j, p, cm) * b.g_val(j, k, p, cm);
          rep.add("cocycle.triangle", mat_dist(lhs, b.g_val(i, k, p, cm)));
          for (int l : cs) {
            if (l == i || l == j || l == k) continue;
            Mat t1 = cm.act_GH(b.g_val(i, j, p, cm), b.f_val(j, k, l, p, cm)) *
                     b.f_val(i, j, l, p, cm);
            Mat t2 = b.f_val(i, j, k, p, cm) * b.f_val(i, k, l, p, cm);
            rep.add("cocycle.tetrahedron", mat_dist(t1, t2));
            Mat r1 = b.f_val(l, k, j, p, cm) * b.f_val(l, i, j, p, cm).inverse();
            Mat r2 = b.f_val(l, i, k, p, cm).inverse() *
                     cm.act_GH(b.g_val(l, i, p, cm), b.f_val(i, k, j, p, cm));
            rep.add("cocycle.rearranged", mat_dist(r1, r2));
          }
        }
      }
  }
  return rep;
}

inline Mat groupmap_derivative(const GroupMap& g, const Vec& p, const Vec& v,
                               const DerivPolicy& pol) {
  if (g.derivative) return g.derivative(p, v);
  if (!pol.allow_fd)
    throw BundleError("group map has no derivative and FD is not enabled");
  return Mat((g.value(p + pol.h * v) - g.value(p - pol.h * v)) / (2 * pol.h));
}

// Connection-gluing residuals on sampled overlaps: the compatibility identity
//   a_ij + g_ij |> a_jk = f_ijk a_ik f_ijk^-1 + A_i |> f_ijk . f_ijk^-1
//                         + d f_ijk . f_ijk^-1
// on triple overlaps, plus both gauge-link equations tying (A_i, B_i) to
// (A_j, B_j) through (g_ij, a_ij) on double overlaps.
inline ResidualReport verify_compatibility(const BundleData& b,
                                           const CrossedModule& cm, int samples,
                                           uint64_t seed,
                                           const DerivPolicy& pol = {true, 1e-5}) {
  ResidualReport rep;
  rep.add("compat.triple", 0.0);
  rep.add("compat.gauge-link-A", 0.0);
  rep.add("compat.gauge-link-B", 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int found = 0;
  for (int it = 0; it < 60 * samples && found < samples; ++it) {
    Vec p = b.atlas.sample_point(rng);
    auto cs = b.atlas.charts_containing(p);
    if (cs.size() < 2) continue;
    ++found;
    const int dim = static_cast<int>(p.size());
    Vec u(dim), v(dim);
    for (int d = 0; d < dim; ++d) {
      u[d] = gauss(rng);
      v[d] = gauss(rng);
    }
    u = b.atlas.tangent(p, u);
    v = b.atlas.tangent(p, v);
    for (int i : cs)
      for (int j : cs) {
        if (i == j) continue;
        // gauge links (pair data relates the chart connections)
        const LocalConnection &ci = b.conn(i), &cj = b.conn(j);
        Form1 aij = b.a_form(i, j, cm);
        GroupMap gij = b.g_map(i, j, cm);
        Mat gp = gij.value(p);
        Mat dg = groupmap_derivative(gij, p, u, pol);
        Mat linkA = gp * cj.A.value(p, u) * gp.inverse() -
                    (-cm.alpha_algebra(aij.value(p, u)) + ci.A.value(p, u) +
                     dg * gp.inverse());
        rep.add("compat.gauge-link-A", mat_norm(linkA));
        Mat da = aij.d ? aij.d(p, u, v) : fd_exterior_d1(aij, p, u, v, pol.h);
        Mat linkB = cm.act_Gh(gp, cj.B.value(p, u, v)) -
                    (ci.B.value(p, u, v) - da - act11(cm, ci.A, aij, p, u, v) +
                     wedge11(aij, aij, p, u, v));
        rep.add("compat.gauge-link-B", mat_norm(linkB));
        for (int k : cs) {
          if (k == i || k == j) continue;
          Form1 ajk = b.a_form(j, k, cm), aik = b.a_form(i, k, cm);
          GroupMap fijk = b.f_map(i, j, k, cm);
          Mat fp = fijk.value(p);
          Mat df = groupmap_derivative(fijk, p, u, pol);
          Mat lhs = aij.value(p, u) + cm.act_Gh(gp, ajk.value(p, u));
          Mat rhs = fp * aik.value(p, u) * fp.inverse() +
                    cm.act_gH(ci.A.value(p, u), fp) * fp.inverse() +
                    df * fp.inverse();
          rep.add("compat.triple", mat_dist(lhs, rhs));
        }
      }
  }
  return rep;
}

// Both composite 2-arrows of the cocycle tetrahedron at a point in the
// quadruple overlap; a consistent bundle makes them equal.
inline std::pair<TwoArrow, TwoArrow> tetrahedron_two_arrow(
    const BundleData& b, int i, int j, int k, int l, const Vec& p,
    const CrossedModule& cm, double check_tol = 1e-6) {
  if (!(b.atlas.contains(i, p) && b.atlas.contains(j, p) &&
        b.atlas.contains(k, p) && b.atlas.contains(l, p)))
    throw BundleError("tetrahedron point is not in the quadruple overlap");
  Mat gij = b.g_val(i, j, p, cm), gjk = b.g_val(j, k, p, cm),
      gkl = b.g_val(k, l, p, cm), gjl = b.g_val(j, l, p, cm),
      gik = b.g_val(i, k, p, cm);
  TwoArrow l1{Mat(gij * gjk * gkl), cm.act_GH(gij, b.f_val(j, k, l, p, cm))};
  TwoArrow l2{Mat(gij * gjl), b.f_val(i, j, l, p, cm)};
  TwoArrow r1{Mat(gij * gjk * gkl), b.f_val(i, j, k, p, cm)};
  TwoArrow r2{Mat(gik * gkl), b.f_val(i, k, l, p, cm)};
  return {vcompose(l1, l2, cm, check_tol), vcompose(r1, r2, cm, check_tol)};
}

// Cylinder residual over a path in the (i, j, k) triple overlap, with all
// three transition transports on the same step grid.
inline double cylinder_residual(const BundleData& b, int i, int j, int k,
                                const ParamPath& rho, const StepSpec& spec,
                                const CrossedModule& cm) {
  for (double w : {0.0, 0.31, 0.77, 1.0}) {
    Vec p = rho.map(rho.a + w * (rho.b - rho.a));
    if (!(b.atlas.contains(i, p) && b.atlas.contains(j, p) && b.atlas.contains(k, p)))
      throw BundleError("cylinder path leaves the triple overlap");
  }
  GroupMap gij = b.g_map(i, j, cm);
  GroupMap fijk = b.f_map(i, j, k, cm);
  return cylinder_residual_parts(
      b.conn(i).A, b.conn(j).A, gij.value, b.a_form(i, j, cm),
      b.a_form(j, k, cm), b.a_form(i, k, cm), fijk.value, rho, spec, cm);
}

// ---------------------------------------------------------------------------
// Synthesis of consistent bundles

// Chart data built by gauging one global connection: chart i carries
// apply_gauge(global, gauges[i]); the pair data is the composite of gauge i
// inverted with gauge j, twisted by the H-valued maps eta_ij so the cocycle
// fillers f_ijk are nontrivial. Requires alpha to be the identity map or
// trivial (otherwise f cannot be solved for) and action derivative tracking
// (trivial or conjugation action).
struct BundleSynthesis {
  std::map<int, GaugeTransformation> gauges;
  // Twists for ordered pairs i < j; the reversed pair is derived so that
  // g_ji = g_ij^-1 exactly. Missing entries mean identity.
  std::map<std::pair<int, int>, GroupMap> twists;
};

inline BundleData synthesize_bundle(const CrossedModule& cm, const Atlas& atlas,
                                    const LocalConnection& global_conn,
                                    const BundleSynthesis& syn,
                                    const DerivPolicy& pol = {}) {
  if (cm.alpha_kind == AlphaKind::general)
    throw BundleError("synthesize_bundle: unsupported module (alpha neither identity nor trivial)");
  BundleData b;
  b.atlas = atlas;
  auto gauges = std::make_shared<std::map<int, GaugeTransformation>>(syn.gauges);
  for (const auto& [id, gt] : *gauges)
    b.connections[id] = apply_gauge(global_conn, gt, cm, pol);

  auto cmc = std::make_shared<CrossedModule>(cm);
  auto twists = std::make_shared<std::map<std::pair<int, int>, GroupMap>>(syn.twists);

  auto ghat = [gauges, cmc](int i, int j) -> GroupMap {
    return gm_mul(gm_inv(gauges->at(i).g), gauges->at(j).g);
  };
  auto eta = [twists, cmc, ghat](int i, int j) -> GroupMap {
    if (i == j) return gm_const(cmc->id_H());
    auto it = twists->find({i, j});
    if (it != twists->end()) return it->second;
    auto rit = twists->find({j, i});
    if (rit != twists->end())
      return gm_act(*cmc, ghat(i, j), gm_inv(rit->second));
    return gm_const(cmc->id_H());
  };

  b.g = [cmc, ghat, eta](int i, int j) -> GroupMap {
    if (cmc->alpha_kind == AlphaKind::trivial) return ghat(i, j);
    return gm_mul(eta(i, j), ghat(i, j));
  };
  b.f = [cmc, ghat, eta](int i, int j, int k) -> GroupMap {
    return gm_mul(gm_mul(eta(i, j), gm_act(*cmc, ghat(i, j), eta(j, k))),
                  gm_inv(eta(i, k)));
  };
  auto conns = std::make_shared<std::map<int, LocalConnection>>(b.connections);
  b.a = [cmc, gauges, eta, conns](int i, int j) -> Form1 {
    GaugeTransformation gi = gauges->at(i), gj = gauges->at(j);
    GroupMap e = eta(i, j);
    Form1 Ai = conns->at(i).A;
    CrossedModule mod = *cmc;
    Form1 out;
    out.value = [gi, gj, e, Ai, mod](const Vec& p, const Vec& v) -> Mat {
      Mat gip = gi.g.value(p);
      Mat base = mod.act_Gh(Mat(gip.inverse()),
                            Mat(gj.phi.value(p, v) - gi.phi.value(p, v)));
      Mat ep = e.value(p);
      Mat ei = ep.inverse();
      return Mat(ep * base * ei + mod.act_gH(Ai.value(p, v), ep) * ei +
                 e.derivative(p, v) * ei);
    };
    return out;
  };
  return b;
}

// ---------------------------------------------------------------------------
// Two-chart abelian-gerbe sphere

struct SphereScenario {
  CrossedModule cm;
  BundleData bundle;
  SurfacePatch gamma;  // sphere-mode loop in loop space on [0,1]^2
  int flux_quanta = 0;
  cplx holonomy_oracle{1.0, 0.0};  // exp(2 pi i n)
};

// Unit sphere with north/south caps overlapping on a band. The 2-form fields
// carry total flux 2*pi*n split unevenly between the caps; a_NS restores
// consistency on the band. gamma sweeps latitude circles for s <= 1/2 and
// climbs back to the north pole along a degenerate meridian for s > 1/2, so
// both boundary rows are the constant north-pole loop.
inline SphereScenario sphere_two_chart_scenario(int n, bool consistent = true) {
  SphereScenario sc;
  sc.cm = abelian_gerbe_module();
  sc.flux_quanta = n;
  sc.holonomy_oracle = std::polar(1.0, 2.0 * M_PI * n);

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
  sc.bundle.atlas = atlas;

  // vol(p; u, v) = p . (u x v) on the unit sphere.
  auto vol = [](const Vec& p, const Vec& u, const Vec& v) -> double {
    return p[0] * (u[1] * v[2] - u[2] * v[1]) + p[1] * (u[2] * v[0] - u[0] * v[2]) +
           p[2] * (u[0] * v[1] - u[1] * v[0]);
  };
  // Transgression profile lambda(z) = c z + d (1 - z^2). The pole values
  // cancel (lambda(1) + lambda(-1) = 0), which makes the glued holonomy equal
  // exp(2 pi i n) exactly; the equator value d keeps the band transition
  // transports nontrivial.
  const double c = 0.5, d = 0.4;
  const double half_n = 0.5 * n;
  auto cap_form = [vol, c, d](double flux_coef, double sign, bool zeroed) {
    Form2 B;
    B.value = [vol, flux_coef, sign, zeroed, c, d](const Vec& p, const Vec& u,
                                                   const Vec& v) -> Mat {
      Mat m(1, 1);
      double coef = zeroed ? 0.0 : (flux_coef + sign * 0.5 * (c - 2 * d * p[2]));
      m(0, 0) = cplx(0.0, coef * vol(p, u, v));
      return m;
    };
    return B;
  };
  LocalConnection north, south;
  north.chart = 0;
  south.chart = 1;
  north.A = zero_form1(1);
  south.A = zero_form1(1);
  north.B = cap_form(half_n, -1.0, false);
  south.B = cap_form(half_n, 1.0, !consistent);
  sc.bundle.connections[0] = north;
  sc.bundle.connections[1] = south;

  sc.bundle.g = [](int, int) { return gm_const(mat_id(1)); };
  sc.bundle.f = [](int, int, int) { return gm_const(mat_id(1)); };

  // a_NS = i lambda(z) dphi with d a_NS = -i (c - 2 d z) vol = B_N - B_S.
  auto dphi = [](const Vec& p, const Vec& u) -> double {
    double rho2 = p[0] * p[0] + p[1] * p[1];
    return (p[0] * u[1] - p[1] * u[0]) / rho2;
  };
  sc.bundle.a = [dphi, vol, c, d](int i, int j) -> Form1 {
    Form1 a;
    double sign = (i == 0 && j == 1) ? 1.0 : -1.0;
    a.value = [dphi, sign, c, d](const Vec& p, const Vec& u) -> Mat {
      Mat m(1, 1);
      double lambda = c * p[2] + d * (1.0 - p[2] * p[2]);
      m(0, 0) = cplx(0.0, sign * lambda * dphi(p, u));
      return m;
    };
    a.d = [vol, sign, c, d](const Vec& p, const Vec& u, const Vec& v) -> Mat {
      Mat m(1, 1);
      m(0, 0) = cplx(0.0, -sign * (c - 2 * d * p[2]) * vol(p, u, v));
      return m;
    };
    return a;
  };

  // The colatitude climbs through a cubic smoothstep on each half, so the
  // switch from the latitude sweep to the degenerate meridian climb at
  // s = 1/2 is C^1 (both branches have vanishing s-velocity at the seam) and
  // the boundary rows stay constant.
  auto theta_of = [](double s) -> std::pair<double, double> {
    double x = s <= 0.5 ? 2 * s : 2 - 2 * s;
    double sign = s <= 0.5 ? 2.0 : -2.0;
    double w = x * x * (3 - 2 * x);
    double dw = 6 * x * (1 - x);
    return {M_PI * w, M_PI * dw * sign};
  };
  sc.gamma.t0 = 0.0;
  sc.gamma.t1 = 1.0;
  sc.gamma.s0 = 0.0;
  sc.gamma.s1 = 1.0;
  sc.gamma.map = [theta_of](double t, double s) -> Vec {
    Vec p(3);
    const double phi = 2.0 * M_PI * t;
    const double th = theta_of(s).first;
    if (s <= 0.5)
      p << std::sin(th) * std::cos(phi), std::sin(th) * std::sin(phi), std::cos(th);
    else
      p << std::sin(th), 0.0, std::cos(th);
    return p;
  };
  sc.gamma.jacobian = [theta_of](double t, double s) -> std::pair<Vec, Vec> {
    Vec dt(3), ds(3);
    const double phi = 2.0 * M_PI * t;
    auto [th, dth] = theta_of(s);
    if (s <= 0.5) {
      dt << -2.0 * M_PI * std::sin(th) * std::sin(phi),
          2.0 * M_PI * std::sin(th) * std::cos(phi), 0.0;
      ds << dth * std::cos(th) * std::cos(phi), dth * std::cos(th) * std::sin(phi),
          -dth * std::sin(th);
    } else {
      dt.setZero();
      ds << dth * std::cos(th), 0.0, -dth * std::sin(th);
    }
    return {dt, ds};
  };
  return sc;
}

}  // namespace holo2
