// Crossed modules, the wreath product G x| H and the one-object strict
// 2-groupoid whose 2-arrows carry all holonomy values.
#pragma once

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "holo2/matrix.hpp"

namespace holo2 {

struct AlgebraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ActionKind { trivial, conjugation, general };
enum class AlphaKind { identity_map, trivial, general };

// A crossed module (G, H, alpha, |>) of matrix groups together with its
// differential: alpha_group maps H -> G, the four action maps cover the
// group/algebra combinations induced by differentiation, and
// equivalence_invariant is a class function for the G-action on H used by
// the H/[G,H] tests. Membership checks return residuals (0 = member).
struct CrossedModule {
  std::string name;
  int dim_G = 1;
  int dim_H = 1;
  double tolerance = 1e-9;
  ActionKind action_kind = ActionKind::general;
  AlphaKind alpha_kind = AlphaKind::general;

  std::function<double(const Mat&)> membership_G;
  std::function<double(const Mat&)> membership_H;
  std::function<Mat(const Mat&)> alpha_group;    // H -> G
  std::function<Mat(const Mat&)> alpha_algebra;  // Lie(H) -> Lie(G)
  std::function<Mat(const Mat&, const Mat&)> act_GH;  // g |> h
  std::function<Mat(const Mat&, const Mat&)> act_Gh;  // g |> y, y in Lie(H)
  std::function<Mat(const Mat&, const Mat&)> act_gH;  // x |> h, x in Lie(G)
  std::function<Mat(const Mat&, const Mat&)> act_gh;  // x |> y

  std::function<std::vector<double>(const Mat&)> equivalence_invariant;

  std::function<Mat(std::mt19937_64&)> sample_G, sample_H;  // group samplers
  std::function<Mat(std::mt19937_64&)> sample_g, sample_h;  // algebra samplers

  Mat id_G() const { return mat_id(dim_G); }
  Mat id_H() const { return mat_id(dim_H); }
  Mat zero_g() const { return mat_zero(dim_G); }
  Mat zero_h() const { return mat_zero(dim_H); }

  bool in_G(const Mat& g) const { return membership_G(g) <= tolerance; }
  bool in_H(const Mat& h) const { return membership_H(h) <= tolerance; }
};

// ---------------------------------------------------------------------------
// Built-in crossed modules

// G = H = {1}.
inline CrossedModule trivial_module() {
  CrossedModule cm;
  cm.name = "trivial";
  cm.dim_G = cm.dim_H = 1;
  cm.action_kind = ActionKind::trivial;
  cm.alpha_kind = AlphaKind::trivial;
  cm.membership_G = [](const Mat& g) { return mat_dist(g, mat_id(1)); };
  cm.membership_H = cm.membership_G;
  cm.alpha_group = [](const Mat&) { return mat_id(1); };
  cm.alpha_algebra = [](const Mat&) { return mat_zero(1); };
  cm.act_GH = [](const Mat&, const Mat& h) { return h; };
  cm.act_Gh = [](const Mat&, const Mat& y) { return y; };
  cm.act_gH = [](const Mat&, const Mat&) { return mat_zero(1); };
  cm.act_gh = [](const Mat&, const Mat&) { return mat_zero(1); };
  cm.equivalence_invariant = [](const Mat& h) { return flatten_entries(h); };
  cm.sample_G = [](std::mt19937_64&) { return mat_id(1); };
  cm.sample_H = cm.sample_G;
  cm.sample_g = [](std::mt19937_64&) { return mat_zero(1); };
  cm.sample_h = cm.sample_g;
  return cm;
}

// G = {1}, H = U(1), alpha trivial, action trivial.
inline CrossedModule abelian_gerbe_module() {
  CrossedModule cm;
  cm.name = "abelian-gerbe";
  cm.dim_G = cm.dim_H = 1;
  cm.action_kind = ActionKind::trivial;
  cm.alpha_kind = AlphaKind::trivial;
  cm.membership_G = [](const Mat& g) { return mat_dist(g, mat_id(1)); };
  cm.membership_H = [](const Mat& h) {
    return std::abs(std::abs(h(0, 0)) - 1.0);
  };
  cm.alpha_group = [](const Mat&) { return mat_id(1); };
  cm.alpha_algebra = [](const Mat&) { return mat_zero(1); };
  cm.act_GH = [](const Mat&, const Mat& h) { return h; };
  cm.act_Gh = [](const Mat&, const Mat& y) { return y; };
  cm.act_gH = [](const Mat&, const Mat&) { return mat_zero(1); };
  cm.act_gh = [](const Mat&, const Mat&) { return mat_zero(1); };
  cm.equivalence_invariant = [](const Mat& h) { return flatten_entries(h); };
  cm.sample_G = [](std::mt19937_64&) { return mat_id(1); };
  cm.sample_H = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3.14, 3.14);
    Mat h(1, 1);
    h(0, 0) = std::polar(1.0, u(rng));
    return h;
  };
  cm.sample_g = [](std::mt19937_64&) { return mat_zero(1); };
  cm.sample_h = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat y(1, 1);
    y(0, 0) = cplx(0.0, u(rng));
    return y;
  };
  return cm;
}

// G = H = GL(n, R), alpha = id, g |> h = g h g^-1.
inline CrossedModule inner_module(int n) {
  CrossedModule cm;
  cm.name = "inner-" + std::to_string(n);
  cm.dim_G = cm.dim_H = n;
  cm.action_kind = ActionKind::conjugation;
  cm.alpha_kind = AlphaKind::identity_map;
  auto member = [](const Mat& m) {
    if (!mat_finite(m)) return 1.0;
    double imag = 0.0;
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) imag = std::max(imag, std::abs(m(i, j).imag()));
    double det = std::abs(m.determinant());
    return imag + (det > 1e-8 ? 0.0 : 1.0);
  };
  cm.membership_G = member;
  cm.membership_H = member;
  cm.alpha_group = [](const Mat& h) { return h; };
  cm.alpha_algebra = [](const Mat& y) { return y; };
  cm.act_GH = [](const Mat& g, const Mat& h) { return Mat(g * h * g.inverse()); };
  cm.act_Gh = [](const Mat& g, const Mat& y) { return Mat(g * y * g.inverse()); };
  cm.act_gH = [](const Mat& x, const Mat& h) { return Mat(x * h - h * x); };
  cm.act_gh = [](const Mat& x, const Mat& y) { return commutator(x, y); };
  // H/[G,H] for the conjugation module is GL(n)/SL(n): the determinant is a
  // complete class invariant (conjugation orbits are strictly finer and are
  // not preserved by the boundary-row moves of the gluing).
  cm.equivalence_invariant = [](const Mat& h) {
    cplx det = h.determinant();
    return std::vector<double>{det.real(), det.imag()};
  };
  cm.sample_g = [n](std::mt19937_64& rng) { return random_real_mat(n, rng, 0.6); };
  cm.sample_h = cm.sample_g;
  cm.sample_G = [n](std::mt19937_64& rng) { return expm(random_real_mat(n, rng, 0.6)); };
  cm.sample_H = cm.sample_G;
  return cm;
}

// G = H = R_{>0} (1x1), alpha = id, action trivial.
inline CrossedModule ab_pair_module() {
  CrossedModule cm;
  cm.name = "ab-pair";
  cm.dim_G = cm.dim_H = 1;
  cm.action_kind = ActionKind::trivial;
  cm.alpha_kind = AlphaKind::identity_map;
  auto member = [](const Mat& m) {
    double im = std::abs(m(0, 0).imag());
    return im + (m(0, 0).real() > 0.0 ? 0.0 : 1.0);
  };
  cm.membership_G = member;
  cm.membership_H = member;
  cm.alpha_group = [](const Mat& h) { return h; };
  cm.alpha_algebra = [](const Mat& y) { return y; };
  cm.act_GH = [](const Mat&, const Mat& h) { return h; };
  cm.act_Gh = [](const Mat&, const Mat& y) { return y; };
  cm.act_gH = [](const Mat&, const Mat&) { return mat_zero(1); };
  cm.act_gh = [](const Mat&, const Mat&) { return mat_zero(1); };
  cm.equivalence_invariant = [](const Mat& h) { return flatten_entries(h); };
  cm.sample_G = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat g(1, 1);
    g(0, 0) = std::exp(u(rng));
    return g;
  };
  cm.sample_H = cm.sample_G;
  cm.sample_g = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat x(1, 1);
    x(0, 0) = u(rng);
    return x;
  };
  cm.sample_h = cm.sample_g;
  return cm;
}

// ---------------------------------------------------------------------------
// Wreath product and 2-arrows

// Element (g, h) of G x| H; the product (g1,h1)(g2,h2) = (g1 g2, g1|>h2 . h1)
// is horizontal composition of 2-arrows.
struct WreathElement {
  Mat g;
  Mat h;
};

// Element (x, y) of the wreath Lie algebra.
struct WreathAlgebraElement {
  Mat x;
  Mat y;
};

inline WreathElement wreath_id(const CrossedModule& cm) {
  return {cm.id_G(), cm.id_H()};
}

inline WreathElement wreath_mul(const WreathElement& a, const WreathElement& b,
                                const CrossedModule& cm) {
  return {Mat(a.g * b.g), Mat(cm.act_GH(a.g, b.h) * a.h)};
}

inline WreathElement wreath_inv(const WreathElement& a, const CrossedModule& cm) {
  Mat gi = a.g.inverse();
  return {gi, cm.act_GH(gi, a.h.inverse())};
}

// Adjoint action of (g,h) on (X,Y):
//   Ad_(g,h)(X,Y) = (Ad_g X, (Ad_g X)|>h^-1 . h + Ad_{h^-1}(g|>Y)).
inline WreathAlgebraElement wreath_ad(const WreathElement& a,
                                      const WreathAlgebraElement& v,
                                      const CrossedModule& cm) {
  Mat adx = a.g * v.x * a.g.inverse();
  Mat hinv = a.h.inverse();
  Mat y = cm.act_gH(adx, hinv) * a.h + hinv * cm.act_Gh(a.g, v.y) * a.h;
  return {adx, y};
}

// A 2-arrow (g, h): source g, target alpha(h^-1) g.
struct TwoArrow {
  Mat source;
  Mat h;
};

inline Mat arrow_target(const TwoArrow& a, const CrossedModule& cm) {
  return cm.alpha_group(a.h.inverse()) * a.source;
}

inline TwoArrow arrow_id(const Mat& g, const CrossedModule& cm) {
  return {g, cm.id_H()};
}

// Inverse for vertical composition: source alpha(h^-1) g, element h^-1.
inline TwoArrow arrow_vinv(const TwoArrow& a, const CrossedModule& cm) {
  return {arrow_target(a, cm), a.h.inverse()};
}

struct ComposeError : AlgebraError {
  double mismatch;
  explicit ComposeError(double m)
      : AlgebraError("2-arrows not 1-composable, mismatch norm " +
                     std::to_string(m)),
        mismatch(m) {}
};

// Vertical composition (g,h) #1 (g',h') = (g, h h'); requires
// g' = alpha(h^-1) g within check_tol (skipped when check_tol < 0).
inline TwoArrow vcompose(const TwoArrow& a, const TwoArrow& b,
                         const CrossedModule& cm, double check_tol = 1e-8) {
  if (check_tol >= 0) {
    double mismatch = mat_dist(arrow_target(a, cm), b.source);
    if (mismatch > check_tol) throw ComposeError(mismatch);
  }
  return {a.source, Mat(a.h * b.h)};
}

// Horizontal composition: the wreath product on the underlying pairs.
inline TwoArrow hcompose(const TwoArrow& a, const TwoArrow& b,
                         const CrossedModule& cm) {
  return {Mat(a.source * b.source), Mat(cm.act_GH(a.source, b.h) * a.h)};
}

inline TwoArrow whisker_left(const Mat& g, const TwoArrow& b,
                             const CrossedModule& cm) {
  return {Mat(g * b.source), cm.act_GH(g, b.h)};
}

// Whiskering from the right leaves the H-element unchanged.
inline TwoArrow whisker_right(const TwoArrow& a, const Mat& g) {
  return {Mat(a.source * g), a.h};
}

// ---------------------------------------------------------------------------
// Axiom residual report

struct ResidualRecord {
  std::string name;
  double residual = 0.0;
};

struct ResidualReport {
  std::vector<ResidualRecord> records;
  void add(const std::string& name, double r) {
    for (auto& rec : records)
      if (rec.name == name) {
        rec.residual = std::max(rec.residual, r);
        return;
      }
    records.push_back({name, r});
  }
  double max_residual() const {
    double m = 0;
    for (const auto& r : records) m = std::max(m, r.residual);
    return m;
  }
  double get(const std::string& name) const {
    for (const auto& r : records)
      if (r.name == name) return r.residual;
    return -1.0;
  }
};

// Max residuals of the crossed-module and 2-groupoid identities over seeded
// pseudo-random samples: equivariance of alpha, the Peiffer identity, action
// axioms, their differentials, wreath associativity/inverse, the adjoint
// formula against a finite difference on the group, the interchange law and
// the class-function property of equivalence_invariant.
inline ResidualReport axioms_report(const CrossedModule& cm, int samples,
                                    uint64_t seed) {
  ResidualReport rep;
  std::mt19937_64 rng(seed);
  for (int it = 0; it < samples; ++it) {
    Mat g = cm.sample_G(rng), g2 = cm.sample_G(rng);
    Mat h = cm.sample_H(rng), h2 = cm.sample_H(rng);
    Mat x = cm.sample_g(rng);
    Mat u = cm.sample_h(rng), v = cm.sample_h(rng);

    // alpha(g|>h) = g alpha(h) g^-1
    rep.add("cm.alpha-equivariance",
            mat_dist(cm.alpha_group(cm.act_GH(g, h)),
                     g * cm.alpha_group(h) * g.inverse()));
    // alpha(f) |> h = f h f^-1
    rep.add("cm.peiffer",
            mat_dist(cm.act_GH(cm.alpha_group(h2), h), h2 * h * h2.inverse()));
    // (g g') |> h = g |> (g' |> h)
    rep.add("cm.action-mul",
            mat_dist(cm.act_GH(g * g2, h), cm.act_GH(g, cm.act_GH(g2, h))));
    // g |> (h h') = (g|>h)(g|>h')
    rep.add("cm.action-hom",
            mat_dist(cm.act_GH(g, h * h2),
                     cm.act_GH(g, h) * cm.act_GH(g, h2)));
    // differential Peiffer: alpha(x |> u) = [x, alpha(u)]
    rep.add("cm.diff-peiffer-1",
            mat_dist(cm.alpha_algebra(cm.act_gh(x, u)),
                     commutator(x, cm.alpha_algebra(u))));
    // alpha(v) |> u = [v, u]
    rep.add("cm.diff-peiffer-2",
            mat_dist(cm.act_gh(cm.alpha_algebra(v), u), commutator(v, u)));
    // x |> 1_H = 0
    rep.add("cm.act-identity-zero", mat_norm(cm.act_gH(x, cm.id_H())));
    // alpha differential consistency: alpha(exp(eps u)) ~ exp(eps alpha(u))
    {
      const double eps = 1e-5;
      Mat lhs = cm.alpha_group(expm(Mat(eps * u)));
      Mat rhs = expm(Mat(eps * cm.alpha_algebra(u)));
      rep.add("cm.alpha-differential", mat_dist(lhs, rhs) / eps);
    }
    // induced action consistency: g |> exp(eps u) ~ exp(eps g|>u)
    {
      const double eps = 1e-5;
      Mat lhs = cm.act_GH(g, expm(Mat(eps * u)));
      Mat rhs = expm(Mat(eps * cm.act_Gh(g, u)));
      rep.add("cm.induced-action", mat_dist(lhs, rhs) / eps);
    }

    // wreath product: associativity and inverse
    WreathElement A{g, h}, B{g2, h2}, C{cm.sample_G(rng), cm.sample_H(rng)};
    rep.add("wreath.assoc",
            mat_dist(wreath_mul(wreath_mul(A, B, cm), C, cm).h,
                     wreath_mul(A, wreath_mul(B, C, cm), cm).h) +
                mat_dist(wreath_mul(wreath_mul(A, B, cm), C, cm).g,
                         wreath_mul(A, wreath_mul(B, C, cm), cm).g));
    {
      WreathElement r = wreath_mul(A, wreath_inv(A, cm), cm);
      rep.add("wreath.inverse", mat_dist(r.g, cm.id_G()) + mat_dist(r.h, cm.id_H()));
    }
    // adjoint formula vs central difference of wreath conjugation
    {
      const double eps = 1e-5;
      WreathAlgebraElement V{x, u};
      WreathAlgebraElement ad = wreath_ad(A, V, cm);
      auto conj = [&](double sgn) {
        WreathElement E{expm(Mat(sgn * eps * x)), expm(Mat(sgn * eps * u))};
        return wreath_mul(wreath_mul(A, E, cm), wreath_inv(A, cm), cm);
      };
      WreathElement plus = conj(1.0), minus = conj(-1.0);
      Mat fd_x = (plus.g - minus.g) / (2 * eps);
      Mat fd_y = (plus.h - minus.h) / (2 * eps);
      rep.add("wreath.ad-fd", mat_dist(ad.x, fd_x) + mat_dist(ad.y, fd_y));
    }
    // interchange law: g|>h' . h = h . [alpha(h^-1) g] |> h'
    rep.add("groupoid.interchange",
            mat_dist(cm.act_GH(g, h2) * h,
                     h * cm.act_GH(cm.alpha_group(h.inverse()) * g, h2)));
    // equivalence invariant is a class function
    {
      auto a1 = cm.equivalence_invariant(h);
      auto a2 = cm.equivalence_invariant(cm.act_GH(g, h));
      rep.add("cm.invariant-class-function", vec_dist(a1, a2));
    }
  }
  return rep;
}

}  // namespace holo2
