#include <catch2/catch_amalgamated.hpp>

#include "holo2/algebra.hpp"

using namespace holo2;

namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << cplx(a), cplx(b), cplx(c), cplx(d);
  return m;
}

std::vector<CrossedModule> builtins() {
  return {trivial_module(), abelian_gerbe_module(), inner_module(2), ab_pair_module()};
}

}  // namespace

TEST_CASE("wreath product identities") {
  for (const auto& cm : builtins()) {
    std::mt19937_64 rng(7);
    WreathElement e = wreath_id(cm);
    for (int it = 0; it < 20; ++it) {
      WreathElement a{cm.sample_G(rng), cm.sample_H(rng)};
      WreathElement left = wreath_mul(e, a, cm);
      REQUIRE(mat_dist(left.g, a.g) < 1e-12);
      REQUIRE(mat_dist(left.h, a.h) < 1e-12);
      WreathElement round = wreath_mul(a, wreath_inv(a, cm), cm);
      REQUIRE(mat_dist(round.g, cm.id_G()) < 1e-10);
      REQUIRE(mat_dist(round.h, cm.id_H()) < 1e-10);
    }
  }
}

TEST_CASE("wreath product on the inner module matches direct conjugation") {
  CrossedModule cm = inner_module(2);
  WreathElement a{mat2(1, 1, 0, 1), mat_id(2)};
  WreathElement b{mat_id(2), mat2(1, 0, 1, 1)};
  WreathElement p = wreath_mul(a, b, cm);
  REQUIRE(mat_dist(p.g, mat2(1, 1, 0, 1)) < 1e-14);
  REQUIRE(mat_dist(p.h, mat2(2, -1, 1, 0)) < 1e-14);
}

TEST_CASE("inverse on a trivial-action module is componentwise") {
  CrossedModule cm = ab_pair_module();
  std::mt19937_64 rng(3);
  WreathElement a{cm.sample_G(rng), cm.sample_H(rng)};
  WreathElement inv = wreath_inv(a, cm);
  REQUIRE(mat_dist(inv.g, Mat(a.g.inverse())) < 1e-14);
  REQUIRE(mat_dist(inv.h, Mat(a.h.inverse())) < 1e-14);
}

TEST_CASE("adjoint formula against group-level finite differences") {
  CrossedModule cm = inner_module(2);
  std::mt19937_64 rng(11);
  for (int it = 0; it < 10; ++it) {
    WreathElement a{cm.sample_G(rng), cm.sample_H(rng)};
    WreathAlgebraElement v{cm.sample_g(rng), cm.sample_h(rng)};
    WreathAlgebraElement ad = wreath_ad(a, v, cm);
    const double eps = 1e-6;
    auto at = [&](double sgn) {
      WreathElement e{expm(Mat(sgn * eps * v.x)), expm(Mat(sgn * eps * v.y))};
      return wreath_mul(wreath_mul(a, e, cm), wreath_inv(a, cm), cm);
    };
    WreathElement plus = at(1.0), minus = at(-1.0);
    Mat fd_x = (plus.g - minus.g) / (2 * eps);
    Mat fd_y = (plus.h - minus.h) / (2 * eps);
    REQUIRE(mat_dist(ad.x, fd_x) < 1e-6);
    REQUIRE(mat_dist(ad.y, fd_y) < 1e-6);
  }
  // identity acts trivially
  WreathAlgebraElement v{cm.sample_g(rng), cm.sample_h(rng)};
  WreathAlgebraElement same = wreath_ad(wreath_id(cm), v, cm);
  REQUIRE(mat_dist(same.x, v.x) < 1e-14);
  REQUIRE(mat_dist(same.y, v.y) < 1e-14);
}

TEST_CASE("vertical composition and its unit and inverse") {
  CrossedModule cm = inner_module(2);
  std::mt19937_64 rng(5);
  for (int it = 0; it < 10; ++it) {
    TwoArrow a{cm.sample_G(rng), cm.sample_H(rng)};
    TwoArrow unit = arrow_id(arrow_target(a, cm), cm);
    TwoArrow same = vcompose(a, unit, cm, 1e-9);
    REQUIRE(mat_dist(same.h, a.h) < 1e-12);

    TwoArrow inv = arrow_vinv(a, cm);
    TwoArrow round = vcompose(a, inv, cm, 1e-9);
    REQUIRE(mat_dist(round.h, cm.id_H()) < 1e-12);

    // target of a composite is computed from the product H-element
    TwoArrow b{arrow_target(a, cm), cm.sample_H(rng)};
    TwoArrow c = vcompose(a, b, cm, 1e-9);
    Mat expected = cm.alpha_group(Mat((a.h * b.h).inverse())) * a.source;
    REQUIRE(mat_dist(arrow_target(c, cm), expected) < 1e-12);
    REQUIRE(mat_dist(arrow_target(c, cm), arrow_target(b, cm)) < 1e-12);
  }
  TwoArrow a{cm.sample_G(rng), cm.sample_H(rng)};
  TwoArrow bad{Mat(2.0 * arrow_target(a, cm)), cm.sample_H(rng)};
  REQUIRE_THROWS_AS(vcompose(a, bad, cm, 1e-9), ComposeError);
}

TEST_CASE("horizontal composition, whiskering and interchange") {
  CrossedModule cm = inner_module(2);
  std::mt19937_64 rng(9);
  for (int it = 0; it < 10; ++it) {
    TwoArrow a{cm.sample_G(rng), cm.sample_H(rng)};
    TwoArrow b{cm.sample_G(rng), cm.sample_H(rng)};

    TwoArrow viaunit = hcompose(arrow_id(cm.id_G(), cm), b, cm);
    REQUIRE(mat_dist(viaunit.source, b.source) < 1e-12);
    REQUIRE(mat_dist(viaunit.h, b.h) < 1e-12);

    // horizontal composition is the wreath product of the pairs
    TwoArrow hc = hcompose(a, b, cm);
    WreathElement wm = wreath_mul({a.source, a.h}, {b.source, b.h}, cm);
    REQUIRE(mat_dist(hc.source, wm.g) < 1e-12);
    REQUIRE(mat_dist(hc.h, wm.h) < 1e-12);

    // interchange rewriting of the H-element
    Mat other = a.h * cm.act_GH(Mat(cm.alpha_group(a.h.inverse()) * a.source), b.h);
    REQUIRE(mat_dist(hc.h, other) < 1e-12);

    // whiskers
    Mat g = cm.sample_G(rng);
    TwoArrow wl = whisker_left(g, b, cm);
    REQUIRE(mat_dist(wl.h, cm.act_GH(g, b.h)) < 1e-12);
    TwoArrow wl_undo = whisker_left(Mat(g.inverse()), wl, cm);
    REQUIRE(mat_dist(wl_undo.h, b.h) < 1e-10);
    TwoArrow wr = whisker_right(a, g);
    REQUIRE(mat_dist(wr.h, a.h) == 0.0);

    // target of the horizontal composite
    Mat tgt = cm.alpha_group(Mat(hc.h.inverse())) * a.source * b.source;
    REQUIRE(mat_dist(arrow_target(hc, cm), tgt) < 1e-12);
  }
}

TEST_CASE("interchange as the compatibility of the two compositions") {
  CrossedModule cm = inner_module(2);
  std::mt19937_64 rng(13);
  for (int it = 0; it < 10; ++it) {
    // (beta #0 beta') #1 (gamma #0 gamma') = (beta #1 gamma) #0 (beta' #1 gamma')
    TwoArrow beta{cm.sample_G(rng), cm.sample_H(rng)};
    TwoArrow betap{cm.sample_G(rng), cm.sample_H(rng)};
    TwoArrow gamma{arrow_target(beta, cm), cm.sample_H(rng)};
    TwoArrow gammap{arrow_target(betap, cm), cm.sample_H(rng)};
    TwoArrow lhs = vcompose(hcompose(beta, betap, cm), hcompose(gamma, gammap, cm),
                            cm, 1e-8);
    TwoArrow rhs = hcompose(vcompose(beta, gamma, cm, 1e-8),
                            vcompose(betap, gammap, cm, 1e-8), cm);
    REQUIRE(mat_dist(lhs.h, rhs.h) < 1e-12);
  }
}

TEST_CASE("wreath associativity on random triples") {
  for (const auto& cm : builtins()) {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 20; ++it) {
      WreathElement a{cm.sample_G(rng), cm.sample_H(rng)};
      WreathElement b{cm.sample_G(rng), cm.sample_H(rng)};
      WreathElement c{cm.sample_G(rng), cm.sample_H(rng)};
      WreathElement l = wreath_mul(wreath_mul(a, b, cm), c, cm);
      WreathElement r = wreath_mul(a, wreath_mul(b, c, cm), cm);
      REQUIRE(mat_dist(l.g, r.g) < 1e-12);
      REQUIRE(mat_dist(l.h, r.h) < 1e-12);
    }
  }
}

TEST_CASE("axiom report on the built-in modules") {
  for (const auto& cm : builtins()) {
    ResidualReport rep = axioms_report(cm, 50, 42);
    INFO(cm.name);
    REQUIRE(rep.max_residual() < 1e-9);
  }
}

TEST_CASE("axiom report flags a corrupted structure map") {
  CrossedModule bad = inner_module(2);
  Mat skew = mat2(1.0, 0.05, 0.0, 1.0);
  bad.alpha_group = [skew](const Mat& h) { return Mat(h * skew); };
  ResidualReport rep = axioms_report(bad, 20, 42);
  REQUIRE(rep.get("cm.alpha-equivariance") > 1e-4);
}

TEST_CASE("equivalence invariant separates and identifies classes") {
  CrossedModule cm = inner_module(2);
  std::mt19937_64 rng(23);
  Mat h = cm.sample_H(rng);
  Mat g = cm.sample_G(rng);
  auto a = cm.equivalence_invariant(h);
  auto b = cm.equivalence_invariant(cm.act_GH(g, h));
  REQUIRE(vec_dist(a, b) < 1e-10);
  Mat other = h + 0.5 * mat_id(2);  // different trace, different class
  REQUIRE(vec_dist(a, cm.equivalence_invariant(other)) > 0.1);
}
