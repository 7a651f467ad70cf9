// Lie-algebra-valued differential forms on charts, local 2-connections,
// 2-gauge transformations and curvature / fake-flatness diagnostics.
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "holo2/algebra.hpp"
#include "holo2/matrix.hpp"

namespace holo2 {

struct ConnectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Forms are fields: point plus tangent(s) to an algebra value. Pullbacks
// happen at transport time, so no mesh or coordinate basis is committed here.
struct Form1 {
  std::function<Mat(const Vec&, const Vec&)> value;
  // Optional exterior derivative (p, u, v) -> d(form)(u, v).
  std::function<Mat(const Vec&, const Vec&, const Vec&)> d;
};

struct Form2 {
  std::function<Mat(const Vec&, const Vec&, const Vec&)> value;
  // Optional exterior derivative on tangent triples.
  std::function<Mat(const Vec&, const Vec&, const Vec&, const Vec&)> d;
};

inline Form1 zero_form1(int dim) {
  Form1 f;
  f.value = [dim](const Vec&, const Vec&) { return mat_zero(dim); };
  f.d = [dim](const Vec&, const Vec&, const Vec&) { return mat_zero(dim); };
  return f;
}

inline Form2 zero_form2(int dim) {
  Form2 f;
  f.value = [dim](const Vec&, const Vec&, const Vec&) { return mat_zero(dim); };
  f.d = [dim](const Vec&, const Vec&, const Vec&, const Vec&) { return mat_zero(dim); };
  return f;
}

// Whether finite differences may stand in for missing exterior derivatives.
struct DerivPolicy {
  bool allow_fd = false;
  double h = 1e-5;
};

// Central-difference exterior derivative of a 1-form along constant
// coordinate tangents: dK(u,v) = d_u K(v) - d_v K(u).
inline Mat fd_exterior_d1(const Form1& k, const Vec& p, const Vec& u,
                          const Vec& v, double h) {
  auto dd = [&](const Vec& dir, const Vec& arg) -> Mat {
    return (k.value(p + h * dir, arg) - k.value(p - h * dir, arg)) / (2 * h);
  };
  return dd(u, v) - dd(v, u);
}

inline Mat fd_exterior_d2(const Form2& b, const Vec& p, const Vec& u,
                          const Vec& v, const Vec& w, double h) {
  auto dd = [&](const Vec& dir, const Vec& a1, const Vec& a2) -> Mat {
    return (b.value(p + h * dir, a1, a2) - b.value(p - h * dir, a1, a2)) / (2 * h);
  };
  return dd(u, v, w) - dd(v, u, w) + dd(w, u, v);
}

inline Mat exterior_d1(const Form1& k, const Vec& p, const Vec& u, const Vec& v,
                       const DerivPolicy& pol = {}) {
  if (k.d) return k.d(p, u, v);
  if (!pol.allow_fd)
    throw ConnectionError("1-form has no exterior derivative and FD is not enabled");
  return fd_exterior_d1(k, p, u, v, pol.h);
}

inline Mat exterior_d2(const Form2& b, const Vec& p, const Vec& u, const Vec& v,
                       const Vec& w, const DerivPolicy& pol = {}) {
  if (b.d) return b.d(p, u, v, w);
  if (!pol.allow_fd)
    throw ConnectionError("2-form has no exterior derivative and FD is not enabled");
  return fd_exterior_d2(b, p, u, v, w, pol.h);
}

// (K ^ M)(u,v) = K(u)M(v) - K(v)M(u), pointwise matrix products.
inline Mat wedge11(const Form1& k, const Form1& m, const Vec& p, const Vec& u,
                   const Vec& v) {
  return k.value(p, u) * m.value(p, v) - k.value(p, v) * m.value(p, u);
}

// (K |> Psi)(u,v) for two 1-forms, K g-valued and Psi h-valued.
inline Mat act11(const CrossedModule& cm, const Form1& k, const Form1& psi,
                 const Vec& p, const Vec& u, const Vec& v) {
  return cm.act_gh(k.value(p, u), psi.value(p, v)) -
         cm.act_gh(k.value(p, v), psi.value(p, u));
}

// (K |> B)(u,v,w) for a 1-form K and a 2-form B.
inline Mat act12(const CrossedModule& cm, const Form1& k, const Form2& b,
                 const Vec& p, const Vec& u, const Vec& v, const Vec& w) {
  return cm.act_gh(k.value(p, u), b.value(p, v, w)) -
         cm.act_gh(k.value(p, v), b.value(p, u, w)) +
         cm.act_gh(k.value(p, w), b.value(p, u, v));
}

// (K |> Psi)(u,v,w) for a 2-form K and a 1-form Psi.
inline Mat act21(const CrossedModule& cm,
                 const std::function<Mat(const Vec&, const Vec&, const Vec&)>& k,
                 const Form1& psi, const Vec& p, const Vec& u, const Vec& v,
                 const Vec& w) {
  return cm.act_gh(k(p, u, v), psi.value(p, w)) -
         cm.act_gh(k(p, u, w), psi.value(p, v)) +
         cm.act_gh(k(p, v, w), psi.value(p, u));
}

// Field-level wrappers packaging the pointwise products as forms.
inline Form2 wedge(const Form1& k, const Form1& m) {
  Form2 out;
  out.value = [k, m](const Vec& p, const Vec& u, const Vec& v) {
    return wedge11(k, m, p, u, v);
  };
  return out;
}

inline Form2 form_act(const CrossedModule& cm, const Form1& k, const Form1& psi) {
  auto mod = std::make_shared<CrossedModule>(cm);
  Form2 out;
  out.value = [mod, k, psi](const Vec& p, const Vec& u, const Vec& v) {
    return act11(*mod, k, psi, p, u, v);
  };
  return out;
}

struct LocalConnection {
  Form1 A;  // g-valued
  Form2 B;  // h-valued
  int chart = -1;
};

// 1-curvature dA + A ^ A evaluated pointwise.
inline Mat curvature1(const Form1& a, const Vec& p, const Vec& u, const Vec& v,
                      const DerivPolicy& pol = {}) {
  return exterior_d1(a, p, u, v, pol) + wedge11(a, a, p, u, v);
}

// curvature1 as a field, with the derivative policy captured.
inline Form2 curvature_field(const Form1& a, const DerivPolicy& pol = {}) {
  Form2 out;
  out.value = [a, pol](const Vec& p, const Vec& u, const Vec& v) {
    return curvature1(a, p, u, v, pol);
  };
  return out;
}

// 2-curvature dB + A |> B on tangent triples.
inline Mat curvature2(const LocalConnection& conn, const CrossedModule& cm,
                      const Vec& p, const Vec& u, const Vec& v, const Vec& w,
                      const DerivPolicy& pol = {}) {
  return exterior_d2(conn.B, p, u, v, w, pol) +
         act12(cm, conn.A, conn.B, p, u, v, w);
}

// max over samples of || curvature1(A) - alpha(B) ||.
inline double fake_flatness_residual(const LocalConnection& conn,
                                     const CrossedModule& cm,
                                     const std::vector<Vec>& points,
                                     const std::vector<std::pair<Vec, Vec>>& tangents,
                                     const DerivPolicy& pol = {}) {
  double r = 0.0;
  for (const auto& p : points)
    for (const auto& [u, v] : tangents) {
      Mat lhs = curvature1(conn.A, p, u, v, pol);
      Mat rhs = cm.alpha_algebra(conn.B.value(p, u, v));
      r = std::max(r, mat_dist(lhs, rhs));
    }
  return r;
}

// ---------------------------------------------------------------------------
// Group-valued maps with tracked derivatives

// A map into a matrix group together with its directional derivative,
// composable by product rule so synthesized bundles stay analytic.
struct GroupMap {
  std::function<Mat(const Vec&)> value;
  std::function<Mat(const Vec&, const Vec&)> derivative;  // optional
};

struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<double(const Vec&, const Vec&)> derivative;
};

inline GroupMap gm_const(const Mat& m) {
  const int n = static_cast<int>(m.rows());
  GroupMap g;
  g.value = [m](const Vec&) { return m; };
  g.derivative = [n](const Vec&, const Vec&) { return mat_zero(n); };
  return g;
}

// exp(theta(p) K); exact derivative since K commutes with itself.
inline GroupMap gm_exp(const ScalarField& theta, const Mat& k) {
  GroupMap g;
  g.value = [theta, k](const Vec& p) { return expm(Mat(theta.value(p) * k)); };
  g.derivative = [theta, k](const Vec& p, const Vec& v) {
    return Mat(theta.derivative(p, v) * k * expm(Mat(theta.value(p) * k)));
  };
  return g;
}

inline GroupMap gm_mul(const GroupMap& a, const GroupMap& b) {
  GroupMap g;
  g.value = [a, b](const Vec& p) { return Mat(a.value(p) * b.value(p)); };
  if (a.derivative && b.derivative)
    g.derivative = [a, b](const Vec& p, const Vec& v) {
      return Mat(a.derivative(p, v) * b.value(p) + a.value(p) * b.derivative(p, v));
    };
  return g;
}

inline GroupMap gm_inv(const GroupMap& a) {
  GroupMap g;
  g.value = [a](const Vec& p) { return Mat(a.value(p).inverse()); };
  if (a.derivative)
    g.derivative = [a](const Vec& p, const Vec& v) {
      Mat ai = a.value(p).inverse();
      return Mat(-ai * a.derivative(p, v) * ai);
    };
  return g;
}

// a |> b for modules whose action is conjugation or trivial; these are the
// cases where the derivative stays expressible by the product rule.
inline GroupMap gm_act(const CrossedModule& cm, const GroupMap& a, const GroupMap& b) {
  if (cm.action_kind == ActionKind::trivial) return b;
  if (cm.action_kind == ActionKind::conjugation)
    return gm_mul(gm_mul(a, b), gm_inv(a));
  throw AlgebraError("gm_act: derivative tracking needs trivial or conjugation action");
}

// ---------------------------------------------------------------------------
// 2-gauge transformations

// Pair (g, phi): g a G-valued function with derivative, phi an h-valued
// 1-form. Applied to (A, B) it produces (A', B') with
//   A' = Ad_{g^-1}( A - alpha(phi) + dg g^-1 )
//   B' = g^-1 |> ( B - d phi - A |> phi + phi ^ phi ).
struct GaugeTransformation {
  GroupMap g;
  Form1 phi;
};

inline GaugeTransformation identity_gauge(const CrossedModule& cm) {
  return {gm_const(cm.id_G()), zero_form1(cm.dim_H)};
}

inline LocalConnection apply_gauge(const LocalConnection& conn,
                                   const GaugeTransformation& gt,
                                   const CrossedModule& cm,
                                   const DerivPolicy& pol = {}) {
  if (!gt.g.derivative && !pol.allow_fd)
    throw ConnectionError("apply_gauge: gauge map has no derivative and FD is not enabled");
  GroupMap g = gt.g;
  if (!g.derivative) {
    auto val = g.value;
    double h = pol.h;
    g.derivative = [val, h](const Vec& p, const Vec& v) {
      return Mat((val(p + h * v) - val(p - h * v)) / (2 * h));
    };
  }
  Form1 phi = gt.phi;
  if (!phi.d) {
    if (!pol.allow_fd)
      throw ConnectionError("apply_gauge: phi has no exterior derivative and FD is not enabled");
    auto base = phi;
    double h = pol.h;
    phi.d = [base, h](const Vec& p, const Vec& u, const Vec& v) {
      return fd_exterior_d1(base, p, u, v, h);
    };
  }
  Form1 a = conn.A;
  Form2 b = conn.B;
  LocalConnection out;
  out.chart = conn.chart;
  out.A.value = [a, phi, g, cm](const Vec& p, const Vec& v) {
    Mat gp = g.value(p);
    Mat gi = gp.inverse();
    Mat val = a.value(p, v) - cm.alpha_algebra(phi.value(p, v)) +
              g.derivative(p, v) * gi;
    return Mat(gi * val * gp);
  };
  out.B.value = [a, b, phi, g, cm](const Vec& p, const Vec& u, const Vec& v) {
    Mat val = b.value(p, u, v) - phi.d(p, u, v) - act11(cm, a, phi, p, u, v) +
              wedge11(phi, phi, p, u, v);
    return cm.act_Gh(Mat(g.value(p).inverse()), val);
  };
  return out;
}

// Inverse transformation (g^-1, -g^-1 |> phi).
inline GaugeTransformation inverse_gauge(const GaugeTransformation& gt,
                                         const CrossedModule& cm) {
  GaugeTransformation out;
  out.g = gm_inv(gt.g);
  GroupMap ginv = out.g;
  Form1 phi = gt.phi;
  out.phi.value = [ginv, phi, cm](const Vec& p, const Vec& v) {
    return Mat(-cm.act_Gh(ginv.value(p), phi.value(p, v)));
  };
  return out;
}

// Composite of (g1, phi1) followed by (g2, phi2): (g1 g2, phi1 + g1 |> phi2).
inline GaugeTransformation compose_gauge(const GaugeTransformation& first,
                                         const GaugeTransformation& second,
                                         const CrossedModule& cm) {
  GaugeTransformation out;
  out.g = gm_mul(first.g, second.g);
  GroupMap g1 = first.g;
  Form1 p1 = first.phi, p2 = second.phi;
  out.phi.value = [g1, p1, p2, cm](const Vec& p, const Vec& v) {
    return Mat(p1.value(p, v) + cm.act_Gh(g1.value(p), p2.value(p, v)));
  };
  return out;
}

// Max residual of the two curvature transformation laws at sample points:
//   curvature1(A') - alpha(B')     = Ad_{g^-1}( curvature1(A) - alpha(B) )
//   curvature2(A',B')              = g^-1 |> curvature2(A,B)
//                                    + (curvature1(A') - alpha(B')) |> phi.
inline double curvature_covariance_residual(
    const LocalConnection& conn, const GaugeTransformation& gt,
    const CrossedModule& cm, const std::vector<Vec>& points,
    const std::vector<std::vector<Vec>>& frames, const DerivPolicy& pol) {
  LocalConnection prime = apply_gauge(conn, gt, cm, pol);
  DerivPolicy fd{true, pol.h};
  double r = 0.0;
  for (const auto& p : points) {
    Mat gi = gt.g.value(p).inverse();
    for (const auto& fr : frames) {
      if (fr.size() < 2) continue;
      const Vec &u = fr[0], &v = fr[1];
      Mat fake = curvature1(conn.A, p, u, v, pol) -
                 cm.alpha_algebra(conn.B.value(p, u, v));
      Mat fake_p = curvature1(prime.A, p, u, v, fd) -
                   cm.alpha_algebra(prime.B.value(p, u, v));
      r = std::max(r, mat_dist(fake_p, gi * fake * gt.g.value(p)));
      if (fr.size() >= 3) {
        const Vec& w = fr[2];
        Mat om2 = curvature2(conn, cm, p, u, v, w, pol);
        Mat om2_p = curvature2(prime, cm, p, u, v, w, fd);
        auto fake_p_field = [&](const Vec& pp, const Vec& a1, const Vec& a2) {
          return Mat(curvature1(prime.A, pp, a1, a2, fd) -
                     cm.alpha_algebra(prime.B.value(pp, a1, a2)));
        };
        Mat corr = act21(cm, fake_p_field, gt.phi, p, u, v, w);
        r = std::max(r, mat_dist(om2_p, Mat(cm.act_Gh(gi, om2) + corr)));
      }
    }
  }
  return r;
}

}  // namespace holo2
