// Local 2-holonomy on a rectangular patch, its two composition laws, and the
// gauge-cube and cylinder verifications.
#pragma once

#include <functional>
#include <vector>

#include "holo2/path_transport.hpp"

namespace holo2 {

struct LocalTwoHolonomy {
  TwoArrow arrow;  // source F(bottom) F(right edge), H-element of the patch
  Mat H;           // the raw surface-ordered integral
  Mat F_bot, F_top, F_left, F_right;
  SurfacePatch patch;
  StepSpec spec;
  int n_t = 0, n_s = 0;
  double target_residual = 0.0;  // || alpha(H^-1) source - F(left)F(top) ||
};

// Surface-ordered integral: integrates dH/ds = H . B_t(s) with H(t, s0) = 1.
// One left-edge transport on the half-step grid plus one incremental row
// sweep per required s keep the patch cost at O(steps^2).
inline LocalTwoHolonomy local_2_holonomy(const LocalConnection& conn,
                                         const SurfacePatch& patch,
                                         const StepSpec& spec,
                                         const CrossedModule& cm,
                                         int n_t_override = -1,
                                         int n_s_override = -1) {
  LocalTwoHolonomy out;
  out.patch = patch;
  out.spec = spec;
  const double wt = patch.t1 - patch.t0, ws = patch.s1 - patch.s0;
  out.n_t = n_t_override > 0 ? n_t_override : std::max(2, steps_for(spec, wt));
  out.n_s = n_s_override > 0 ? n_s_override : std::max(2, steps_for(spec, ws));

  const bool degenerate_t = wt <= 0.0, degenerate_s = ws <= 0.0;

  // Edge transports (identity on degenerate edges).
  ParamPath bot = row_path(patch, patch.s0, patch.t0, patch.t1);
  ParamPath top = row_path(patch, patch.s1, patch.t0, patch.t1);
  ParamPath lft = col_path(patch, patch.t0, patch.s0, patch.s1);
  ParamPath rgt = col_path(patch, patch.t1, patch.s0, patch.s1);
  out.F_bot = degenerate_t ? cm.id_G() : holonomy1(conn.A, bot, spec, {}, out.n_t).endpoint;
  out.F_top = degenerate_t ? cm.id_G() : holonomy1(conn.A, top, spec, {}, out.n_t).endpoint;
  out.F_left = degenerate_s ? cm.id_G() : holonomy1(conn.A, lft, spec, {}, out.n_s).endpoint;
  out.F_right = degenerate_s ? cm.id_G() : holonomy1(conn.A, rgt, spec, {}, out.n_s).endpoint;

  if (degenerate_t || degenerate_s) {
    out.H = cm.id_H();
    out.arrow = {Mat(out.F_bot * out.F_right), out.H};
    out.target_residual = mat_dist(arrow_target(out.arrow, cm), Mat(out.F_left * out.F_top));
    return out;
  }

  // Left-edge transports on the half-step grid in s.
  auto left_trace = holonomy1(conn.A, lft, spec, {}, 2 * out.n_s).trace;

  std::vector<Mat> b_cache(2 * out.n_s + 1);
  std::vector<bool> b_have(2 * out.n_s + 1, false);
  const double hs = ws / out.n_s;
  auto kern = [&](const Mat& f, const Vec& p, const Vec& ut, const Vec& us) {
    return cm.act_Gh(f, conn.B.value(p, ut, us));
  };
  auto b_at = [&](double s) -> const Mat& {
    int m = static_cast<int>(std::lround((s - patch.s0) / (hs / 2)));
    m = std::min(std::max(m, 0), 2 * out.n_s);
    if (!b_have[m]) {
      b_cache[m] = transported_row_integral(conn.A, patch, patch.t1,
                                            patch.s0 + m * hs / 2,
                                            left_trace[m].second, spec, out.n_t, kern);
      b_have[m] = true;
    }
    return b_cache[m];
  };
  auto f = [&](double s, const Mat& y) -> Mat { return y * b_at(s); };
  Mat H = cm.id_H();
  for (int k = 0; k < out.n_s; ++k) {
    H = ode_step(H, patch.s0 + k * hs, hs, spec.method, f);
    if (!mat_finite(H))
      throw TransportError("non-finite surface transport at s=" +
                           std::to_string(patch.s0 + (k + 1) * hs));
  }
  out.H = H;
  out.arrow = {Mat(out.F_bot * out.F_right), H};
  out.target_residual =
      mat_dist(arrow_target(out.arrow, cm), Mat(out.F_left * out.F_top));
  return out;
}

struct ComposedLocal {
  TwoArrow arrow;
  Mat H;
  double two_route_residual = 0.0;  // composition formula vs union patch
};

struct AdjacencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Horizontal composition of adjacent patches sharing a vertical edge:
//   H(t+t', s) = F(bottom of left) |> H_right . H_left,
// with the two-route residual against a union-patch evaluation on the summed
// step grid.
inline ComposedLocal hcompose_local(const LocalConnection& conn,
                                    const LocalTwoHolonomy& left,
                                    const LocalTwoHolonomy& right,
                                    const CrossedModule& cm,
                                    bool two_route = true) {
  if (std::abs(left.patch.t1 - right.patch.t0) > 1e-12 ||
      std::abs(left.patch.s0 - right.patch.s0) > 1e-12 ||
      std::abs(left.patch.s1 - right.patch.s1) > 1e-12)
    throw AdjacencyError("hcompose_local: patches are not horizontally adjacent");
  ComposedLocal out;
  out.H = cm.act_GH(left.F_bot, right.H) * left.H;
  out.arrow = {Mat(left.F_bot * right.F_bot * right.F_right), out.H};
  if (two_route) {
    SurfacePatch u = left.patch;
    u.t1 = right.patch.t1;
    auto direct = local_2_holonomy(conn, u, left.spec, cm, left.n_t + right.n_t,
                                   left.n_s);
    out.two_route_residual = mat_dist(out.H, direct.H);
  }
  return out;
}

// Vertical composition of patches sharing a horizontal edge:
//   H(t, s+s') = H_bottom . F(left of bottom) |> H_top.
inline ComposedLocal vcompose_local(const LocalConnection& conn,
                                    const LocalTwoHolonomy& bottom,
                                    const LocalTwoHolonomy& top,
                                    const CrossedModule& cm,
                                    bool two_route = true) {
  if (std::abs(bottom.patch.s1 - top.patch.s0) > 1e-12 ||
      std::abs(bottom.patch.t0 - top.patch.t0) > 1e-12 ||
      std::abs(bottom.patch.t1 - top.patch.t1) > 1e-12)
    throw AdjacencyError("vcompose_local: patches are not vertically adjacent");
  ComposedLocal out;
  out.H = bottom.H * cm.act_GH(bottom.F_left, top.H);
  out.arrow = {Mat(bottom.F_bot * bottom.F_right * top.F_right), out.H};
  if (two_route) {
    SurfacePatch u = bottom.patch;
    u.s1 = top.patch.s1;
    auto direct = local_2_holonomy(conn, u, bottom.spec, cm, bottom.n_t,
                                   bottom.n_s + top.n_s);
    out.two_route_residual = mat_dist(out.H, direct.H);
  }
  return out;
}

// Commutative-cube residual for a gauge transformation applied to a patch:
//   g(corner) |> H_{A',B'} = h(gamma^+)^-1 . H_{A,B} . h(gamma^-),
// where h(gamma^+) and h(gamma^-) are assembled from edge gauge transports by
// the transport composition law.
inline double gauge_cube_residual(const LocalConnection& conn,
                                  const GaugeTransformation& gt,
                                  const SurfacePatch& patch,
                                  const StepSpec& spec, const CrossedModule& cm,
                                  const DerivPolicy& pol = {}) {
  LocalConnection prime = apply_gauge(conn, gt, cm, pol);
  Mat H = local_2_holonomy(conn, patch, spec, cm).H;
  Mat Hp = local_2_holonomy(prime, patch, spec, cm).H;

  ParamPath bot = row_path(patch, patch.s0, patch.t0, patch.t1);
  ParamPath top = row_path(patch, patch.s1, patch.t0, patch.t1);
  ParamPath lft = col_path(patch, patch.t0, patch.s0, patch.s1);
  ParamPath rgt = col_path(patch, patch.t1, patch.s0, patch.s1);

  Mat F_bot = holonomy1(conn.A, bot, spec).endpoint;
  Mat F_left = holonomy1(conn.A, lft, spec).endpoint;
  Mat h_bot = gauge_transport_h(conn.A, gt.phi, bot, spec, cm).endpoint;
  Mat h_top = gauge_transport_h(conn.A, gt.phi, top, spec, cm).endpoint;
  Mat h_left = gauge_transport_h(conn.A, gt.phi, lft, spec, cm).endpoint;
  Mat h_right = gauge_transport_h(conn.A, gt.phi, rgt, spec, cm).endpoint;

  Mat h_plus = cm.act_GH(F_bot, h_right) * h_bot;
  Mat h_minus = cm.act_GH(F_left, h_top) * h_left;

  Mat lhs = cm.act_GH(gt.g.value(patch.map(patch.t0, patch.s0)), Hp);
  Mat rhs = h_plus.inverse() * H * h_minus;
  return mat_dist(lhs, rhs);
}

// Compatibility-cylinder residual for three transition 2-arrows along a path
// in a triple overlap:
//   g_ij(x) |> psi_jk = psi_ij^-1 . F_{A_i}(rho) |> f_ijk(y) . psi_ik . f_ijk(x)^-1.
inline double cylinder_residual_parts(
    const Form1& A_i, const Form1& A_j,
    const std::function<Mat(const Vec&)>& g_ij, const Form1& a_ij,
    const Form1& a_jk, const Form1& a_ik,
    const std::function<Mat(const Vec&)>& f_ijk, const ParamPath& rho,
    const StepSpec& spec, const CrossedModule& cm) {
  Vec x = rho.map(rho.a), y = rho.map(rho.b);
  Mat psi_ij = gauge_transport_h(A_i, a_ij, rho, spec, cm).endpoint;
  Mat psi_ik = gauge_transport_h(A_i, a_ik, rho, spec, cm).endpoint;
  Mat psi_jk = gauge_transport_h(A_j, a_jk, rho, spec, cm).endpoint;
  Mat F_i = holonomy1(A_i, rho, spec).endpoint;
  Mat lhs = cm.act_GH(g_ij(x), psi_jk);
  Mat rhs = psi_ij.inverse() * cm.act_GH(F_i, f_ijk(y)) * psi_ik *
            f_ijk(x).inverse();
  return mat_dist(lhs, rhs);
}

}  // namespace holo2
