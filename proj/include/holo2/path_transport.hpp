// Curve-indexed ODE transports: 1-holonomy, boundary-loop holonomy, the
// transported line integrals driving the surface ODE, gauge transport,
// transition 2-arrows and the wreath transport.
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "holo2/algebra.hpp"
#include "holo2/connection.hpp"
#include "holo2/numerics.hpp"

namespace holo2 {

struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParamPath {
  std::function<Vec(double)> map;
  std::function<Vec(double)> velocity;  // optional; central FD fallback
  double a = 0.0;
  double b = 1.0;
  // Optional chart membership; transports verify it along the step grid.
  std::function<bool(const Vec&)> chart;
};

inline void check_chart(const ParamPath& rho, double t) {
  if (rho.chart && !rho.chart(rho.map(t)))
    throw TransportError("path leaves its chart at parameter t=" +
                         std::to_string(t));
}

inline Vec path_velocity(const ParamPath& p, double t, double fd_h = 1e-6) {
  if (p.velocity) return p.velocity(t);
  double lo = std::max(p.a, t - fd_h), hi = std::min(p.b, t + fd_h);
  if (hi <= lo) return Vec::Zero(p.map(t).size());
  return Vec((p.map(hi) - p.map(lo)) / (hi - lo));
}

inline ParamPath reverse_path(const ParamPath& p) {
  ParamPath r;
  r.a = p.a;
  r.b = p.b;
  auto m = p.map;
  double a = p.a, b = p.b;
  r.map = [m, a, b](double t) { return m(a + b - t); };
  if (p.velocity) {
    auto v = p.velocity;
    r.velocity = [v, a, b](double t) { return Vec(-v(a + b - t)); };
  }
  return r;
}

struct SurfacePatch {
  std::function<Vec(double, double)> map;
  // Optional analytic jacobian: (t, s) -> (d map / dt, d map / ds).
  std::function<std::pair<Vec, Vec>(double, double)> jacobian;
  double t0 = 0.0, t1 = 1.0, s0 = 0.0, s1 = 1.0;
  int chart = -1;
};

inline std::pair<Vec, Vec> patch_jacobian(const SurfacePatch& g, double t,
                                          double s, double fd_h = 1e-6) {
  if (g.jacobian) return g.jacobian(t, s);
  auto d = [&](bool along_t) {
    double lo = along_t ? std::max(g.t0, t - fd_h) : std::max(g.s0, s - fd_h);
    double hi = along_t ? std::min(g.t1, t + fd_h) : std::min(g.s1, s + fd_h);
    Vec p1 = along_t ? g.map(hi, s) : g.map(t, hi);
    Vec p0 = along_t ? g.map(lo, s) : g.map(t, lo);
    return Vec((p1 - p0) / (hi - lo));
  };
  return {d(true), d(false)};
}

// Horizontal section t |-> gamma(t, s) over [ta, tb].
inline ParamPath row_path(const SurfacePatch& g, double s, double ta, double tb) {
  ParamPath p;
  p.a = ta;
  p.b = tb;
  auto m = g.map;
  p.map = [m, s](double t) { return m(t, s); };
  if (g.jacobian) {
    auto j = g.jacobian;
    p.velocity = [j, s](double t) { return j(t, s).first; };
  }
  return p;
}

// Vertical section s |-> gamma(t, s) over [sa, sb].
inline ParamPath col_path(const SurfacePatch& g, double t, double sa, double sb) {
  ParamPath p;
  p.a = sa;
  p.b = sb;
  auto m = g.map;
  p.map = [m, t](double s) { return m(t, s); };
  if (g.jacobian) {
    auto j = g.jacobian;
    p.velocity = [j, t](double s) { return j(t, s).second; };
  }
  return p;
}

struct TransportResult {
  Mat endpoint;
  std::vector<std::pair<double, Mat>> trace;
  StepSpec spec;
  double drift = 0.0;  // membership residual at the endpoint, if checked
};

// Path-ordered transport: solves F' = F . rho*A(d/dt) from the identity.
inline TransportResult holonomy1(
    const Form1& A, const ParamPath& rho, const StepSpec& spec,
    const std::function<double(const Mat&)>& membership = {},
    int steps_override = -1) {
  const Vec p0 = rho.map(rho.a);
  const int dim = static_cast<int>(A.value(p0, Vec::Zero(p0.size())).rows());
  TransportResult out;
  out.spec = spec;
  if (rho.b <= rho.a) {
    out.endpoint = mat_id(dim);
    out.trace.emplace_back(rho.a, out.endpoint);
    return out;
  }
  check_chart(rho, rho.a);
  check_chart(rho, 0.5 * (rho.a + rho.b));
  check_chart(rho, rho.b);
  auto rhs = [&](double t) {
    check_chart(rho, t);
    return A.value(rho.map(t), path_velocity(rho, t));
  };
  out.trace = integrate_linear_matrix_ode(rhs, OdeSide::right, mat_id(dim),
                                          rho.a, rho.b, spec, steps_override);
  out.endpoint = out.trace.back().second;
  if (membership) out.drift = membership(out.endpoint);
  return out;
}

// Boundary-loop holonomy of gamma restricted to [t0, t] x [s_base, s]:
//   u = F(left edge) F(row at s) F(right edge)^-1 F(row at s_base)^-1.
inline Mat loop_holonomy_u(const Form1& A, const SurfacePatch& gamma, double t,
                           double s, const StepSpec& spec, double s_base) {
  Mat l = holonomy1(A, col_path(gamma, gamma.t0, s_base, s), spec).endpoint;
  Mat top = holonomy1(A, row_path(gamma, s, gamma.t0, t), spec).endpoint;
  Mat r = holonomy1(A, col_path(gamma, t, s_base, s), spec).endpoint;
  Mat bot = holonomy1(A, row_path(gamma, s_base, gamma.t0, t), spec).endpoint;
  return l * top * r.inverse() * bot.inverse();
}

inline Mat loop_holonomy_u(const Form1& A, const SurfacePatch& gamma, double t,
                           double s, const StepSpec& spec) {
  return loop_holonomy_u(A, gamma, t, s, spec, gamma.s0);
}

// Shared engine for the transported row integrals: sweeps the row at height
// s once, advancing the incremental transport F(gamma_{[t0,tau];s}) and
// accumulating integrand(F_minus, point, d/dtau, d/ds) by composite Simpson.
// `left` must be the left-edge transport F(gamma_{t0;[s0,s]}).
inline Mat transported_row_integral(
    const Form1& A, const SurfacePatch& patch, double t_end, double s,
    const Mat& left, const StepSpec& spec, int n_t,
    const std::function<Mat(const Mat&, const Vec&, const Vec&, const Vec&)>&
        integrand) {
  if (t_end <= patch.t0) {
    Vec p = patch.map(patch.t0, s);
    auto [jt, js] = patch_jacobian(patch, patch.t0, s);
    Mat probe = integrand(left, p, jt, js);
    return mat_zero(static_cast<int>(probe.rows()));
  }
  const double h = (t_end - patch.t0) / n_t;
  auto rhs = [&](double tau) {
    return A.value(patch.map(tau, s), patch_jacobian(patch, tau, s).first);
  };
  auto f = [&](double tau, const Mat& y) -> Mat { return y * rhs(tau); };
  Mat row = mat_id(static_cast<int>(left.rows()));
  std::vector<Mat> vals;
  vals.reserve(n_t + 1);
  for (int j = 0; j <= n_t; ++j) {
    const double tau = patch.t0 + j * h;
    Vec p = patch.map(tau, s);
    auto [jt, js] = patch_jacobian(patch, tau, s);
    vals.push_back(integrand(Mat(left * row), p, jt, js));
    if (j < n_t) row = ode_step(row, tau, h, spec.method, f);
  }
  return composite_quadrature(vals, t_end - patch.t0);
}

// B_t(s): integral over the row of F(gamma^-) |> gamma*B.
inline Mat script_B(const LocalConnection& conn, const SurfacePatch& gamma,
                    double t, double s, const StepSpec& spec,
                    const CrossedModule& cm, int n_t_override = -1) {
  Mat left = holonomy1(conn.A, col_path(gamma, gamma.t0, gamma.s0, s), spec).endpoint;
  int n_t = n_t_override > 0 ? n_t_override : std::max(2, steps_for(spec, t - gamma.t0));
  auto kern = [&](const Mat& f, const Vec& p, const Vec& ut, const Vec& us) {
    return cm.act_Gh(f, conn.B.value(p, ut, us));
  };
  return transported_row_integral(conn.A, gamma, t, s, left, spec, n_t, kern);
}

// A_t(s): integral over the row of Ad_{F(gamma^-)} gamma*curvature1(A).
inline Mat script_A(const Form1& A, const SurfacePatch& gamma, double t,
                    double s, const StepSpec& spec,
                    const DerivPolicy& pol = {}, int n_t_override = -1) {
  Mat left = holonomy1(A, col_path(gamma, gamma.t0, gamma.s0, s), spec).endpoint;
  int n_t = n_t_override > 0 ? n_t_override : std::max(2, steps_for(spec, t - gamma.t0));
  auto kern = [&](const Mat& f, const Vec& p, const Vec& ut, const Vec& us) {
    return Mat(f * curvature1(A, p, ut, us, pol) * f.inverse());
  };
  return transported_row_integral(A, gamma, t, s, left, spec, n_t, kern);
}

// Gauge transport: solves h' = F_A(rho_{[a,t]}) |> rho*phi(d/dt) . h from 1_H.
// The 1-holonomy factor is read off a half-step trace so the stage values of
// the h-integrator land exactly on precomputed grid points.
inline TransportResult gauge_transport_h(const Form1& A, const Form1& phi,
                                         const ParamPath& rho,
                                         const StepSpec& spec,
                                         const CrossedModule& cm,
                                         int steps_override = -1) {
  TransportResult out;
  out.spec = spec;
  if (rho.b <= rho.a) {
    out.endpoint = cm.id_H();
    out.trace.emplace_back(rho.a, out.endpoint);
    return out;
  }
  const int n = steps_override > 0 ? steps_override : steps_for(spec, rho.b - rho.a);
  TransportResult fa = holonomy1(A, rho, spec, {}, 2 * n);
  const double h = (rho.b - rho.a) / n;
  auto fa_at = [&](double t) -> const Mat& {
    int idx = static_cast<int>(std::lround((t - rho.a) / (h / 2)));
    idx = std::min(std::max(idx, 0), static_cast<int>(fa.trace.size()) - 1);
    return fa.trace[idx].second;
  };
  auto f = [&](double t, const Mat& y) -> Mat {
    return cm.act_Gh(fa_at(t), phi.value(rho.map(t), path_velocity(rho, t))) * y;
  };
  Mat y = cm.id_H();
  out.trace.emplace_back(rho.a, y);
  for (int k = 0; k < n; ++k) {
    const double t = rho.a + k * h;
    y = ode_step(y, t, h, spec.method, f);
    if (!mat_finite(y))
      throw TransportError("non-finite gauge transport at t=" + std::to_string(t + h));
    out.trace.emplace_back(rho.a + (k + 1) * h, y);
  }
  out.endpoint = y;
  out.drift = cm.membership_H(y);
  return out;
}

// State for the single ODE on the wreath group.
struct GHState {
  Mat g, h;
  GHState operator+(const GHState& o) const { return {Mat(g + o.g), Mat(h + o.h)}; }
  friend GHState operator*(double c, const GHState& s) {
    return {Mat(c * s.g), Mat(c * s.h)};
  }
};

// Transport of the wreath connection (A, phi): one ODE on G x| H whose
// derivative is the right mixed product (g,h).(X,Y) = (gX, g|>Y . h).
inline WreathElement wreath_holonomy(const Form1& A, const Form1& phi,
                                     const ParamPath& rho, const StepSpec& spec,
                                     const CrossedModule& cm,
                                     int steps_override = -1) {
  if (rho.b <= rho.a) return wreath_id(cm);
  const int n = steps_override > 0 ? steps_override : steps_for(spec, rho.b - rho.a);
  const double h = (rho.b - rho.a) / n;
  auto f = [&](double t, const GHState& y) -> GHState {
    Vec p = rho.map(t);
    Vec v = path_velocity(rho, t);
    return {Mat(y.g * A.value(p, v)), Mat(cm.act_Gh(y.g, phi.value(p, v)) * y.h)};
  };
  GHState y{cm.id_G(), cm.id_H()};
  for (int k = 0; k < n; ++k) {
    y = ode_step(y, rho.a + k * h, h, spec.method, f);
    if (!mat_finite(y.g) || !mat_finite(y.h))
      throw TransportError("non-finite wreath transport at t=" +
                           std::to_string(rho.a + (k + 1) * h));
  }
  return {y.g, y.h};
}

struct TransitionResult {
  TwoArrow arrow;  // source F_{A_i}(rho) g_ij(rho(b)), H-element psi
  Mat psi;
  Mat F_i;  // 1-holonomy of A_i along rho
};

// Transition 2-arrow along a path in an overlap, built from the gauge pair
// (g_ij, a_ij): psi' = F_{A_i} |> rho*a_ij . psi with initial 1_H.
inline TransitionResult transition_psi(
    const Form1& A_i, const std::function<Mat(const Vec&)>& g_ij,
    const Form1& a_ij, const ParamPath& rho, const StepSpec& spec,
    const CrossedModule& cm) {
  TransitionResult out;
  out.psi = gauge_transport_h(A_i, a_ij, rho, spec, cm).endpoint;
  out.F_i = holonomy1(A_i, rho, spec).endpoint;
  out.arrow = {Mat(out.F_i * g_ij(rho.map(rho.b))), out.psi};
  return out;
}

// || target(Psi_ij(rho)) - g_ij(rho(a)) F_{A_j}(rho) ||.
inline double transition_target_residual(const TransitionResult& tr,
                                         const Form1& A_j,
                                         const std::function<Mat(const Vec&)>& g_ij,
                                         const ParamPath& rho,
                                         const StepSpec& spec,
                                         const CrossedModule& cm) {
  Mat expected = g_ij(rho.map(rho.a)) * holonomy1(A_j, rho, spec).endpoint;
  return mat_dist(arrow_target(tr.arrow, cm), expected);
}

// Mixed second variation of the boundary-loop holonomy against the
// transported curvature: at (t, s_base),
//   d2 u / dt ds = -Ad_{F_A(row to t)} gamma*curvature1(A)(d/dt, d/ds).
// The s-derivative is one-sided (u is defined for s >= s_base) at second
// order; u(., s_base) is identically 1 so its t-derivative drops out.
inline double second_variation_check(const Form1& A, const SurfacePatch& gamma,
                                     double t, double s_base,
                                     const StepSpec& spec, double delta,
                                     const DerivPolicy& pol = {}) {
  auto du_dt = [&](double s) -> Mat {
    Mat up = loop_holonomy_u(A, gamma, t + delta, s, spec, s_base);
    Mat dn = loop_holonomy_u(A, gamma, t - delta, s, spec, s_base);
    return (up - dn) / (2 * delta);
  };
  Mat fd = (4.0 * du_dt(s_base + delta) - du_dt(s_base + 2 * delta)) / (2 * delta);
  Mat f = holonomy1(A, row_path(gamma, s_base, gamma.t0, t), spec).endpoint;
  auto [jt, js] = patch_jacobian(gamma, t, s_base);
  Mat omega = curvature1(A, gamma.map(t, s_base), jt, js, pol);
  Mat target = -(f * omega * f.inverse());
  return mat_dist(fd, target);
}

// H-part of the wreath boundary-loop transport on [t0,t]x[s0,s], evaluated
// two ways: through the wreath product of edge transports, and through the
// scalar-side formula h(gamma^-) . g~ |> h(gamma^+)^-1. Returns the residual.
inline double wreath_loop_cross_check(const Form1& A, const Form1& phi,
                                      const SurfacePatch& gamma, double t,
                                      double s, const StepSpec& spec,
                                      const CrossedModule& cm) {
  ParamPath left = col_path(gamma, gamma.t0, gamma.s0, s);
  ParamPath top = row_path(gamma, s, gamma.t0, t);
  ParamPath bot = row_path(gamma, gamma.s0, gamma.t0, t);
  ParamPath right = col_path(gamma, t, gamma.s0, s);

  WreathElement minus = wreath_mul(wreath_holonomy(A, phi, left, spec, cm),
                                   wreath_holonomy(A, phi, top, spec, cm), cm);
  WreathElement plus = wreath_mul(wreath_holonomy(A, phi, bot, spec, cm),
                                  wreath_holonomy(A, phi, right, spec, cm), cm);
  WreathElement u = wreath_mul(minus, wreath_inv(plus, cm), cm);

  Mat h_minus = minus.h, h_plus = plus.h;
  Mat f_minus = minus.g, f_plus = plus.g;
  Mat g_tilde = cm.alpha_group(h_minus.inverse()) * f_minus * f_plus.inverse();
  Mat rhs = h_minus * cm.act_GH(g_tilde, h_plus.inverse());
  return mat_dist(u.h, rhs);
}

}  // namespace holo2
