// Deterministic fixed-step ODE integration, composite quadrature and
// finite-difference utilities shared by all transport computations.
#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "holo2/matrix.hpp"

namespace holo2 {

enum class OdeMethod { rk4, midpoint };
enum class OdeSide { right, left };

struct StepSpec {
  int steps_per_unit = 64;
  OdeMethod method = OdeMethod::rk4;
  // Optional per-step retraction (e.g. re-orthonormalization for orthogonal
  // test groups). Disabled by default: drift is measured, not hidden.
  std::function<Mat(const Mat&)> project;
};

struct NumericsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Even step count for an interval of the given length, at least 2 for any
// nonempty interval. Even counts keep quadrature grids Simpson-compatible.
inline int steps_for(const StepSpec& spec, double length) {
  if (length <= 0.0) return 0;
  long n = std::lround(spec.steps_per_unit * length / 2.0);
  if (n < 1) n = 1;
  return static_cast<int>(2 * n);
}

// One explicit step of the configured method for y' = f(t, y) on a generic
// Eigen-like state.
template <class State, class Deriv>
State ode_step(const State& y, double t, double h, OdeMethod method, Deriv&& f) {
  if (method == OdeMethod::midpoint) {
    State k1 = f(t, y);
    State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    return y + h * k2;
  }
  State k1 = f(t, y);
  State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
  State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
  State k4 = f(t + h, State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Integrates F' = F * rhs(t) (side=right) or F' = rhs(t) * F (side=left) on
// [a, b] with the given initial value. Returns the solution on the step grid,
// both endpoints included. The number of steps defaults to steps_for(spec)
// but may be forced via steps_override (used to align grids across routes).
inline std::vector<std::pair<double, Mat>> integrate_linear_matrix_ode(
    const std::function<Mat(double)>& rhs, OdeSide side, const Mat& initial,
    double a, double b, const StepSpec& spec, int steps_override = -1) {
  std::vector<std::pair<double, Mat>> out;
  if (b <= a) {
    out.emplace_back(a, initial);
    return out;
  }
  const int n = steps_override > 0 ? steps_override : steps_for(spec, b - a);
  const double h = (b - a) / n;
  auto f = [&](double t, const Mat& y) -> Mat {
    return side == OdeSide::right ? Mat(y * rhs(t)) : Mat(rhs(t) * y);
  };
  Mat y = initial;
  out.reserve(n + 1);
  out.emplace_back(a, y);
  for (int k = 0; k < n; ++k) {
    const double t = a + k * h;
    y = ode_step(y, t, h, spec.method, f);
    if (spec.project) y = spec.project(y);
    if (!mat_finite(y))
      throw NumericsError("non-finite transport value at t=" + std::to_string(t + h));
    out.emplace_back(a + (k + 1) * h, y);
  }
  return out;
}

// Composite quadrature of sampled matrix values on [0, t]: Simpson when the
// node count is odd, trapezoid otherwise.
inline Mat composite_quadrature(const std::vector<Mat>& values, double t) {
  const int m = static_cast<int>(values.size());
  if (m == 0) throw NumericsError("composite quadrature needs at least one node");
  if (m == 1) return Mat(values[0] * 0.0);
  const double h = t / (m - 1);
  Mat acc = mat_zero(static_cast<int>(values[0].rows()));
  if (m % 2 == 1) {
    for (int i = 0; i < m; ++i) {
      double w = (i == 0 || i == m - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      acc += w * values[i];
    }
    return Mat(acc * (h / 3.0));
  }
  for (int i = 0; i < m; ++i) {
    double w = (i == 0 || i == m - 1) ? 0.5 : 1.0;
    acc += w * values[i];
  }
  return Mat(acc * h);
}

// Entrywise integral of a matrix-valued map over [0, t] on `nodes` equally
// spaced sample points.
inline Mat composite_line_integral(const std::function<Mat(double)>& values,
                                   double t, int nodes) {
  if (nodes < 2) throw NumericsError("composite_line_integral needs >= 2 nodes");
  std::vector<Mat> v;
  v.reserve(nodes);
  for (int i = 0; i < nodes; ++i) v.push_back(values(t * i / (nodes - 1)));
  return composite_quadrature(v, t);
}

struct FdPullback {
  Mat value;
  bool clamped = false;  // stencil left the parameter square, one-sided used
};

enum class FdDirection { dt, ds, dt_ds };

// Central-difference tangents of a parametrized surface fed into a pointwise
// form. The form callback receives the surface point and one or two tangents.
inline FdPullback finite_difference_pullback(
    const std::function<Vec(double, double)>& surface,
    const std::function<Mat(const Vec&, const std::vector<Vec>&)>& field,
    double t, double s, FdDirection dir, double h, double t0 = 0.0,
    double t1 = 1.0, double s0 = 0.0, double s1 = 1.0) {
  FdPullback r;
  auto d_dir = [&](bool along_t) -> Vec {
    double lo = along_t ? t0 : s0, hi = along_t ? t1 : s1;
    double c = along_t ? t : s;
    double lft = c - h, rgt = c + h;
    if (lft < lo) {
      lft = c;
      r.clamped = true;
    }
    if (rgt > hi) {
      rgt = c;
      r.clamped = true;
    }
    Vec p1 = along_t ? surface(rgt, s) : surface(t, rgt);
    Vec p0 = along_t ? surface(lft, s) : surface(t, lft);
    return (p1 - p0) / (rgt - lft);
  };
  const Vec p = surface(t, s);
  if (dir == FdDirection::dt) {
    r.value = field(p, {d_dir(true)});
  } else if (dir == FdDirection::ds) {
    r.value = field(p, {d_dir(false)});
  } else {
    r.value = field(p, {d_dir(true), d_dir(false)});
  }
  return r;
}

struct ConvergenceOrder {
  double order = 0.0;
  bool below_floor = false;  // residuals at/below numerical floor
};

// Least-squares slope of log(residual) against log(step).
inline ConvergenceOrder convergence_order(
    const std::vector<std::pair<double, double>>& samples,
    double floor = 1e-14) {
  if (samples.size() < 3)
    throw NumericsError("convergence_order needs >= 3 samples");
  for (size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].first < samples[i - 1].first))
      throw NumericsError("convergence_order needs strictly decreasing steps");
  ConvergenceOrder out;
  std::vector<std::pair<double, double>> pts;
  for (const auto& [h, r] : samples) {
    if (r <= floor) {
      out.below_floor = true;
      continue;
    }
    pts.emplace_back(std::log(h), std::log(r));
  }
  if (pts.size() < 2) {
    out.order = 0.0;
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * sxx - sx * sx;
  out.order = denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
  return out;
}

}  // namespace holo2
