#include <catch2/catch_amalgamated.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "holo2/numerics.hpp"

using namespace holo2;

namespace {

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << cplx(a), cplx(b), cplx(c), cplx(d);
  return m;
}

Mat scalar(double x) {
  Mat m(1, 1);
  m(0, 0) = x;
  return m;
}

}  // namespace

TEST_CASE("zero generator keeps the identity") {
  StepSpec spec{8, OdeMethod::rk4};
  auto sol = integrate_linear_matrix_ode([](double) { return mat_zero(2); },
                                         OdeSide::right, mat_id(2), 0, 1, spec);
  REQUIRE(sol.size() == 9);
  for (const auto& [t, m] : sol) REQUIRE(mat_dist(m, mat_id(2)) == 0.0);
}

TEST_CASE("constant nilpotent generator integrates to its exponential") {
  // exp of [[0,1],[0,0]] is [[1,1],[0,1]] since the square vanishes
  StepSpec spec{16, OdeMethod::rk4};
  Mat n = mat2(0, 1, 0, 0);
  auto sol = integrate_linear_matrix_ode([n](double) { return n; },
                                         OdeSide::right, mat_id(2), 0, 1, spec);
  REQUIRE(mat_dist(sol.back().second, mat2(1, 1, 0, 1)) < 1e-12);
}

TEST_CASE("scalar exponential at 64 steps") {
  StepSpec spec{64, OdeMethod::rk4};
  auto sol = integrate_linear_matrix_ode([](double) { return scalar(0.3); },
                                         OdeSide::right, mat_id(1), 0, 1, spec);
  REQUIRE(std::abs(sol.back().second(0, 0) - std::exp(0.3)) < 1e-10);
}

TEST_CASE("right transport on time-reversed negated data is the inverse") {
  StepSpec spec{64, OdeMethod::rk4};
  auto rhs = [](double t) {
    return mat2(std::sin(t), 0.4 * t, -0.3, std::cos(2 * t));
  };
  auto fwd = integrate_linear_matrix_ode(rhs, OdeSide::right, mat_id(2), 0, 1, spec);
  auto bwd = integrate_linear_matrix_ode(
      [&](double t) { return Mat(-rhs(1.0 - t)); }, OdeSide::right, mat_id(2), 0,
      1, spec);
  REQUIRE(mat_dist(Mat(fwd.back().second * bwd.back().second), mat_id(2)) < 1e-9);

  // the left-sided transport of the negated data is the same inverse
  auto lft = integrate_linear_matrix_ode([&](double t) { return Mat(-rhs(t)); },
                                         OdeSide::left, mat_id(2), 0, 1, spec);
  REQUIRE(mat_dist(Mat(fwd.back().second * lft.back().second), mat_id(2)) < 1e-9);
}

TEST_CASE("method order measured on the scalar exponential") {
  auto endpoint_error = [](int steps, OdeMethod m) {
    StepSpec spec{steps, m};
    auto sol = integrate_linear_matrix_ode(
        [](double t) { return scalar(std::sin(3 * t)); }, OdeSide::right,
        mat_id(1), 0, 1, spec);
    double exact = std::exp((1.0 - std::cos(3.0)) / 3.0);
    return std::abs(sol.back().second(0, 0) - exact);
  };
  std::vector<std::pair<double, double>> rk4_err, mid_err;
  for (int steps : {8, 16, 32, 64}) {
    rk4_err.push_back({1.0 / steps, endpoint_error(steps, OdeMethod::rk4)});
    mid_err.push_back({1.0 / steps, endpoint_error(steps, OdeMethod::midpoint)});
  }
  REQUIRE(convergence_order(rk4_err).order >= 3.5);
  REQUIRE(convergence_order(mid_err).order >= 1.8);
}

TEST_CASE("projection hook is applied per step") {
  StepSpec spec{16, OdeMethod::rk4};
  spec.project = [](const Mat& m) {
    Mat r = m;
    r(0, 0) = 1.0;  // pin one entry to a known value
    return r;
  };
  auto sol = integrate_linear_matrix_ode(
      [](double) { return mat2(0.2, 0.1, 0.0, -0.1); }, OdeSide::right,
      mat_id(2), 0, 1, spec);
  REQUIRE(sol.back().second(0, 0) == cplx(1.0));
}

TEST_CASE("composite line integral on polynomials and sin") {
  Mat zero = composite_line_integral([](double) { return mat_zero(1); }, 1.0, 65);
  REQUIRE(mat_norm(zero) == 0.0);

  Mat lin = composite_line_integral([](double t) { return scalar(t); }, 1.0, 65);
  REQUIRE(std::abs(lin(0, 0) - 0.5) < 1e-12);

  Mat cub = composite_line_integral([](double t) { return scalar(t * t * t - t); },
                                    1.0, 65);
  REQUIRE(std::abs(cub(0, 0) - (-0.25)) < 1e-12);

  // composite Simpson at 65 nodes: asymptotic error 2 pi^3 h^4 / 180 ~ 2.1e-8
  Mat sine = composite_line_integral(
      [](double t) { return scalar(std::sin(M_PI * t)); }, 1.0, 65);
  REQUIRE(std::abs(sine(0, 0) - 2.0 / M_PI) < 5e-8);
  Mat sine_fine = composite_line_integral(
      [](double t) { return scalar(std::sin(M_PI * t)); }, 1.0, 129);
  REQUIRE(std::abs(sine_fine(0, 0) - 2.0 / M_PI) <
          std::abs(sine(0, 0) - 2.0 / M_PI) / 12.0);

  // even node count falls back to trapezoid; still converges
  Mat trap = composite_line_integral([](double t) { return scalar(t); }, 1.0, 64);
  REQUIRE(std::abs(trap(0, 0) - 0.5) < 1e-10);
}

TEST_CASE("finite difference pullback") {
  auto constant_surface = [](double, double) {
    Vec p(2);
    p << 0.3, 0.7;
    return p;
  };
  auto field1 = [](const Vec& p, const std::vector<Vec>& tg) {
    Mat m(1, 1);
    m(0, 0) = p[0] * tg[0][1];  // the 1-form x dy
    return m;
  };
  auto r0 = finite_difference_pullback(constant_surface, field1, 0.5, 0.5,
                                       FdDirection::ds, 1e-4);
  REQUIRE(mat_norm(r0.value) < 1e-12);
  REQUIRE_FALSE(r0.clamped);

  auto ident = [](double t, double s) {
    Vec p(2);
    p << t, s;
    return p;
  };
  auto r1 = finite_difference_pullback(ident, field1, 0.4, 0.9, FdDirection::ds, 1e-4);
  REQUIRE(std::abs(r1.value(0, 0) - cplx(0.4)) < 1e-10);

  // clamped stencil at the square boundary is flagged
  auto r2 = finite_difference_pullback(ident, field1, 0.4, 1.0, FdDirection::ds, 1e-4);
  REQUIRE(r2.clamped);

  // mixed direction feeds both tangents into a 2-form field
  auto field2 = [](const Vec& p, const std::vector<Vec>& tg) {
    Mat m(1, 1);
    m(0, 0) = p[0] * (tg[0][0] * tg[1][1] - tg[1][0] * tg[0][1]);
    return m;
  };
  auto r3 = finite_difference_pullback(ident, field2, 0.4, 0.5, FdDirection::dt_ds, 1e-4);
  REQUIRE(std::abs(r3.value(0, 0) - cplx(0.4)) < 1e-9);

  // quadratic surface: halving h divides the error by about 4
  auto quad = [](double t, double s) {
    Vec p(2);
    p << t, s * s * s;
    return p;
  };
  auto field_ds = [](const Vec&, const std::vector<Vec>& tg) {
    Mat m(1, 1);
    m(0, 0) = tg[0][1];
    return m;
  };
  double exact = 3 * 0.5 * 0.5;
  double e1 = std::abs(finite_difference_pullback(quad, field_ds, 0.5, 0.5,
                                                  FdDirection::ds, 0.1)
                           .value(0, 0) -
                       cplx(exact));
  double e2 = std::abs(finite_difference_pullback(quad, field_ds, 0.5, 0.5,
                                                  FdDirection::ds, 0.05)
                           .value(0, 0) -
                       cplx(exact));
  REQUIRE(e1 / e2 == Catch::Approx(4.0).margin(0.5));
}

TEST_CASE("convergence order estimation") {
  ConvergenceOrder second = convergence_order(
      {{1.0, 1e-2}, {0.5, 2.5e-3}, {0.25, 6.25e-4}});
  REQUIRE(std::abs(second.order - 2.0) < 0.1);

  ConvergenceOrder flat = convergence_order({{1.0, 1e-3}, {0.5, 1e-3}, {0.25, 1e-3}});
  REQUIRE(std::abs(flat.order) < 1e-12);

  std::vector<std::pair<double, double>> quartic;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) quartic.push_back({h, 3.0 * h * h * h * h});
  REQUIRE(std::abs(convergence_order(quartic).order - 4.0) < 0.2);

  ConvergenceOrder floor = convergence_order({{1.0, 0.0}, {0.5, 0.0}, {0.25, 0.0}});
  REQUIRE(floor.below_floor);

  REQUIRE_THROWS_AS(convergence_order({{1.0, 1e-2}, {0.5, 1e-3}}), NumericsError);
  REQUIRE_THROWS_AS(convergence_order({{1.0, 1e-2}, {1.0, 1e-3}, {0.5, 1e-4}}),
                    NumericsError);
}

TEST_CASE("non-finite transport values carry the offending time") {
  StepSpec spec{16, OdeMethod::rk4};
  auto rhs = [](double t) {
    Mat m(1, 1);
    m(0, 0) = t < 0.5 ? 1.0 : std::numeric_limits<double>::quiet_NaN();
    return m;
  };
  try {
    integrate_linear_matrix_ode(rhs, OdeSide::right, mat_id(1), 0, 1, spec);
    FAIL("expected NumericsError");
  } catch (const NumericsError& e) {
    REQUIRE(std::string(e.what()).find("t=0.5") != std::string::npos);
  }
}

TEST_CASE("integrator agrees with the matrix exponential on a frozen generator") {
  Mat k = mat2(0.2, -0.7, 0.5, -0.1);
  StepSpec spec{128, OdeMethod::rk4};
  auto sol = integrate_linear_matrix_ode([k](double) { return k; }, OdeSide::right,
                                         mat_id(2), 0, 1, spec);
  Mat exact = k.exp();
  REQUIRE(mat_dist(sol.back().second, exact) < 1e-10);
  REQUIRE(mat_dist(expm(k), exact) < 1e-13);
}
