// Square complex matrices and small helpers shared across the library.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace holo2 {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using cplx = std::complex<double>;

inline Mat mat_id(int n) { return Mat::Identity(n, n); }
inline Mat mat_zero(int n) { return Mat::Zero(n, n); }

inline double mat_norm(const Mat& m) { return m.norm(); }

inline double mat_dist(const Mat& a, const Mat& b) { return (a - b).norm(); }

inline bool mat_finite(const Mat& m) { return m.allFinite(); }

inline Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

// Scaling-and-squaring Taylor exponential; adequate for the small matrices
// used here and keeps samplers deterministic across platforms.
inline Mat expm(const Mat& x) {
  const int n = static_cast<int>(x.rows());
  double nrm = x.norm();
  int squarings = 0;
  Mat y = x;
  while (nrm > 0.5) {
    y *= 0.5;
    nrm *= 0.5;
    ++squarings;
  }
  Mat result = mat_id(n);
  Mat term = mat_id(n);
  for (int k = 1; k <= 18; ++k) {
    term = term * y / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

// Real matrix with entries uniform in [-scale, scale].
inline Mat random_real_mat(int n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = cplx(u(rng), 0.0);
  return m;
}

// Characteristic polynomial coefficients by Faddeev-LeVerrier; p(z) =
// z^n - c1 z^{n-1} - ... - cn. Deterministic, no eigensolver involved.
inline std::vector<cplx> charpoly_coeffs(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<cplx> c(n);
  Mat m = a;
  c[0] = m.trace();
  for (int k = 2; k <= n; ++k) {
    m = a * (m - c[k - 2] * mat_id(n));
    c[k - 1] = m.trace() / static_cast<double>(k);
  }
  return c;
}

inline std::vector<double> flatten_complex(const std::vector<cplx>& v) {
  std::vector<double> out;
  out.reserve(2 * v.size());
  for (const auto& z : v) {
    out.push_back(z.real());
    out.push_back(z.imag());
  }
  return out;
}

inline std::vector<double> flatten_entries(const Mat& m) {
  std::vector<double> out;
  out.reserve(2 * m.size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      out.push_back(m(i, j).real());
      out.push_back(m(i, j).imag());
    }
  return out;
}

inline double vec_dist(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace holo2
