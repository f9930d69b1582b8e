#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "esf/intmatrix.hpp"

namespace fx {

using esf::IntMatrix;
using esf::IntVec;

inline const double kPi = std::numbers::pi;

inline IntMatrix A1() { return {{1, -1}, {1, 1}}; }
inline IntMatrix A2() { return {{0, -2}, {1, 1}}; }
inline IntMatrix A3() { return {{1, -2}, {1, 0}}; }
inline IntMatrix A4() { return {{2, 0}, {0, 2}}; }
inline IntMatrix A1tilde() { return {{1, 1}, {1, -1}}; }
inline IntMatrix Auni() { return {{2}}; }

inline Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Eigen::MatrixXd Q2_A1() { return Eigen::MatrixXd::Identity(2, 2); }
inline Eigen::MatrixXd Q2_A2() { return mat2(2, -0.5, -0.5, 1); }
inline Eigen::MatrixXd Q2_A3() { return mat2(2, 0.5, 0.5, 1); }
inline Eigen::MatrixXd Q2_A4() { return Eigen::MatrixXd::Identity(2, 2); }

// Closed-form masks as functions of (x1, x2).
inline double mask1(double x, double y) { return 0.5 + 0.25 * std::cos(x) + 0.25 * std::cos(y); }
inline double mask2(double x, double y) {
  return 0.25 * (3 + 2 * std::cos(x) - std::cos(y) + 0.5 * std::sin(x) * std::sin(y));
}
inline double mask3(double x, double y) {
  return (3 + 2 * std::cos(x) + std::cos(y) + 0.5 * std::sin(x) * std::sin(y)) / 6.0;
}
inline double mask4(double x, double y) {
  return (2 + std::cos(x) + std::cos(y)) * (2 + std::cos(x) - std::cos(y)) * (2 - std::cos(x) + std::cos(y)) / 16.0;
}
inline double mask_uni(double x) { return 0.5 * (1 + std::cos(x)); }

/// Fourier coefficients c_k of f(xi) = sum_k c_k exp(-i k.xi) by a direct
/// n^d-point DFT; exact for trigonometric polynomials of degree < n/2.
inline std::map<IntVec, double> dft_coeffs(const std::function<double(const std::vector<double>&)>& f, int d, int n,
                                           double drop = 1e-14) {
  std::vector<IntVec> pts;
  IntVec idx(static_cast<std::size_t>(d), 0);
  const int total = static_cast<int>(std::pow(n, d));
  std::vector<double> samples(static_cast<std::size_t>(total));
  for (int t = 0; t < total; ++t) {
    int r = t;
    std::vector<double> xi(static_cast<std::size_t>(d));
    for (int i = d - 1; i >= 0; --i) {
      xi[static_cast<std::size_t>(i)] = 2 * kPi * (r % n) / n;
      r /= n;
    }
    samples[static_cast<std::size_t>(t)] = f(xi);
  }
  std::map<IntVec, double> out;
  const int h = n / 2;
  for (int t = 0; t < total; ++t) {
    int r = t;
    IntVec k(static_cast<std::size_t>(d));
    for (int i = d - 1; i >= 0; --i) {
      k[static_cast<std::size_t>(i)] = (r % n) - h;
      r /= n;
    }
    std::complex<double> acc = 0;
    for (int s = 0; s < total; ++s) {
      int rs = s;
      double ang = 0;
      for (int i = d - 1; i >= 0; --i) {
        ang += static_cast<double>(k[static_cast<std::size_t>(i)]) * 2 * kPi * (rs % n) / n;
        rs /= n;
      }
      acc += samples[static_cast<std::size_t>(s)] * std::exp(std::complex<double>(0, ang));
    }
    acc /= static_cast<double>(total);
    if (std::abs(acc.real()) > drop) out[k] = acc.real();
  }
  return out;
}

/// 2x2 isotropy by eigenvalue structure: trace t, determinant D.
inline bool isotropic_bruteforce_2x2(const IntMatrix& a) {
  const double t = static_cast<double>(a(0, 0) + a(1, 1));
  const std::int64_t det = a.det();
  const std::int64_t disc = (a(0, 0) + a(1, 1)) * (a(0, 0) + a(1, 1)) - 4 * det;
  if (disc < 0) return true;                                          // conjugate pair, diagonalizable
  if (disc == 0) return a(0, 1) == 0 && a(1, 0) == 0 && a(0, 0) == a(1, 1);  // double root: scalar only
  return t == 0.0;                                                    // real pair +-l
}

/// Cubic cardinal B-spline centered at 0, support [-2, 2].
inline double bspline3(double x) {
  x = std::abs(x);
  if (x >= 2) return 0;
  if (x >= 1) return (2 - x) * (2 - x) * (2 - x) / 6.0;
  return 2.0 / 3.0 - x * x + x * x * x / 2.0;
}

inline double hat(double x) { return std::max(0.0, 1 - std::abs(x)); }

inline std::vector<double> random_point(std::mt19937_64& rng, int d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(d));
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace fx
