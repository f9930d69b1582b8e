#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "esf/digits.hpp"
#include "esf/matana.hpp"
#include "esf/trigpoly.hpp"

namespace esf {

struct SpectralOptions {
  int grid_n = 128;
  int refine_iters = 3;
  double tol = 1e-9;  // truncation tolerance for M
  bool estimate_B = true;
};

/// Everything needed to evaluate mu, M and phi_hat for one (A, m).
struct SpectralProfile {
  DilationMatrix A;
  QuadraticForm Q2;
  TrigPoly G;
  TrigPoly m0;
  DigitSet digits_at;  // digits of A^T
  int m = 1;

  double B_estimate = 1.0;
  double threshold = 0.0;
  double decay_exponent = 0.0;
  bool riesz_ok = false;
  double truncation_tol = 1e-9;
  /// Calibrated sup of |mu - 1| / P on the unit P-ball, times a safety factor 2.
  double tail_constant = 0.0;

  // Precomputed data for the product-form evaluators.
  Eigen::MatrixXd ait;                     // A^{-T}
  IntMatrix adj_at;                        // adj(A^T)
  std::vector<IntVec> digit_numerators;    // nonzero s in S(A^T) as s = sigma / q
  double mask_den = 1.0;                   // prod_{s != 0} G(2 pi s)

  int dim() const { return A.d; }
};

SpectralProfile make_profile(const IntMatrix& a, int m, const SpectralOptions& opts = {});

/// m0 in product form, accurate near its zeros.
double m0_eval(const SpectralProfile& p, std::span<const double> xi);

double mu(const SpectralProfile& p, std::span<const double> xi);
double M_eval(const SpectralProfile& p, std::span<const double> xi, double tol);
/// phi_hat of the profile's order m.
double phi_hat(const SpectralProfile& p, std::span<const double> xi, double tol);
/// phi_hat of an arbitrary order (phi_hat^order = (phi_hat^1)^order).
double phi_hat_order(const SpectralProfile& p, std::span<const double> xi, int order, double tol);

/// Sup of mu on [-pi, pi]^d: grid of grid_n^d points (containing 0 and -pi)
/// plus refine_iters rounds of coordinate golden-section search around the best cells.
struct BEstimate {
  double value = 1.0;
  std::vector<double> argmax;
  double grid_value = 1.0;
};
BEstimate estimate_B(const SpectralProfile& p, int grid_n, int refine_iters);

struct RieszVerdict {
  bool riesz_ok = false;
  double threshold = 0.0;
  double decay_exponent = 0.0;
};
RieszVerdict riesz_verdict(const SpectralProfile& p);

/// Values of f on the tensor grid lo + (hi - lo) * i / n, i = 0..n-1 per axis,
/// last coordinate fastest.
std::vector<double> sample_grid(int d, int n, double lo, double hi,
                                const std::function<double(std::span<const double>)>& f);

namespace reference {
std::vector<double> sample_grid(int d, int n, double lo, double hi,
                                const std::function<double(std::span<const double>)>& f);
}

}  // namespace esf
