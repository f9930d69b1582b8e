#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "esf/cascade.hpp"
#include "esf/io.hpp"
#include "esf/polynomial.hpp"
#include "esf/spectral.hpp"

namespace esf {

enum class CheckStatus { Pass, Fail, Skip };
std::string_view to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Skip;
  double residual = 0.0;
  double tolerance = 0.0;
  double runtime_s = 0.0;
  Json detail = Json::object();
};

struct PropertyReport {
  std::string matrix;
  int m = 1;
  std::vector<CheckResult> checks;

  /// No non-skipped check failed.
  bool passed() const;
  const CheckResult* find(const std::string& name) const;
  Json to_json(bool timings) const;
};

struct PropertyConfig {
  int J = 5;
  int grid_n = 128;
  double tol = 1e-9;  // M truncation tolerance
  std::uint64_t seed = 1;
  int convolution_samples = 512;
  int fourier_samples = 200;
};

/// max over all level-J points of |sum_k phi(x - k) - 1|; needs J >= 3.
double check_partition_of_unity(const LatticeGrid& grid);

struct PositivityResult {
  double min_value = 0.0;
  bool passed = false;  // min >= -1e-10
};
/// Min of f over grid_n^d points of [-6 pi, 6 pi]^d.
PositivityResult check_total_positivity(const std::function<double(std::span<const double>)>& phi_hat, int d,
                                        int grid_n);
PositivityResult check_total_positivity(const SpectralProfile& p, int grid_n, double tol = 1e-12);

/// Truncated refinement product prod_{j=1..factors} m0((A^{-T})^j xi) with tail 1.
double phi_hat_mask_product(const TrigPoly& m0, const Eigen::MatrixXd& ait, std::span<const double> xi,
                            int factors = 60);

/// Max |d^n phi_hat^m (2 pi k)| over k in {-2..2}^d \ 0 and |n| <= 2m - 1, by
/// fourth-order central differences with step h.
double check_strang_fix(const SpectralProfile& p, int m, double h = 1e-3, double tol = 1e-12);

/// Max relative |phi_hat^m(xi) - m0(A^{-T} xi)^m phi_hat^m(A^{-T} xi)| at seeded points.
double check_fourier_refinement(const SpectralProfile& p, int m, int samples, std::uint64_t seed, double tol = 1e-12);

struct ConvolutionResult {
  double residual = 0.0;        // Richardson-extrapolated quadrature, levels J-1 and J
  double plain_residual = 0.0;  // level-J quadrature only
  int points = 0;
};
/// phi^{m1+m2} against the lattice convolution of phi^{m1} and phi^{m2}.
ConvolutionResult check_convolution(const SpectralProfile& p, int m1, int m2, int J, int samples, std::uint64_t seed);

/// Max |M((A^T)^j 2 pi s) - M(2 pi s)| / M(2 pi s) over nonzero digits s of A^T and j = 1..4,
/// together with the smallest M(2 pi s).
struct NonDecayResult {
  double max_relative_change = 0.0;
  double min_value = 0.0;
};
NonDecayResult check_non_decay(const SpectralProfile& p, double tol = 1e-12);

struct ReproductionResult {
  bool leading_ok = false;
  double fit_residual = 0.0;
  int residual_degree = -1;  // degree of the fitted r - p
  int points = 0;
};
/// r(x) = sum_k p(k) phi^m(x - k) on level-J points of [-1, 1]^d, r - p fitted by
/// monomials of degree < deg p. Throws DegreeTooHigh if deg p > 2m + 1.
ReproductionResult check_polynomial_reproduction(const LatticeGrid& grid, int m, const Polynomial& p);

struct ApproximationResult {
  std::vector<int> levels;
  std::vector<double> errors;
  double slope = 0.0;
  bool exact = false;  // all errors below 1e-13
};
/// Prefiltered quasi-interpolation of f at three successive levels; discrete L2 error
/// on [-2, 2]^d, slope of log error against log spacing q^{-J/d}.
ApproximationResult check_approximation_order(const SpectralProfile& p, int m,
                                              const std::function<double(std::span<const double>)>& f);

/// Second-moment matrix int x x^T phi^m(x) dx from the refinement equation.
Eigen::MatrixXd second_moments(const SpectralProfile& p, int m);

PropertyReport run_all(const SpectralProfile& p, const PropertyConfig& cfg);

}  // namespace esf
