#pragma once

#include <complex>
#include <map>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "esf/digits.hpp"
#include "esf/intmatrix.hpp"
#include "esf/rational.hpp"

namespace esf {

struct DilationMatrix;
struct QuadraticForm;

using Complex = std::complex<double>;

/// p(xi) = sum_k c_k exp(-i k.xi) with finitely many nonzero c_k.
class TrigPoly {
 public:
  TrigPoly() = default;
  explicit TrigPoly(int d) : d_(d) {}
  static TrigPoly constant(int d, Complex c);

  int dim() const { return d_; }
  std::size_t size() const { return c_.size(); }
  const std::map<IntVec, Complex>& coeffs() const { return c_; }
  Complex coeff(const IntVec& k) const;

  /// Accumulates into c_k; an entry that becomes exactly zero is removed.
  void add(const IntVec& k, Complex v);

  Complex eval(std::span<const double> xi) const;
  double max_abs() const;
  /// c_{-k} == conj(c_k) within tol for every k.
  bool is_real(double tol = 1e-12) const;
  /// c_{-k} == c_k within tol (even in xi).
  bool is_even(double tol = 1e-12) const;

  TrigPoly scaled(Complex s) const;
  /// Drops coefficients with |c| <= tol.
  TrigPoly pruned(double tol) const;
  /// Replaces every coefficient by its real part; throws NumericalBreakdown if
  /// some imaginary part exceeds tol.
  TrigPoly real_part(double tol) const;

 private:
  int d_ = 0;
  std::map<IntVec, Complex> c_;
};

TrigPoly mul(const TrigPoly& p, const TrigPoly& r);
TrigPoly pow(const TrigPoly& p, int m);

/// p(xi + 2 pi t); phases for t.k with denominator 1, 2 or 4 are exact.
TrigPoly shift_argument(const TrigPoly& p, const RationalVec& t);

/// p(B^T xi) for an integer matrix B: frequency k moves to B k.
TrigPoly compose_linear(const TrigPoly& p, const IntMatrix& b);

TrigPoly build_G(const QuadraticForm& q2);
TrigPoly build_G(const Eigen::MatrixXd& q2);

/// Sine form of G, reduced modulo 2 pi per coordinate. Accurate near the zeros.
double eval_G(const Eigen::MatrixXd& q2, std::span<const double> xi);

/// m0(xi) = prod_{s != 0} G(xi + 2 pi s) / prod_{s != 0} G(2 pi s) over the
/// digits S of A^T. Throws MaskPoleAtDigit if a denominator factor vanishes.
TrigPoly build_mask(const DilationMatrix& a, const TrigPoly& g, const DigitSet& digits_at);

/// The denominator prod_{s != 0} G(2 pi s) with its factors per nonzero digit.
struct MaskDenominator {
  long double value = 1.0L;
  std::vector<RationalVec> digits;
  std::vector<long double> factors;
};
MaskDenominator mask_denominator(const TrigPoly& g, const DigitSet& digits_at);

/// phi(x) = sum_k c_k phi(A x - k), c_k = q * coeff(m0, k).
struct RefinementCoefficients {
  std::map<IntVec, double> c;
  std::int64_t q = 0;
  int d = 0;
  double sum() const;
};

RefinementCoefficients refinement_coefficients(const TrigPoly& m0, std::int64_t q);

/// Human-readable real form, e.g. "0.5 + 0.25*cos(x1) + 0.25*cos(x2)".
std::string cosine_form(const TrigPoly& p);

}  // namespace esf
