#pragma once

#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "esf/intmatrix.hpp"

namespace esf {

/// Integer matrix with det != 0 whose eigenvalues all have modulus > 1.
struct DilationMatrix {
  IntMatrix A;
  int d = 0;
  std::int64_t q = 0;  // |det A|

  Eigen::MatrixXd real() const { return A.to_real(); }
  /// A^{-T} in floating point.
  Eigen::MatrixXd inv_transpose() const { return A.to_real().transpose().inverse(); }
  /// q^{2/d}
  double scale() const;
};

/// Symmetric positive-definite Q2 with A Q2 A^T = q^{2/d} Q2 and Q2(d-1,d-1) = 1.
struct QuadraticForm {
  Eigen::MatrixXd Q2;
  /// The invariance equation had a solution space of dimension > 1 and Q2 is
  /// the element picked for it (see solve_quadratic_form).
  bool degenerate = false;
  int solution_dim = 1;

  int dim() const { return static_cast<int>(Q2.rows()); }
};

enum class IsotropyFailure { None, NoInvariantForm, IndefiniteForm };

std::string_view to_string(IsotropyFailure f);

struct IsotropyCertificate {
  bool isotropic = false;
  std::optional<QuadraticForm> witness;
  IsotropyFailure failure_reason = IsotropyFailure::None;
  int solution_dim = 0;
};

struct OrthogonalPart {
  Eigen::MatrixXd U;
  Eigen::MatrixXd Q;  // PD square root of Q2
  double orthogonality_error = 0.0;   // max |U^T U - I|
  double reconstruction_error = 0.0;  // max |A^{-T} - q^{-1/d} Q^{-1} U Q|
};

/// Throws Singular or NotExpanding.
DilationMatrix validate_dilation(const IntMatrix& m);

/// Exact check that every root of the monic integer polynomial c_0 + ... + z^n
/// lies strictly outside the unit circle (Schur-Cohn on the reversed polynomial).
bool roots_outside_unit_circle(const std::vector<std::int64_t>& c);

IsotropyCertificate certify_isotropy(const DilationMatrix& a);

/// Throws NotIsotropic when no PD invariant form exists.
QuadraticForm solve_quadratic_form(const DilationMatrix& a);

/// Throws NumericalBreakdown if Q2 has no PD square root.
OrthogonalPart orthogonal_part(const DilationMatrix& a, const QuadraticForm& q2);

double eval_P(const QuadraticForm& q2, std::span<const double> xi);
double eval_P(const Eigen::MatrixXd& q2, std::span<const double> xi);

}  // namespace esf
