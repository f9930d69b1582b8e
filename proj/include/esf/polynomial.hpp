#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "esf/intmatrix.hpp"

namespace esf {

/// sum_alpha c_alpha x^alpha over multi-indices alpha >= 0.
struct Polynomial {
  int d = 0;
  std::map<IntVec, double> terms;

  Polynomial() = default;
  explicit Polynomial(int dim) : d(dim) {}
  static Polynomial monomial(int dim, const IntVec& alpha, double c = 1.0);

  /// -1 for the zero polynomial.
  int total_degree() const;
  double eval(std::span<const double> x) const;
  Polynomial derivative(int i) const;
  void add(const IntVec& alpha, double c);
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(double s) const;
  /// e.g. "x1^2 - x2^2"
  std::string to_string() const;
};

/// All multi-indices with total degree <= max_degree, by degree then lexicographic.
std::vector<IntVec> multi_indices(int d, int max_degree);
/// Multi-indices of total degree exactly n.
std::vector<IntVec> homogeneous_indices(int d, int n);

/// sum_ij q_ij d_i d_j p, the operator with symbol -P.
Polynomial apply_form(const Eigen::MatrixXd& q2, const Polynomial& p);

/// Basis of the homogeneous degree-n polynomials annihilated by apply_form^m.
std::vector<Polynomial> null_space_basis(const Eigen::MatrixXd& q2, int m, int n);

/// (x^T Q2^{-1} x)^m, which apply_form^m maps to a nonzero constant.
Polynomial dual_form_power(const Eigen::MatrixXd& q2, int m);

struct PolyFit {
  Polynomial poly;
  double max_residual = 0.0;
};

/// Least-squares fit of values at points by the monomials of total degree <= max_degree;
/// max_degree < 0 fits the zero polynomial.
PolyFit fit_polynomial(const std::vector<std::vector<double>>& points, const std::vector<double>& values, int d,
                       int max_degree);

}  // namespace esf
