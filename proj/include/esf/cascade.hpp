#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "esf/intmatrix.hpp"
#include "esf/matana.hpp"
#include "esf/trigpoly.hpp"

namespace esf {

/// Integer box containing supp phi.
struct SupportBox {
  IntVec lo, hi;
  RealVec lo_real, hi_real;  // bounding box of the limit set before rounding
  int iterations = 0;
  int dim() const { return static_cast<int>(lo.size()); }
};

SupportBox support_box(const DilationMatrix& a, const RefinementCoefficients& c, double tol = 1e-9);

struct IntegerValues {
  SupportBox box;
  std::map<IntVec, double> values;  // every integer point of the box
  int eigenvalue_one_multiplicity = 0;
  /// Largest |lambda| over the remaining spectrum of the transition matrix.
  /// Values >= 1 mean the cascade does not converge to a continuous function.
  double subdominant_modulus = 0.0;
};

/// Eigenvector for eigenvalue 1 of T[j,k] = c_{Aj-k}, normalized to sum 1.
/// Throws NonSimpleEigenvalue if eigenvalue 1 is not simple.
IntegerValues integer_values(const DilationMatrix& a, const RefinementCoefficients& c);

/// Values of phi at x = A^{-J} j for j in [lo, hi], dense, last coordinate fastest.
struct LatticeGrid {
  int J = 0;
  int d = 0;
  IntMatrix A;
  IntMatrix AJ;  // A^J
  IntMatrix AJ_adj;  // adj(A^J); A^{-J} = AJ_adj / AJ_det
  std::int64_t AJ_det = 1;
  IntVec lo, hi;
  std::vector<double> values;
  double quadrature_weight = 1.0;  // q^{-J}

  std::int64_t extent(int i) const { return hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)] + 1; }
  std::size_t size() const { return values.size(); }
  bool contains(std::span<const std::int64_t> j) const;
  /// Flat offset of j; j must be inside.
  std::size_t offset(std::span<const std::int64_t> j) const;
  /// 0 outside the stored box.
  double at(std::span<const std::int64_t> j) const;
  IntVec index(std::size_t flat) const;
  /// Cartesian coordinates A^{-J} j.
  RealVec coords(std::span<const std::int64_t> j) const;
  /// sum values * quadrature_weight
  double mass() const;
};

LatticeGrid initial_grid(const DilationMatrix& a, const IntegerValues& iv);

/// One subdivision step: v_{J+1}[j] = sum_k c_k v_J[j - A^J k].
LatticeGrid refine(const DilationMatrix& a, const RefinementCoefficients& c, const LatticeGrid& grid);

struct CascadeResult {
  IntegerValues integers;
  LatticeGrid grid;
};

CascadeResult run_cascade(const DilationMatrix& a, const RefinementCoefficients& c, int J);

/// Cascade for phi^m, i.e. on the coefficients of pow(m0, m) scaled by q.
LatticeGrid sample_phi_m(const DilationMatrix& a, const TrigPoly& m0, int m, int J);
RefinementCoefficients order_m_coefficients(const DilationMatrix& a, const TrigPoly& m0, int m);

struct PointValue {
  double value = 0.0;
  bool approximate = false;  // false only when x lies on the grid's lattice
};

/// Multilinear interpolation in index coordinates A^J x.
PointValue evaluate_at(const LatticeGrid& grid, std::span<const double> x);

/// Header "# A=..., J=..., d=..." then "x_1,...,x_d,value" rows in index order.
std::string grid_csv(const LatticeGrid& grid);

/// Discrete Fourier sum q^{-J} sum_j v_j exp(-i xi . A^{-J} j); real part.
double grid_fourier(const LatticeGrid& grid, std::span<const double> xi);

namespace reference {
/// Scatter form of refine, serial.
LatticeGrid refine(const DilationMatrix& a, const RefinementCoefficients& c, const LatticeGrid& grid);
}  // namespace reference

}  // namespace esf
