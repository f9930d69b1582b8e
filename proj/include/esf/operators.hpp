#pragma once

#include <map>
#include <span>

#include "esf/cascade.hpp"
#include "esf/spectral.hpp"
#include "esf/trigpoly.hpp"

namespace esf {

/// (Gf)(x) = sum_n taps[n] f(x - n); its symbol sum_n taps[n] e^{-i n.xi} is G.
struct DifferenceStencil {
  int d = 0;
  std::map<IntVec, double> taps;

  TrigPoly symbol() const;
};

/// Taps of -sum q_ii D_i^2 - 2 sum_{i<j} q_ij D_ij with central differences.
DifferenceStencil build_stencil(const QuadraticForm& q2);
DifferenceStencil build_stencil(const Eigen::MatrixXd& q2);

/// k-fold application on the lattice of the grid; inputs outside the box are 0
/// and the output box grows by the stencil footprint so nothing is cut off.
LatticeGrid apply_stencil(const DifferenceStencil& st, const LatticeGrid& grid, int k);

/// Max relative residual of (P/M)^k phi_hat^m = G^k phi_hat^{m-k} at 200 seeded
/// xi in [-3pi, 3pi]^d at distance > 0.1 from 2 pi Z^d. The left side takes
/// phi_hat^m from 30 mask factors and a phi_hat tail, the right side from M.
double verify_operator_relation(const SpectralProfile& p, int m, int k, std::uint64_t seed = 1);

/// G^m: the weights w_k with phi^m = sum_k w_k rho(. - k).
TrigPoly green_combination(const SpectralProfile& p, int m);

/// xi -> P(xi) / M(xi)
struct DeltaSharpSymbol {
  const SpectralProfile* profile = nullptr;
  double tol = 1e-12;
  double operator()(std::span<const double> xi) const;
};

/// xi -> (M(xi) / P(xi))^m, the Fourier transform of the Green function rho.
struct GreenSpectrum {
  const SpectralProfile* profile = nullptr;
  int m = 1;
  double tol = 1e-12;
  double operator()(std::span<const double> xi) const;
};

namespace reference {
LatticeGrid apply_stencil(const DifferenceStencil& st, const LatticeGrid& grid, int k);
}

}  // namespace esf
