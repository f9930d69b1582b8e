#pragma once

#include <vector>

#include "esf/intmatrix.hpp"
#include "esf/rational.hpp"

namespace esf {

struct DilationMatrix;

/// Coset representatives W = Z^d ∩ A[0,1)^d of Z^d / A Z^d and S = A^{-1} W.
struct DigitSet {
  IntMatrix A;
  std::vector<IntVec> W;       // lexicographic order, contains 0
  std::vector<RationalVec> S;  // S[i] = A^{-1} W[i], entries in [0,1)
};

DigitSet digit_set(const IntMatrix& a);
DigitSet digit_set(const DilationMatrix& a);

/// True iff every n with |n|_inf <= radius is A k + w for exactly one w in W.
bool verify_coset_partition(const DigitSet& ds, int radius);

}  // namespace esf
