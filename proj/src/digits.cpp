#include "esf/digits.hpp"

#include <algorithm>
#include <cstdlib>

#include "esf/error.hpp"
#include "esf/matana.hpp"

namespace esf {

DigitSet digit_set(const IntMatrix& a) {
  const int d = a.dim();
  const std::int64_t det = a.det();
  if (det == 0) fail(ErrorCode::Singular, "digit set of a singular matrix");
  const std::int64_t q = std::llabs(det);
  const std::int64_t sgn = det > 0 ? 1 : -1;
  const IntMatrix adj = a.adjugate();

  // A[0,1]^d is the convex hull of the images of the cube corners.
  IntVec lo(static_cast<std::size_t>(d), 0), hi(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (a(i, j) < 0) lo[static_cast<std::size_t>(i)] += a(i, j);
      else hi[static_cast<std::size_t>(i)] += a(i, j);
    }
    lo[static_cast<std::size_t>(i)] -= 1;
    hi[static_cast<std::size_t>(i)] += 1;
  }

  DigitSet ds;
  ds.A = a;
  for_box(lo, hi, [&](const IntVec& n) {
    const IntVec t = adj * n;
    for (int i = 0; i < d; ++i) {
      const std::int64_t v = sgn * t[static_cast<std::size_t>(i)];
      if (v < 0 || v >= q) return;
    }
    RationalVec s(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) s[static_cast<std::size_t>(i)] = Rational(sgn * t[static_cast<std::size_t>(i)], q);
    ds.W.push_back(n);
    ds.S.push_back(std::move(s));
  });

  return ds;
}

DigitSet digit_set(const DilationMatrix& a) { return digit_set(a.A); }

bool verify_coset_partition(const DigitSet& ds, int radius) {
  if (radius < 1) fail(ErrorCode::InvalidArgument, "radius must be >= 1");
  const int d = ds.A.dim();
  const std::int64_t det = ds.A.det();
  const std::int64_t q = std::llabs(det);
  const IntMatrix adj = ds.A.adjugate();
  // n - w in A Z^d  <=>  adj(A) (n - w) is divisible by det.
  auto in_lattice = [&](const IntVec& v) {
    const IntVec t = adj * v;
    return std::all_of(t.begin(), t.end(), [&](std::int64_t x) { return x % q == 0; });
  };
  bool ok = true;
  IntVec lo(static_cast<std::size_t>(d), -radius), hi(static_cast<std::size_t>(d), radius);
  for_box(lo, hi, [&](const IntVec& n) {
    if (!ok) return;
    int hits = 0;
    for (const auto& w : ds.W) {
      IntVec diff(n.size());
      for (std::size_t i = 0; i < n.size(); ++i) diff[i] = n[i] - w[i];
      if (in_lattice(diff)) ++hits;
    }
    if (hits != 1) ok = false;
  });
  return ok;
}

}  // namespace esf
