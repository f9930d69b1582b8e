#include "esf/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "esf/error.hpp"
#include "esf/rng.hpp"

namespace esf {

namespace {

IntVec unit(int d, int i, std::int64_t s = 1) {
  IntVec v(static_cast<std::size_t>(d), 0);
  v[static_cast<std::size_t>(i)] = s;
  return v;
}

IntVec plus(IntVec a, const IntVec& b, std::int64_t s = 1) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
  return a;
}

void add_tap(std::map<IntVec, double>& t, const IntVec& n, double w) {
  auto [it, fresh] = t.emplace(n, w);
  if (!fresh) it->second += w;
  if (it->second == 0.0) t.erase(it);
}

LatticeGrid shell_for(const DifferenceStencil& st, const LatticeGrid& g, std::vector<IntVec>& shifts) {
  shifts.clear();
  for (const auto& [n, w] : st.taps) shifts.push_back(g.AJ * n);
  LatticeGrid out = g;
  for (int i = 0; i < g.d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    std::int64_t mn = 0, mx = 0;
    for (const auto& s : shifts) {
      mn = std::min(mn, s[ui]);
      mx = std::max(mx, s[ui]);
    }
    out.lo[ui] += mn;
    out.hi[ui] += mx;
  }
  std::size_t n = 1;
  for (int i = 0; i < out.d; ++i) n *= static_cast<std::size_t>(out.extent(i));
  out.values.assign(n, 0.0);
  return out;
}

LatticeGrid apply_once(const DifferenceStencil& st, const LatticeGrid& g) {
  std::vector<IntVec> shifts;
  LatticeGrid out = shell_for(st, g, shifts);
  std::vector<double> w;
  for (const auto& [n, v] : st.taps) w.push_back(v);
  const int d = g.d;
  const auto total = static_cast<std::int64_t>(out.values.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t f = 0; f < total; ++f) {
    std::int64_t j[16], src[16];
    std::int64_t rem = f;
    for (int i = d - 1; i >= 0; --i) {
      const std::int64_t e = out.extent(i);
      j[i] = out.lo[static_cast<std::size_t>(i)] + rem % e;
      rem /= e;
    }
    double s = 0.0;
    for (std::size_t t = 0; t < shifts.size(); ++t) {
      for (int i = 0; i < d; ++i) src[i] = j[i] - shifts[t][static_cast<std::size_t>(i)];
      s += w[t] * g.at(std::span<const std::int64_t>(src, static_cast<std::size_t>(d)));
    }
    out.values[static_cast<std::size_t>(f)] = s;
  }
  return out;
}

double lattice_distance(std::span<const double> xi) {
  double s = 0.0;
  for (double x : xi) {
    const double r = std::remainder(x, 2 * std::numbers::pi);
    s += r * r;
  }
  return std::sqrt(s);
}

}  // namespace

TrigPoly DifferenceStencil::symbol() const {
  TrigPoly p(d);
  for (const auto& [n, w] : taps) p.add(n, w);
  return p;
}

DifferenceStencil build_stencil(const Eigen::MatrixXd& q2) {
  const int d = static_cast<int>(q2.rows());
  if (d < 1 || q2.cols() != d) fail(ErrorCode::InvalidArgument, "quadratic form must be square");
  DifferenceStencil st;
  st.d = d;
  const IntVec zero(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < d; ++i) {
    // -q_ii (f(x - e_i) - 2 f(x) + f(x + e_i))
    const double q = q2(i, i);
    add_tap(st.taps, unit(d, i), -q);
    add_tap(st.taps, unit(d, i, -1), -q);
    add_tap(st.taps, zero, 2 * q);
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      // -2 q_ij D_ij, D_ij f = (f(x+e_i+e_j) + f(x-e_i-e_j) - f(x+e_i-e_j) - f(x-e_i+e_j)) / 4
      const double q = q2(i, j);
      if (q == 0.0) continue;
      const IntVec s = plus(unit(d, i), unit(d, j));
      const IntVec t = plus(unit(d, i), unit(d, j), -1);
      add_tap(st.taps, s, -q / 2);
      add_tap(st.taps, plus(zero, s, -1), -q / 2);
      add_tap(st.taps, t, q / 2);
      add_tap(st.taps, plus(zero, t, -1), q / 2);
    }
  return st;
}

DifferenceStencil build_stencil(const QuadraticForm& q2) { return build_stencil(q2.Q2); }

LatticeGrid apply_stencil(const DifferenceStencil& st, const LatticeGrid& grid, int k) {
  if (k < 0) fail(ErrorCode::InvalidArgument, "stencil power must be >= 0");
  if (st.d != grid.d) fail(ErrorCode::InvalidArgument, "stencil and grid dimensions differ");
  if (grid.d > 16) fail(ErrorCode::InvalidArgument, "apply_stencil supports d <= 16");
  LatticeGrid g = grid;
  for (int i = 0; i < k; ++i) g = apply_once(st, g);
  return g;
}

namespace reference {

LatticeGrid apply_stencil(const DifferenceStencil& st, const LatticeGrid& grid, int k) {
  LatticeGrid g = grid;
  for (int r = 0; r < k; ++r) {
    std::vector<IntVec> shifts;
    LatticeGrid out = shell_for(st, g, shifts);
    std::size_t t = 0;
    for (const auto& [n, w] : st.taps) {
      for (std::size_t f = 0; f < g.values.size(); ++f) {
        const IntVec dst = plus(g.index(f), shifts[t]);
        out.values[out.offset(dst)] += w * g.values[f];
      }
      ++t;
    }
    g = std::move(out);
  }
  return g;
}

}  // namespace reference

double verify_operator_relation(const SpectralProfile& p, int m, int k, std::uint64_t seed) {
  if (m < 1 || k < 1 || k >= m) fail(ErrorCode::InvalidArgument, "operator relation needs 1 <= k < m");
  const int d = p.dim();
  const double tol = 1e-13;
  Rng rng(seed);
  double worst = 0.0;
  int done = 0;
  Eigen::VectorXd eta(d);
  std::vector<double> buf(static_cast<std::size_t>(d));
  while (done < 200) {
    const auto xi = rng.point(d, -3 * std::numbers::pi, 3 * std::numbers::pi);
    if (lattice_distance(xi) <= 0.1) continue;
    ++done;
    // phi_hat^1 through the refinement product
    for (int i = 0; i < d; ++i) eta(i) = xi[static_cast<std::size_t>(i)];
    double prod = 1.0;
    for (int j = 0; j < 30; ++j) {
      eta = p.ait * eta;
      for (int i = 0; i < d; ++i) buf[static_cast<std::size_t>(i)] = eta(i);
      prod *= m0_eval(p, buf);
    }
    const double phi1 = prod * phi_hat_order(p, buf, 1, tol);
    const double pv = eval_P(p.Q2.Q2, xi);
    const double mv = M_eval(p, xi, tol);
    const double lhs = std::pow(pv / mv, k) * std::pow(phi1, m);
    const double rhs = std::pow(eval_G(p.Q2.Q2, xi), k) * phi_hat_order(p, xi, m - k, tol);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return worst;
}

TrigPoly green_combination(const SpectralProfile& p, int m) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "order m must be >= 1");
  return pow(p.G, m);
}

double DeltaSharpSymbol::operator()(std::span<const double> xi) const {
  return eval_P(profile->Q2.Q2, xi) / M_eval(*profile, xi, tol);
}

double GreenSpectrum::operator()(std::span<const double> xi) const {
  const double pv = eval_P(profile->Q2.Q2, xi);
  if (pv == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(M_eval(*profile, xi, tol) / pv, m);
}

}  // namespace esf
