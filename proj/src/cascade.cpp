#include "esf/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Dense>

#include "esf/error.hpp"
#include "esf/io.hpp"

namespace esf {

namespace {

struct Tap {
  IntVec shift;  // A^J k
  double c;
};

std::vector<Tap> taps_at_level(const RefinementCoefficients& c, const IntMatrix& aj) {
  std::vector<Tap> taps;
  taps.reserve(c.c.size());
  for (const auto& [k, v] : c.c) taps.push_back({aj * k, v});
  return taps;
}

std::vector<std::int64_t> strides_of(const IntVec& lo, const IntVec& hi) {
  const std::size_t d = lo.size();
  std::vector<std::int64_t> s(d, 1);
  for (std::size_t i = d; i-- > 1;) s[i - 1] = s[i] * (hi[i] - lo[i] + 1);
  return s;
}

LatticeGrid next_level_shell(const DilationMatrix& a, const std::vector<Tap>& taps, const LatticeGrid& g) {
  LatticeGrid out;
  out.J = g.J + 1;
  out.d = g.d;
  out.A = g.A;
  out.AJ = g.AJ * a.A;
  out.AJ_adj = out.AJ.adjugate();
  out.AJ_det = out.AJ.det();
  out.quadrature_weight = g.quadrature_weight / static_cast<double>(a.q);
  out.lo = g.lo;
  out.hi = g.hi;
  for (int i = 0; i < g.d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    std::int64_t mn = std::numeric_limits<std::int64_t>::max(), mx = std::numeric_limits<std::int64_t>::min();
    for (const auto& t : taps) {
      mn = std::min(mn, t.shift[ui]);
      mx = std::max(mx, t.shift[ui]);
    }
    out.lo[ui] += mn;
    out.hi[ui] += mx;
  }
  std::size_t n = 1;
  for (int i = 0; i < out.d; ++i) n *= static_cast<std::size_t>(out.extent(i));
  out.values.assign(n, 0.0);
  return out;
}

}  // namespace

SupportBox support_box(const DilationMatrix& a, const RefinementCoefficients& c, double tol) {
  if (c.c.empty()) fail(ErrorCode::InvalidArgument, "empty refinement coefficients");
  const int d = a.d;
  const Eigen::MatrixXd ainv = a.real().inverse();
  std::vector<Eigen::VectorXd> pts;
  for (const auto& [k, v] : c.c) {
    Eigen::VectorXd p(d);
    for (int i = 0; i < d; ++i) p(i) = static_cast<double>(k[static_cast<std::size_t>(i)]);
    pts.push_back(p);
  }
  SupportBox box;
  box.lo_real.assign(static_cast<std::size_t>(d), 0.0);
  box.hi_real.assign(static_cast<std::size_t>(d), 0.0);
  // bbox of sum_{j>=1} A^{-j} hull(supp c) is the sum of the bboxes of the terms
  for (int it = 1; it <= 10000; ++it) {
    double change = 0.0;
    for (auto& p : pts) p = ainv * p;
    for (int i = 0; i < d; ++i) {
      double mn = pts[0](i), mx = pts[0](i);
      for (const auto& p : pts) {
        mn = std::min(mn, p(i));
        mx = std::max(mx, p(i));
      }
      box.lo_real[static_cast<std::size_t>(i)] += mn;
      box.hi_real[static_cast<std::size_t>(i)] += mx;
      change = std::max({change, std::abs(mn), std::abs(mx)});
    }
    box.iterations = it;
    if (change < tol) {
      box.lo.resize(static_cast<std::size_t>(d));
      box.hi.resize(static_cast<std::size_t>(d));
      for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
        box.lo[i] = static_cast<std::int64_t>(std::floor(box.lo_real[i] + 1e-9));
        box.hi[i] = static_cast<std::int64_t>(std::ceil(box.hi_real[i] - 1e-9));
      }
      return box;
    }
  }
  fail(ErrorCode::NoConvergence, "support box iteration did not converge");
}

IntegerValues integer_values(const DilationMatrix& a, const RefinementCoefficients& c) {
  IntegerValues out;
  out.box = support_box(a, c);
  std::vector<IntVec> pts;
  std::map<IntVec, int> where;
  for_box(out.box.lo, out.box.hi, [&](const IntVec& j) {
    where.emplace(j, static_cast<int>(pts.size()));
    pts.push_back(j);
  });
  const int n = static_cast<int>(pts.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    const IntVec aj = a.A * pts[static_cast<std::size_t>(r)];
    for (const auto& [k, v] : c.c) {
      IntVec col = aj;
      for (std::size_t i = 0; i < col.size(); ++i) col[i] -= k[i];
      auto it = where.find(col);
      if (it != where.end()) t(r, it->second) += v;
    }
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(t, false);
  if (es.info() != Eigen::Success) fail(ErrorCode::NumericalBreakdown, "transition matrix eigensolver failed");
  const auto ev = es.eigenvalues();
  int closest = -1;
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev(i) - 1.0) < 1e-7) ++out.eigenvalue_one_multiplicity;
    if (closest < 0 || std::abs(ev(i) - 1.0) < std::abs(ev(closest) - 1.0)) closest = i;
  }
  for (int i = 0; i < n; ++i)
    if (i != closest) out.subdominant_modulus = std::max(out.subdominant_modulus, std::abs(ev(i)));
  if (out.eigenvalue_one_multiplicity == 0) fail(ErrorCode::NumericalBreakdown, "transition matrix has no eigenvalue 1");
  if (out.eigenvalue_one_multiplicity > 1) {
    fail(ErrorCode::NonSimpleEigenvalue, "eigenvalue 1 of the transition matrix has multiplicity " +
                                             std::to_string(out.eigenvalue_one_multiplicity));
  }

  // (T - I) v = 0 together with sum v = 1, least squares
  Eigen::MatrixXd sys(n + 1, n);
  sys.topRows(n) = t - Eigen::MatrixXd::Identity(n, n);
  sys.row(n).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs(n) = 1.0;
  Eigen::VectorXd v = sys.colPivHouseholderQr().solve(rhs);
  const double resid = (sys * v - rhs).cwiseAbs().maxCoeff();
  if (!(resid < 1e-9)) fail(ErrorCode::NumericalBreakdown, "eigenvector for eigenvalue 1 has zero sum");
  // QR dust at points outside the support, then renormalize so interpolating
  // masks get exact integer values
  const double dust = 1e-13 * v.cwiseAbs().maxCoeff();
  double sum = 0.0;
  for (int r = 0; r < n; ++r) {
    if (std::abs(v(r)) <= dust) v(r) = 0.0;
    sum += v(r);
  }
  for (int r = 0; r < n; ++r) out.values.emplace(pts[static_cast<std::size_t>(r)], v(r) / sum);
  return out;
}

bool LatticeGrid::contains(std::span<const std::int64_t> j) const {
  for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i)
    if (j[i] < lo[i] || j[i] > hi[i]) return false;
  return true;
}

std::size_t LatticeGrid::offset(std::span<const std::int64_t> j) const {
  std::size_t off = 0;
  for (int i = 0; i < d; ++i)
    off = off * static_cast<std::size_t>(extent(i)) +
          static_cast<std::size_t>(j[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
  return off;
}

double LatticeGrid::at(std::span<const std::int64_t> j) const {
  return contains(j) ? values[offset(j)] : 0.0;
}

IntVec LatticeGrid::index(std::size_t flat) const {
  IntVec j(static_cast<std::size_t>(d));
  for (int i = d - 1; i >= 0; --i) {
    const auto e = static_cast<std::size_t>(extent(i));
    j[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + static_cast<std::int64_t>(flat % e);
    flat /= e;
  }
  return j;
}

RealVec LatticeGrid::coords(std::span<const std::int64_t> j) const {
  const IntVec v(j.begin(), j.end());
  const IntVec num = AJ_adj * v;
  RealVec x(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) x[i] = static_cast<double>(num[i]) / static_cast<double>(AJ_det);
  return x;
}

double LatticeGrid::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * quadrature_weight;
}

LatticeGrid initial_grid(const DilationMatrix& a, const IntegerValues& iv) {
  LatticeGrid g;
  g.J = 0;
  g.d = a.d;
  g.A = a.A;
  g.AJ = IntMatrix::identity(a.d);
  g.AJ_adj = g.AJ;
  g.AJ_det = 1;
  g.lo = iv.box.lo;
  g.hi = iv.box.hi;
  for_box(g.lo, g.hi, [&](const IntVec& j) {
    auto it = iv.values.find(j);
    g.values.push_back(it == iv.values.end() ? 0.0 : it->second);
  });
  return g;
}

LatticeGrid refine(const DilationMatrix& a, const RefinementCoefficients& c, const LatticeGrid& g) {
  const auto taps = taps_at_level(c, g.AJ);
  LatticeGrid out = next_level_shell(a, taps, g);
  const int d = g.d;
  const auto in_stride = strides_of(g.lo, g.hi);
  const auto n = static_cast<std::int64_t>(out.values.size());
  // tap offsets in the input's flat layout
  std::vector<std::int64_t> tap_off(taps.size());
  for (std::size_t t = 0; t < taps.size(); ++t) {
    std::int64_t o = 0;
    for (int i = 0; i < d; ++i) o += taps[t].shift[static_cast<std::size_t>(i)] * in_stride[static_cast<std::size_t>(i)];
    tap_off[t] = o;
  }

#pragma omp parallel for schedule(static)
  for (std::int64_t f = 0; f < n; ++f) {
    std::int64_t j[16];
    std::int64_t rem = f;
    for (int i = d - 1; i >= 0; --i) {
      const std::int64_t e = out.extent(i);
      j[i] = out.lo[static_cast<std::size_t>(i)] + rem % e;
      rem /= e;
    }
    std::int64_t base = 0;
    for (int i = 0; i < d; ++i) base += (j[i] - g.lo[static_cast<std::size_t>(i)]) * in_stride[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (std::size_t t = 0; t < taps.size(); ++t) {
      bool inside = true;
      for (int i = 0; i < d && inside; ++i) {
        const std::int64_t src = j[i] - taps[t].shift[static_cast<std::size_t>(i)];
        inside = src >= g.lo[static_cast<std::size_t>(i)] && src <= g.hi[static_cast<std::size_t>(i)];
      }
      if (inside) s += taps[t].c * g.values[static_cast<std::size_t>(base - tap_off[t])];
    }
    out.values[static_cast<std::size_t>(f)] = s;
  }
  return out;
}

namespace reference {

LatticeGrid refine(const DilationMatrix& a, const RefinementCoefficients& c, const LatticeGrid& g) {
  const auto taps = taps_at_level(c, g.AJ);
  LatticeGrid out = next_level_shell(a, taps, g);
  for (std::size_t f = 0; f < g.values.size(); ++f) {
    const IntVec j = g.index(f);
    for (const auto& t : taps) {
      IntVec dst = j;
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += t.shift[i];
      out.values[out.offset(dst)] += t.c * g.values[f];
    }
  }
  return out;
}

}  // namespace reference

CascadeResult run_cascade(const DilationMatrix& a, const RefinementCoefficients& c, int J) {
  if (J < 0) fail(ErrorCode::InvalidArgument, "cascade level must be >= 0");
  if (a.d > 16) fail(ErrorCode::InvalidArgument, "cascade supports d <= 16");
  CascadeResult r;
  r.integers = integer_values(a, c);
  r.grid = initial_grid(a, r.integers);
  for (int j = 0; j < J; ++j) r.grid = refine(a, c, r.grid);
  return r;
}

RefinementCoefficients order_m_coefficients(const DilationMatrix& a, const TrigPoly& m0, int m) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "order m must be >= 1");
  return refinement_coefficients(pow(m0, m), a.q);
}

LatticeGrid sample_phi_m(const DilationMatrix& a, const TrigPoly& m0, int m, int J) {
  return run_cascade(a, order_m_coefficients(a, m0, m), J).grid;
}

PointValue evaluate_at(const LatticeGrid& g, std::span<const double> x) {
  if (static_cast<int>(x.size()) != g.d) fail(ErrorCode::InvalidArgument, "dimension mismatch in evaluate_at");
  const Eigen::MatrixXd aj = g.AJ.to_real();
  const int d = g.d;
  std::vector<double> y(static_cast<std::size_t>(d));
  bool on_lattice = true;
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += aj(i, k) * x[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(i)] = s;
    if (std::abs(s - std::round(s)) > 1e-9) on_lattice = false;
  }
  PointValue pv;
  IntVec j(static_cast<std::size_t>(d));
  if (on_lattice) {
    for (std::size_t i = 0; i < j.size(); ++i) j[i] = static_cast<std::int64_t>(std::llround(y[i]));
    pv.value = g.at(j);
    return pv;
  }
  pv.approximate = true;
  IntVec base(static_cast<std::size_t>(d));
  std::vector<double> frac(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double fl = std::floor(y[i]);
    base[i] = static_cast<std::int64_t>(fl);
    frac[i] = y[i] - fl;
  }
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const bool up = (mask >> i) & 1u;
      j[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] + (up ? 1 : 0);
      w *= up ? frac[static_cast<std::size_t>(i)] : 1.0 - frac[static_cast<std::size_t>(i)];
    }
    if (w != 0.0) pv.value += w * g.at(j);
  }
  return pv;
}

std::string grid_csv(const LatticeGrid& g) {
  std::string out = "# A=" + g.A.to_string() + ", J=" + std::to_string(g.J) + ", d=" + std::to_string(g.d) + "\n";
  out.reserve(out.size() + g.values.size() * static_cast<std::size_t>(24 * (g.d + 1)));
  for (std::size_t f = 0; f < g.values.size(); ++f) {
    const IntVec j = g.index(f);
    for (double xi : g.coords(j)) {
      out += fmt17(xi);
      out += ',';
    }
    out += fmt17(g.values[f]);
    out += '\n';
  }
  return out;
}

double grid_fourier(const LatticeGrid& g, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != g.d) fail(ErrorCode::InvalidArgument, "dimension mismatch in grid_fourier");
  // xi . A^{-J} j = (A^{-T J} xi) . j
  const Eigen::MatrixXd ajit = g.AJ.to_real().transpose().inverse();
  Eigen::VectorXd e(g.d);
  for (int i = 0; i < g.d; ++i) e(i) = xi[static_cast<std::size_t>(i)];
  const Eigen::VectorXd w = ajit * e;
  double s = 0.0;
  for (std::size_t f = 0; f < g.values.size(); ++f) {
    if (g.values[f] == 0.0) continue;
    const IntVec j = g.index(f);
    double ph = 0.0;
    for (int i = 0; i < g.d; ++i) ph += w(i) * static_cast<double>(j[static_cast<std::size_t>(i)]);
    s += g.values[f] * std::cos(ph);
  }
  return s * g.quadrature_weight;
}

}  // namespace esf
