#include "esf/properties.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "esf/error.hpp"
#include "esf/operators.hpp"
#include "esf/rng.hpp"

namespace esf {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::int64_t pos_mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

// Fornberg weights for the derivative of order k at 0 on nodes -p..p.
std::vector<double> fd_weights(int k, int p) {
  const int n = 2 * p + 1;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = i - p;
  // c[i][j]: weight of node i for derivative j
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(k + 1), 0.0));
  double c1 = 1.0, c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const int mn = std::min(i, k);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[ui];
    for (int j = 0; j < i; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      const double c3 = x[ui] - x[uj];
      c2 *= c3;
      if (j == i - 1) {
        for (int s = mn; s >= 1; --s)
          c[ui][static_cast<std::size_t>(s)] =
              c1 * (s * c[ui - 1][static_cast<std::size_t>(s - 1)] - c5 * c[ui - 1][static_cast<std::size_t>(s)]) / c2;
        c[ui][0] = -c1 * c5 * c[ui - 1][0] / c2;
      }
      for (int s = mn; s >= 1; --s)
        c[uj][static_cast<std::size_t>(s)] =
            (c4 * c[uj][static_cast<std::size_t>(s)] - s * c[uj][static_cast<std::size_t>(s - 1)]) / c3;
      c[uj][0] = c4 * c[uj][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  return w;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// x-space bounding box of the grid's index box.
void grid_extent(const LatticeGrid& g, RealVec& lo, RealVec& hi) {
  lo.assign(static_cast<std::size_t>(g.d), 1e300);
  hi.assign(static_cast<std::size_t>(g.d), -1e300);
  for (unsigned mask = 0; mask < (1u << g.d); ++mask) {
    IntVec c(static_cast<std::size_t>(g.d));
    for (int i = 0; i < g.d; ++i)
      c[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? g.hi[static_cast<std::size_t>(i)] : g.lo[static_cast<std::size_t>(i)];
    const RealVec x = g.coords(c);
    for (std::size_t i = 0; i < x.size(); ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  }
}

// Integer index box covering A^J [lo, hi]^d.
void index_box(const IntMatrix& aj, double lo, double hi, IntVec& ilo, IntVec& ihi) {
  const int d = aj.dim();
  const Eigen::MatrixXd a = aj.to_real();
  ilo.assign(static_cast<std::size_t>(d), 0);
  ihi.assign(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < d; ++i) {
    double mn = 0, mx = 0;
    for (int k = 0; k < d; ++k) {
      mn += std::min(a(i, k) * lo, a(i, k) * hi);
      mx += std::max(a(i, k) * lo, a(i, k) * hi);
    }
    ilo[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(mn)) - 1;
    ihi[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::ceil(mx)) + 1;
  }
}

bool inside_window(const RealVec& x, double lo, double hi) {
  for (double v : x)
    if (v < lo - 1e-12 || v > hi + 1e-12) return false;
  return true;
}

}  // namespace

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
  }
  return "unknown";
}

bool PropertyReport::passed() const {
  return std::none_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

const CheckResult* PropertyReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

Json PropertyReport::to_json(bool timings) const {
  Json j;
  j["matrix"] = matrix;
  j["m"] = m;
  j["passed"] = passed();
  Json arr = Json::array();
  for (const auto& c : checks) {
    Json e;
    e["name"] = c.name;
    e["status"] = std::string(esf::to_string(c.status));
    e["residual"] = c.residual;
    e["tolerance"] = c.tolerance;
    if (timings) e["runtime_s"] = c.runtime_s;
    e["detail"] = c.detail;
    arr.push_back(e);
  }
  j["checks"] = arr;
  return j;
}

double check_partition_of_unity(const LatticeGrid& g) {
  if (g.J < 3) fail(ErrorCode::InvalidArgument, "partition of unity check needs J >= 3");
  const std::int64_t det = std::llabs(g.AJ_det);
  std::map<IntVec, double> sums;
  for (std::size_t f = 0; f < g.size(); ++f) {
    IntVec key = g.AJ_adj * g.index(f);
    for (auto& v : key) v = pos_mod(v, det);
    sums[key] += g.values[f];
  }
  double worst = static_cast<std::int64_t>(sums.size()) == det ? 0.0 : 1.0;
  for (const auto& [k, s] : sums) worst = std::max(worst, std::abs(s - 1.0));
  return worst;
}

PositivityResult check_total_positivity(const std::function<double(std::span<const double>)>& phi_hat, int d,
                                        int grid_n) {
  const auto vals = sample_grid(d, grid_n, -3 * kTwoPi, 3 * kTwoPi, phi_hat);
  PositivityResult r;
  r.min_value = *std::min_element(vals.begin(), vals.end());
  r.passed = r.min_value >= -1e-10;
  return r;
}

PositivityResult check_total_positivity(const SpectralProfile& p, int grid_n, double tol) {
  return check_total_positivity([&](std::span<const double> xi) { return phi_hat(p, xi, tol); }, p.dim(), grid_n);
}

double phi_hat_mask_product(const TrigPoly& m0, const Eigen::MatrixXd& ait, std::span<const double> xi, int factors) {
  const int d = static_cast<int>(xi.size());
  Eigen::VectorXd eta(d);
  for (int i = 0; i < d; ++i) eta(i) = xi[static_cast<std::size_t>(i)];
  std::vector<double> buf(static_cast<std::size_t>(d));
  double prod = 1.0;
  for (int j = 0; j < factors; ++j) {
    eta = ait * eta;
    for (int i = 0; i < d; ++i) buf[static_cast<std::size_t>(i)] = eta(i);
    prod *= m0.eval(buf).real();
  }
  return prod;
}

double check_strang_fix(const SpectralProfile& p, int m, double h, double tol) {
  const int d = p.dim();
  const int max_order = 2 * m - 1;
  std::vector<std::vector<double>> w(static_cast<std::size_t>(max_order + 1));
  std::vector<int> half(static_cast<std::size_t>(max_order + 1));
  for (int k = 0; k <= max_order; ++k) {
    half[static_cast<std::size_t>(k)] = k == 0 ? 0 : (k + 1) / 2 + 1;
    w[static_cast<std::size_t>(k)] = fd_weights(k, half[static_cast<std::size_t>(k)]);
  }
  const auto orders = multi_indices(d, max_order);
  double worst = 0.0;
  const IntVec klo(static_cast<std::size_t>(d), -2), khi(static_cast<std::size_t>(d), 2);
  for_box(klo, khi, [&](const IntVec& k) {
    if (std::all_of(k.begin(), k.end(), [](std::int64_t v) { return v == 0; })) return;
    std::map<IntVec, double> cache;
    auto f = [&](const IntVec& off) {
      auto it = cache.find(off);
      if (it != cache.end()) return it->second;
      std::vector<double> xi(static_cast<std::size_t>(d));
      for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = kTwoPi * static_cast<double>(k[i]) + h * static_cast<double>(off[i]);
      const double v = phi_hat_order(p, xi, m, tol);
      cache.emplace(off, v);
      return v;
    };
    for (const auto& n : orders) {
      IntVec lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
      int total = 0;
      for (std::size_t i = 0; i < n.size(); ++i) {
        lo[i] = -half[static_cast<std::size_t>(n[i])];
        hi[i] = half[static_cast<std::size_t>(n[i])];
        total += static_cast<int>(n[i]);
      }
      double s = 0.0;
      for_box(lo, hi, [&](const IntVec& off) {
        double wt = 1.0;
        for (std::size_t i = 0; i < off.size(); ++i)
          wt *= w[static_cast<std::size_t>(n[i])][static_cast<std::size_t>(off[i] - lo[i])];
        if (wt != 0.0) s += wt * f(off);
      });
      worst = std::max(worst, std::abs(s) / std::pow(h, total));
    }
  });
  return worst;
}

double check_fourier_refinement(const SpectralProfile& p, int m, int samples, std::uint64_t seed, double tol) {
  const int d = p.dim();
  Rng rng(seed);
  double worst = 0.0;
  Eigen::VectorXd e(d);
  std::vector<double> y(static_cast<std::size_t>(d));
  for (int t = 0; t < samples; ++t) {
    const auto xi = rng.point(d, -1.5 * kTwoPi, 1.5 * kTwoPi);
    for (int i = 0; i < d; ++i) e(i) = xi[static_cast<std::size_t>(i)];
    const Eigen::VectorXd ye = p.ait * e;
    for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] = ye(i);
    const double lhs = phi_hat_order(p, xi, m, tol);
    const double rhs = std::pow(m0_eval(p, y), m) * phi_hat_order(p, y, m, tol);
    if (lhs == 0.0) continue;
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
  }
  return worst;
}

ConvolutionResult check_convolution(const SpectralProfile& p, int m1, int m2, int J, int samples, std::uint64_t seed) {
  if (m1 < 1 || m2 < 1) fail(ErrorCode::InvalidArgument, "convolution orders must be >= 1");
  if (J < 1) fail(ErrorCode::InvalidArgument, "convolution check needs J >= 1");
  const DilationMatrix& a = p.A;
  const auto c1 = order_m_coefficients(a, p.m0, m1);
  const auto c2 = order_m_coefficients(a, p.m0, m2);
  const auto ct = order_m_coefficients(a, p.m0, m1 + m2);
  const LatticeGrid f1c = run_cascade(a, c1, J - 1).grid;
  const LatticeGrid f1f = refine(a, c1, f1c);
  const LatticeGrid f2c = run_cascade(a, c2, J - 1).grid;
  const LatticeGrid f2f = refine(a, c2, f2c);
  const LatticeGrid target = run_cascade(a, ct, J - 1).grid;

  Rng rng(seed);
  std::vector<IntVec> pts;
  pts.emplace_back(static_cast<std::size_t>(a.d), 0);
  for (int t = 0; t < samples; ++t) pts.push_back(target.index(static_cast<std::size_t>(rng.below(target.size()))));

  const double r = std::pow(static_cast<double>(a.q), 2.0 / a.d);
  auto conv = [](const LatticeGrid& x, const LatticeGrid& y, const IntVec& j) {
    double s = 0.0;
    IntVec diff(j.size());
    for (std::size_t f = 0; f < x.size(); ++f) {
      if (x.values[f] == 0.0) continue;
      const IntVec i = x.index(f);
      for (std::size_t k = 0; k < j.size(); ++k) diff[k] = j[k] - i[k];
      s += x.values[f] * y.at(diff);
    }
    return s * x.quadrature_weight;
  };
  std::vector<double> rich(pts.size()), plain(pts.size());
  const auto n = static_cast<std::int64_t>(pts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < n; ++t) {
    const IntVec& i = pts[static_cast<std::size_t>(t)];
    const double cc = conv(f1c, f2c, i);
    const double cf = conv(f1f, f2f, a.A * i);
    const double want = target.at(i);
    rich[static_cast<std::size_t>(t)] = std::abs((r * cf - cc) / (r - 1.0) - want);
    plain[static_cast<std::size_t>(t)] = std::abs(cf - want);
  }
  ConvolutionResult out;
  out.points = static_cast<int>(pts.size());
  out.residual = *std::max_element(rich.begin(), rich.end());
  out.plain_residual = *std::max_element(plain.begin(), plain.end());
  return out;
}

NonDecayResult check_non_decay(const SpectralProfile& p, double tol) {
  const int d = p.dim();
  const IntMatrix at = p.A.A.transpose();
  NonDecayResult out;
  out.min_value = 1e300;
  for (const auto& s : p.digits_at.S) {
    if (std::all_of(s.begin(), s.end(), [](const Rational& v) { return v.num() == 0; })) continue;
    std::vector<double> xi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) xi[static_cast<std::size_t>(i)] = kTwoPi * s[static_cast<std::size_t>(i)].to_double();
    const double base = M_eval(p, xi, tol);
    out.min_value = std::min(out.min_value, base);
    IntMatrix aj = IntMatrix::identity(d);
    for (int j = 1; j <= 4; ++j) {
      aj = aj * at;
      std::vector<double> y(static_cast<std::size_t>(d), 0.0);
      for (int r = 0; r < d; ++r) {
        // (A^T)^j s = (A^T)^j sigma / q with sigma integer
        Rational acc(0);
        for (int c = 0; c < d; ++c) acc = acc + Rational(aj(r, c)) * s[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = kTwoPi * acc.to_double();
      }
      out.max_relative_change = std::max(out.max_relative_change, std::abs(M_eval(p, y, tol) - base) / base);
    }
  }
  if (out.min_value == 1e300) out.min_value = 1.0;
  return out;
}

ReproductionResult check_polynomial_reproduction(const LatticeGrid& g, int m, const Polynomial& poly) {
  const int deg = poly.total_degree();
  if (deg > 2 * m + 1) fail(ErrorCode::DegreeTooHigh, "polynomial degree exceeds 2m + 1");
  if (poly.d != g.d) fail(ErrorCode::InvalidArgument, "polynomial and grid dimensions differ");
  const int d = g.d;
  RealVec slo, shi;
  grid_extent(g, slo, shi);
  // shifts k with x - k in the support for some x in [-1, 1]^d
  IntVec klo(static_cast<std::size_t>(d)), khi(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < klo.size(); ++i) {
    klo[i] = static_cast<std::int64_t>(std::floor(-1.0 - shi[i])) - 1;
    khi[i] = static_cast<std::int64_t>(std::ceil(1.0 - slo[i])) + 1;
  }
  std::vector<std::pair<IntVec, double>> shifts;
  for_box(klo, khi, [&](const IntVec& k) {
    std::vector<double> kr(k.begin(), k.end());
    const double pk = poly.eval(kr);
    if (pk != 0.0) shifts.emplace_back(g.AJ * k, pk);
  });

  IntVec ilo, ihi;
  index_box(g.AJ, -1.0, 1.0, ilo, ihi);
  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  IntVec src(static_cast<std::size_t>(d));
  for_box(ilo, ihi, [&](const IntVec& j) {
    const RealVec x = g.coords(j);
    if (!inside_window(x, -1.0, 1.0)) return;
    double r = 0.0;
    for (const auto& [sh, pk] : shifts) {
      for (std::size_t i = 0; i < src.size(); ++i) src[i] = j[i] - sh[i];
      r += pk * g.at(src);
    }
    pts.push_back(x);
    vals.push_back(r - poly.eval(x));
  });
  ReproductionResult out;
  out.points = static_cast<int>(pts.size());
  const PolyFit fit = fit_polynomial(pts, vals, d, deg - 1);
  out.fit_residual = fit.max_residual;
  out.leading_ok = fit.max_residual < 1e-5;
  for (const auto& [a, c] : fit.poly.terms)
    if (std::abs(c) > 1e-8) {
      int s = 0;
      for (auto v : a) s += static_cast<int>(v);
      out.residual_degree = std::max(out.residual_degree, s);
    }
  return out;
}

Eigen::MatrixXd second_moments(const SpectralProfile& p, int m) {
  const int d = p.dim();
  // Sigma = B (S + Sigma) B^T with B = A^{-1}, S = sum_k coeff_k k k^T
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [k, c] : p.m0.coeffs())
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        s(i, j) += c.real() * static_cast<double>(k[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(j)]);
  const Eigen::MatrixXd b = p.A.real().inverse();
  Eigen::MatrixXd kron(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) kron.block(i * d, j * d, d, d) = b(i, j) * b;
  const Eigen::MatrixXd rhs = b * s * b.transpose();
  const Eigen::VectorXd vec = Eigen::Map<const Eigen::VectorXd>(rhs.data(), d * d);
  const Eigen::VectorXd sol = (Eigen::MatrixXd::Identity(d * d, d * d) - kron).partialPivLu().solve(vec);
  Eigen::MatrixXd sigma = Eigen::Map<const Eigen::MatrixXd>(sol.data(), d, d);
  sigma = 0.5 * (sigma + sigma.transpose());
  return static_cast<double>(m) * sigma;
}

ApproximationResult check_approximation_order(const SpectralProfile& p, int m,
                                              const std::function<double(std::span<const double>)>& f) {
  const DilationMatrix& a = p.A;
  const int d = a.d;
  const auto c = order_m_coefficients(a, p.m0, m);
  // prefilter a = delta + stencil(Sigma_m) / 2 so that hat(a) hat(phi^m) = 1 + O(|xi|^4)
  DifferenceStencil pre = build_stencil(second_moments(p, m));
  std::map<IntVec, double> taps;
  for (const auto& [n, w] : pre.taps) taps[n] += 0.5 * w;
  taps[IntVec(static_cast<std::size_t>(d), 0)] += 1.0;

  const double lq = std::log(static_cast<double>(a.q));
  // fine sampling of phi at spacing <= 1/2; first level where h * diam(supp phi) <= 1
  const int r = static_cast<int>(std::ceil(d * std::log(2.0) / lq - 1e-9));
  const LatticeGrid fine = run_cascade(a, c, r).grid;
  RealVec slo, shi;
  grid_extent(fine, slo, shi);
  double diam = 1.0;
  for (std::size_t i = 0; i < slo.size(); ++i) diam = std::max(diam, shi[i] - slo[i]);
  const int j0 = std::max(1, static_cast<int>(std::ceil(d * std::log(diam) / lq - 1e-9)));
  const IntMatrix ar = fine.AJ;

  ApproximationResult out;
  for (int J = j0; J < j0 + 3; ++J) {
    const IntMatrix aj = a.A.pow(J);
    const IntMatrix ajr = aj * ar;
    const IntMatrix ajr_adj = ajr.adjugate();
    const auto ajr_det = static_cast<double>(ajr.det());
    const IntMatrix ar_adj = ar.adjugate();
    const auto ar_det = static_cast<double>(ar.det());
    const IntMatrix aj_adj = aj.adjugate();
    const auto aj_det = static_cast<double>(aj.det());
    // coefficients lambda_k on the box of k with A^J x - k in supp phi for x in [-2, 2]^d
    IntVec ylo, yhi;
    index_box(aj, -2.0, 2.0, ylo, yhi);
    IntVec klo(static_cast<std::size_t>(d)), khi(static_cast<std::size_t>(d)), kext(static_cast<std::size_t>(d));
    std::size_t nk = 1;
    for (std::size_t i = 0; i < klo.size(); ++i) {
      klo[i] = ylo[i] - static_cast<std::int64_t>(std::ceil(shi[i])) - 1;
      khi[i] = yhi[i] - static_cast<std::int64_t>(std::floor(slo[i])) + 1;
      kext[i] = khi[i] - klo[i] + 1;
      nk *= static_cast<std::size_t>(kext[i]);
    }
    auto kflat = [&](const IntVec& k) {
      std::size_t f = 0;
      for (std::size_t i = 0; i < k.size(); ++i) f = f * static_cast<std::size_t>(kext[i]) + static_cast<std::size_t>(k[i] - klo[i]);
      return f;
    };
    std::vector<double> lambda(nk, 0.0);
    std::vector<double> x(static_cast<std::size_t>(d));
    for_box(klo, khi, [&](const IntVec& k) {
      double s = 0.0;
      for (const auto& [n, w] : taps) {
        IntVec kn = k;
        for (std::size_t i = 0; i < kn.size(); ++i) kn[i] -= n[i];
        const IntVec num = aj_adj * kn;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(num[i]) / aj_det;
        s += w * f(x);
      }
      lambda[kflat(k)] = s;
    });

    IntVec ilo, ihi;
    index_box(ajr, -2.0, 2.0, ilo, ihi);
    double sum2 = 0.0;
    long count = 0;
    IntVec src(static_cast<std::size_t>(d)), plo(static_cast<std::size_t>(d)), phi(static_cast<std::size_t>(d));
    std::vector<double> y(static_cast<std::size_t>(d));
    for_box(ilo, ihi, [&](const IntVec& j) {
      const IntVec num = ajr_adj * j;
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(num[i]) / ajr_det;
      if (!inside_window(x, -2.0, 2.0)) return;
      // y = A^J x = A^{-r} j; shifts k with y - k in the support
      const IntVec ny = ar_adj * j;
      for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = static_cast<double>(ny[i]) / ar_det;
        plo[i] = std::max(klo[i], static_cast<std::int64_t>(std::floor(y[i] - shi[i])) - 1);
        phi[i] = std::min(khi[i], static_cast<std::int64_t>(std::ceil(y[i] - slo[i])) + 1);
      }
      double qv = 0.0;
      for_box(plo, phi, [&](const IntVec& k) {
        const IntVec sh = ar * k;
        for (std::size_t i = 0; i < src.size(); ++i) src[i] = j[i] - sh[i];
        qv += lambda[kflat(k)] * fine.at(src);
      });
      const double e = qv - f(x);
      sum2 += e * e;
      ++count;
    });
    out.levels.push_back(J);
    out.errors.push_back(std::sqrt(sum2 / static_cast<double>(std::max(1L, count))));
  }
  out.exact = std::all_of(out.errors.begin(), out.errors.end(), [](double e) { return e < 1e-13; });
  if (!out.exact) {
    // least squares slope of log e against log h, h = q^{-J/d}
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(out.errors.size());
    for (std::size_t i = 0; i < out.errors.size(); ++i) {
      const double lx = -out.levels[i] / static_cast<double>(d) * lq;
      const double ly = std::log(out.errors[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return out;
}

PropertyReport run_all(const SpectralProfile& p, const PropertyConfig& cfg) {
  PropertyReport rep;
  rep.matrix = p.A.A.to_string();
  rep.m = p.m;
  const int m = p.m;
  const int d = p.dim();

  auto run = [&](const std::string& name, double tolerance, auto&& body) {
    CheckResult c;
    c.name = name;
    c.tolerance = tolerance;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(c);
    } catch (const Error& e) {
      c.status = CheckStatus::Fail;
      c.detail["error"] = std::string(to_string(e.code()));
      c.detail["message"] = e.what();
    }
    c.runtime_s = elapsed(t0);
    rep.checks.push_back(std::move(c));
  };
  auto verdict = [](bool ok) { return ok ? CheckStatus::Pass : CheckStatus::Fail; };

  run("riesz", p.threshold, [&](CheckResult& c) {
    c.residual = p.B_estimate;
    c.status = verdict(p.riesz_ok);
    c.detail["B"] = p.B_estimate;
    c.detail["threshold"] = p.threshold;
    c.detail["decay_exponent"] = p.decay_exponent;
  });

  std::optional<LatticeGrid> grid;
  run("cascade", 1.0, [&](CheckResult& c) {
    const auto coeffs = order_m_coefficients(p.A, p.m0, m);
    CascadeResult cr = run_cascade(p.A, coeffs, cfg.J);
    c.residual = static_cast<double>(cr.integers.eigenvalue_one_multiplicity);
    c.status = CheckStatus::Pass;
    c.detail["eigenvalue_one_multiplicity"] = cr.integers.eigenvalue_one_multiplicity;
    c.detail["subdominant_modulus"] = cr.integers.subdominant_modulus;
    c.detail["support_lo"] = to_json(cr.integers.box.lo);
    c.detail["support_hi"] = to_json(cr.integers.box.hi);
    c.detail["J"] = cfg.J;
    c.detail["points"] = cr.grid.size();
    c.detail["mass"] = cr.grid.mass();
    grid = std::move(cr.grid);
  });
  auto need_grid = [&] {
    if (!grid) fail(ErrorCode::NumericalBreakdown, "cascade values unavailable");
    return *grid;
  };

  run("partition_of_unity", 1e-8, [&](CheckResult& c) {
    c.residual = check_partition_of_unity(need_grid());
    c.status = verdict(c.residual <= c.tolerance);
  });

  run("total_positivity", 1e-10, [&](CheckResult& c) {
    const auto r = check_total_positivity(p, cfg.grid_n, cfg.tol);
    c.residual = r.min_value;
    c.status = verdict(r.passed);
    c.detail["grid_n"] = cfg.grid_n;
  });

  run("strang_fix", 1e-6, [&](CheckResult& c) {
    c.residual = check_strang_fix(p, m);
    c.status = verdict(c.residual <= c.tolerance);
    c.detail["max_derivative_order"] = 2 * m - 1;
  });

  run("fourier_refinement", 1e-8, [&](CheckResult& c) {
    c.residual = check_fourier_refinement(p, m, cfg.fourier_samples, cfg.seed);
    c.status = verdict(c.residual <= c.tolerance);
    c.detail["samples"] = cfg.fourier_samples;
  });

  run("convolution", 5e-3, [&](CheckResult& c) {
    const auto r = check_convolution(p, 1, m, cfg.J, cfg.convolution_samples, cfg.seed);
    c.residual = r.residual;
    c.status = verdict(r.residual <= c.tolerance);
    c.detail["orders"] = Json::array({1, m});
    c.detail["plain_residual"] = r.plain_residual;
    c.detail["points"] = r.points;
  });

  run("non_decay", 1e-9, [&](CheckResult& c) {
    const auto r = check_non_decay(p);
    c.residual = r.max_relative_change;
    c.status = verdict(r.max_relative_change <= c.tolerance && r.min_value > 0.0);
    c.detail["min_M"] = r.min_value;
  });

  run("polynomial_reproduction", 1e-5, [&](CheckResult& c) {
    const LatticeGrid& g = need_grid();
    bool ok = true;
    double worst = 0.0;
    Json items = Json::array();
    auto probe = [&](const Polynomial& poly, bool expect) {
      const auto r = check_polynomial_reproduction(g, m, poly);
      const bool good = r.leading_ok == expect;
      ok = ok && good;
      if (expect) worst = std::max(worst, r.fit_residual);
      Json e;
      e["p"] = poly.to_string();
      e["expected"] = expect ? "reproduced" : "not_reproduced";
      e["leading_ok"] = r.leading_ok;
      e["fit_residual"] = r.fit_residual;
      e["residual_degree"] = r.residual_degree;
      items.push_back(e);
    };
    for (const auto& alpha : multi_indices(d, 2 * m - 1)) probe(Polynomial::monomial(d, alpha), true);
    for (const auto& poly : null_space_basis(p.Q2.Q2, m, 2 * m)) probe(poly, true);
    probe(dual_form_power(p.Q2.Q2, m), false);
    c.residual = worst;
    c.status = verdict(ok);
    c.detail["probes"] = items;
  });

  run("approximation_order", 2.0 * m - 0.4, [&](CheckResult& c) {
    if (m >= 3) {
      c.status = CheckStatus::Skip;
      c.detail["reason"] = "prefilter only corrects the second moment";
      return;
    }
    const auto r = check_approximation_order(p, m, [](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v * v;
      return std::exp(-s);
    });
    c.residual = r.slope;
    c.status = verdict(r.exact || r.slope >= c.tolerance);
    c.detail["levels"] = r.levels;
    c.detail["errors"] = r.errors;
  });

  run("operator_relation", 1e-6, [&](CheckResult& c) {
    if (m < 2) {
      c.status = CheckStatus::Skip;
      c.detail["reason"] = "needs m >= 2";
      return;
    }
    for (int k = 1; k < m; ++k) c.residual = std::max(c.residual, verify_operator_relation(p, m, k, cfg.seed));
    c.status = verdict(c.residual <= c.tolerance);
  });

  return rep;
}

}  // namespace esf
