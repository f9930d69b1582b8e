#include "esf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "esf/error.hpp"

namespace esf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long double kTwoPiL = 2.0L * std::numbers::pi_v<long double>;
constexpr double kLatticeDelta = 1e-6;

using Vec = Eigen::VectorXd;

std::span<const double> as_span(const Vec& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

std::int64_t mod_pos(std::int64_t a, std::int64_t q) {
  std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

// mu at 2 pi k + v, using G(2 pi k + v) = G(v) and exact residues of A^{-T} k.
double mu_split(const SpectralProfile& p, const IntVec& k, const Vec& v) {
  const int d = p.dim();
  const double gxi = eval_G(p.Q2.Q2, as_span(v));
  if (gxi == 0.0) return 1.0;
  const std::int64_t q = p.A.q;
  const std::int64_t sgn = p.A.A.det() > 0 ? 1 : -1;
  const IntVec n = p.adj_at * k;
  IntVec res(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) res[static_cast<std::size_t>(i)] = mod_pos(sgn * n[static_cast<std::size_t>(i)], q);
  const Vec w = p.ait * v;
  Vec arg(d);
  auto g_at = [&](const IntVec& shift) {
    for (int i = 0; i < d; ++i) {
      std::int64_t r = mod_pos(res[static_cast<std::size_t>(i)] + (shift.empty() ? 0 : shift[static_cast<std::size_t>(i)]), q);
      if (2 * r >= q) r -= q;
      arg(i) = r == 0 ? w(i) : kTwoPi * static_cast<double>(r) / static_cast<double>(q) + w(i);
    }
    return eval_G(p.Q2.Q2, as_span(arg));
  };
  const double gy = g_at({});
  double num = 1.0;
  for (const auto& sigma : p.digit_numerators) num *= g_at(sigma);
  return p.A.scale() * (num / p.mask_den) * gy / gxi;
}

void split_lattice(std::span<const double> xi, IntVec& k, Vec& v) {
  const auto d = xi.size();
  k.assign(d, 0);
  v.resize(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    const long double x = xi[i];
    const long double kk = std::nearbyint(x / kTwoPiL);
    k[i] = static_cast<std::int64_t>(kk);
    v(static_cast<Eigen::Index>(i)) = static_cast<double>(x - kTwoPiL * kk);
  }
}

Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& q2) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q2);
  return es.operatorInverseSqrt();
}

std::vector<Vec> unit_directions(int d) {
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
  } else if (d == 2) {
    for (int t = 0; t < 64; ++t) {
      const double a = kTwoPi * t / 64.0;
      Vec u(2);
      u << std::cos(a), std::sin(a);
      dirs.push_back(u);
    }
  } else if (d == 3) {
    const int n = 200;
    const double ga = kPi * (3.0 - std::sqrt(5.0));
    for (int t = 0; t < n; ++t) {
      const double z = 1.0 - 2.0 * (t + 0.5) / n;
      const double r = std::sqrt(1.0 - z * z);
      Vec u(3);
      u << r * std::cos(ga * t), r * std::sin(ga * t), z;
      dirs.push_back(u);
    }
  } else {
    const long total = static_cast<long>(std::pow(3.0, d));
    for (long t = 0; t < total; ++t) {
      Vec u(d);
      long r = t;
      for (int i = 0; i < d; ++i) {
        u(i) = static_cast<double>(r % 3) - 1.0;
        r /= 3;
      }
      if (u.norm() > 0) dirs.push_back(u / u.norm());
    }
  }
  return dirs;
}

double calibrate_tail(const SpectralProfile& p) {
  const Eigen::MatrixXd qi = inverse_sqrt(p.Q2.Q2);
  double c = 0.0;
  for (const auto& u : unit_directions(p.dim())) {
    const Vec base = qi * u;  // P(base) = 1
    for (double r : {1.0, 0.75, 0.5, 0.25, 0.1, 0.01}) {
      const Vec x = r * base;
      const double px = r * r;
      c = std::max(c, std::abs(mu(p, as_span(x)) - 1.0) / px);
    }
  }
  return 2.0 * c;
}

double golden_max(const std::function<double(double)>& f, double a, double b, int iters, double& best_x) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  double best = std::max(f1, f2);
  best_x = f1 >= f2 ? x1 : x2;
  for (int i = 0; i < iters; ++i) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
      if (f1 > best) {
        best = f1;
        best_x = x1;
      }
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
      if (f2 > best) {
        best = f2;
        best_x = x2;
      }
    }
  }
  return best;
}

}  // namespace

double m0_eval(const SpectralProfile& p, std::span<const double> xi) {
  const int d = p.dim();
  Vec arg(d);
  double num = 1.0;
  const double q = static_cast<double>(p.A.q);
  for (const auto& sigma : p.digit_numerators) {
    for (int i = 0; i < d; ++i)
      arg(i) = xi[static_cast<std::size_t>(i)] + kTwoPi * static_cast<double>(sigma[static_cast<std::size_t>(i)]) / q;
    num *= eval_G(p.Q2.Q2, as_span(arg));
  }
  return num / p.mask_den;
}

double mu(const SpectralProfile& p, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != p.dim()) fail(ErrorCode::InvalidArgument, "mu: dimension mismatch");
  IntVec k;
  Vec v;
  split_lattice(xi, k, v);
  const double h = v.norm();
  if (h == 0.0) return 1.0;
  if (h >= kLatticeDelta) return mu_split(p, k, v);
  // Removable singularity: cubic extrapolation from nodes 2..5 delta along v.
  const Vec u = v / h;
  double t[4], f[4];
  for (int j = 0; j < 4; ++j) {
    t[j] = kLatticeDelta * (2.0 + j);
    f[j] = mu_split(p, k, Vec(t[j] * u));
  }
  double out = 0.0;
  for (int j = 0; j < 4; ++j) {
    double l = 1.0;
    for (int i = 0; i < 4; ++i)
      if (i != j) l *= (h - t[i]) / (t[j] - t[i]);
    out += l * f[j];
  }
  return out;
}

double M_eval(const SpectralProfile& p, std::span<const double> xi, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "M_eval: tol must be positive");
  Vec x = Eigen::Map<const Vec>(xi.data(), static_cast<Eigen::Index>(xi.size()));
  if (x.isZero(0.0)) return 1.0;
  const double r = 1.0 / p.A.scale();
  double prod = 1.0;
  for (int j = 0; j < 200; ++j) {
    prod *= mu(p, as_span(x));
    x = p.ait * x;
    const double px = eval_P(p.Q2.Q2, as_span(x));
    if (px == 0.0) break;
    if (px <= 1.0 && p.tail_constant * px / (1.0 - r) < tol) break;
  }
  return prod;
}

double phi_hat_order(const SpectralProfile& p, std::span<const double> xi, int order, double tol) {
  const double px = eval_P(p.Q2.Q2, xi);
  if (px == 0.0) return 1.0;
  const double ratio = eval_G(p.Q2.Q2, xi) / px;
  if (ratio == 0.0) return 0.0;
  return std::pow(ratio * M_eval(p, xi, tol), order);
}

double phi_hat(const SpectralProfile& p, std::span<const double> xi, double tol) {
  return phi_hat_order(p, xi, p.m, tol);
}

std::vector<double> sample_grid(int d, int n, double lo, double hi,
                                const std::function<double(std::span<const double>)>& f) {
  long total = 1;
  for (int i = 0; i < d; ++i) total *= n;
  std::vector<double> out(static_cast<std::size_t>(total));
  const double step = (hi - lo) / n;
#pragma omp parallel for schedule(static)
  for (long t = 0; t < total; ++t) {
    double x[16];
    long r = t;
    for (int i = d - 1; i >= 0; --i) {
      x[i] = lo + step * static_cast<double>(r % n);
      r /= n;
    }
    out[static_cast<std::size_t>(t)] = f(std::span<const double>(x, static_cast<std::size_t>(d)));
  }
  return out;
}

namespace reference {

std::vector<double> sample_grid(int d, int n, double lo, double hi,
                                const std::function<double(std::span<const double>)>& f) {
  long total = 1;
  for (int i = 0; i < d; ++i) total *= n;
  std::vector<double> out(static_cast<std::size_t>(total));
  const double step = (hi - lo) / n;
  std::vector<double> x(static_cast<std::size_t>(d));
  for (long t = 0; t < total; ++t) {
    long r = t;
    for (int i = d - 1; i >= 0; --i) {
      x[static_cast<std::size_t>(i)] = lo + step * static_cast<double>(r % n);
      r /= n;
    }
    out[static_cast<std::size_t>(t)] = f(x);
  }
  return out;
}

}  // namespace reference

BEstimate estimate_B(const SpectralProfile& p, int grid_n, int refine_iters) {
  if (grid_n < 32) fail(ErrorCode::InvalidArgument, "estimate_B: grid_n must be >= 32");
  const int d = p.dim();
  if (d > 16) fail(ErrorCode::InvalidArgument, "estimate_B: dimension too large");
  const auto vals = sample_grid(d, grid_n, -kPi, kPi, [&](std::span<const double> x) { return mu(p, x); });
  const double step = kTwoPi / grid_n;
  auto point = [&](std::size_t t) {
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int i = d - 1; i >= 0; --i) {
      x[static_cast<std::size_t>(i)] = -kPi + step * static_cast<double>(t % static_cast<std::size_t>(grid_n));
      t /= static_cast<std::size_t>(grid_n);
    }
    return x;
  };

  std::vector<std::size_t> order(vals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t top = std::min<std::size_t>(16, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(top), order.end(), [&](std::size_t a, std::size_t b) {
    return vals[a] != vals[b] ? vals[a] > vals[b] : a < b;
  });

  BEstimate est;
  est.grid_value = vals[order[0]];
  est.value = est.grid_value;
  est.argmax = point(order[0]);
  if (est.value < 1.0) {  // mu(0) = 1 even when 0 is not a grid point (odd grid_n)
    est.value = 1.0;
    est.argmax.assign(static_cast<std::size_t>(d), 0.0);
  }
  for (std::size_t c = 0; c < top && refine_iters > 0; ++c) {
    std::vector<double> x = point(order[c]);
    double best = vals[order[c]];
    for (int it = 0; it < refine_iters; ++it) {
      for (int i = 0; i < d; ++i) {
        auto along = [&](double s) {
          std::vector<double> y = x;
          y[static_cast<std::size_t>(i)] = s;
          return mu(p, y);
        };
        double bx = x[static_cast<std::size_t>(i)];
        const double v = golden_max(along, bx - step, bx + step, 60, bx);
        if (v > best) {
          best = v;
          x[static_cast<std::size_t>(i)] = bx;
        }
      }
    }
    if (best > est.value) {
      est.value = best;
      est.argmax = x;
    }
  }
  return est;
}

RieszVerdict riesz_verdict(const SpectralProfile& p) {
  RieszVerdict v;
  const double q = static_cast<double>(p.A.q);
  const double d = p.dim();
  v.threshold = std::pow(q, 2.0 / d - 1.0 / (2.0 * p.m));
  v.riesz_ok = p.B_estimate < v.threshold - 1e-12;
  v.decay_exponent = p.m * (d * std::log(p.B_estimate) / std::log(q) - 2.0);
  return v;
}

SpectralProfile make_profile(const IntMatrix& matrix, int m, const SpectralOptions& opts) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "order m must be >= 1");
  SpectralProfile p;
  p.A = validate_dilation(matrix);
  p.Q2 = solve_quadratic_form(p.A);
  p.G = build_G(p.Q2);
  p.digits_at = digit_set(matrix.transpose());
  p.m0 = build_mask(p.A, p.G, p.digits_at);
  p.m = m;
  p.truncation_tol = opts.tol;
  p.ait = p.A.inv_transpose();
  p.adj_at = matrix.transpose().adjugate();
  const MaskDenominator den = mask_denominator(p.G, p.digits_at);
  p.mask_den = static_cast<double>(den.value);
  for (const auto& s : den.digits) {
    IntVec sig(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) sig[i] = (s[i] * Rational(p.A.q)).num();
    p.digit_numerators.push_back(sig);
  }
  p.tail_constant = calibrate_tail(p);
  if (opts.estimate_B) {
    p.B_estimate = estimate_B(p, opts.grid_n, opts.refine_iters).value;
    const RieszVerdict v = riesz_verdict(p);
    p.threshold = v.threshold;
    p.riesz_ok = v.riesz_ok;
    p.decay_exponent = v.decay_exponent;
  }
  return p;
}

}  // namespace esf
