#include "esf/trigpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "esf/error.hpp"
#include "esf/io.hpp"
#include "esf/matana.hpp"

namespace esf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long double kTwoPiL = 2.0L * std::numbers::pi_v<long double>;

IntVec negate(const IntVec& k) {
  IntVec r(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) r[i] = -k[i];
  return r;
}

// Neumaier compensated accumulator.
struct Accum {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) comp += (sum - t) + v;
    else comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// exp(-2 pi i * num/den) with exact values on quarter turns.
Complex unit_phase(std::int64_t num, std::int64_t den) {
  std::int64_t r = num % den;
  if (r < 0) r += den;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == den) return {-1.0, 0.0};
  if (4 * r == den) return {0.0, -1.0};
  if (4 * r == 3 * den) return {0.0, 1.0};
  const long double ang = -kTwoPiL * static_cast<long double>(r) / static_cast<long double>(den);
  return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

}  // namespace

TrigPoly TrigPoly::constant(int d, Complex c) {
  TrigPoly p(d);
  p.add(IntVec(static_cast<std::size_t>(d), 0), c);
  return p;
}

Complex TrigPoly::coeff(const IntVec& k) const {
  auto it = c_.find(k);
  return it == c_.end() ? Complex{} : it->second;
}

void TrigPoly::add(const IntVec& k, Complex v) {
  if (static_cast<int>(k.size()) != d_) fail(ErrorCode::InvalidArgument, "frequency dimension mismatch");
  auto [it, inserted] = c_.try_emplace(k, v);
  if (!inserted) it->second += v;
  if (it->second == Complex{}) c_.erase(it);
}

Complex TrigPoly::eval(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != d_) fail(ErrorCode::InvalidArgument, "evaluation point dimension mismatch");
  Accum re, im;
  for (const auto& [k, c] : c_) {
    double ang = 0.0;
    for (int i = 0; i < d_; ++i) ang += static_cast<double>(k[static_cast<std::size_t>(i)]) * xi[static_cast<std::size_t>(i)];
    const Complex e(std::cos(ang), -std::sin(ang));
    const Complex t = c * e;
    re.add(t.real());
    im.add(t.imag());
  }
  return {re.value(), im.value()};
}

double TrigPoly::max_abs() const {
  double m = 0.0;
  for (const auto& [k, c] : c_) m = std::max(m, std::abs(c));
  return m;
}

bool TrigPoly::is_real(double tol) const {
  for (const auto& [k, c] : c_)
    if (std::abs(coeff(negate(k)) - std::conj(c)) > tol) return false;
  return true;
}

bool TrigPoly::is_even(double tol) const {
  for (const auto& [k, c] : c_)
    if (std::abs(coeff(negate(k)) - c) > tol) return false;
  return true;
}

TrigPoly TrigPoly::scaled(Complex s) const {
  TrigPoly r(d_);
  for (const auto& [k, c] : c_) r.add(k, c * s);
  return r;
}

TrigPoly TrigPoly::pruned(double tol) const {
  TrigPoly r(d_);
  for (const auto& [k, c] : c_)
    if (std::abs(c) > tol) r.c_.emplace(k, c);
  return r;
}

TrigPoly TrigPoly::real_part(double tol) const {
  TrigPoly r(d_);
  for (const auto& [k, c] : c_) {
    if (std::abs(c.imag()) > tol) {
      fail(ErrorCode::NumericalBreakdown, "coefficient with imaginary part " + fmt17(c.imag()) + " above " + fmt17(tol));
    }
    if (c.real() != 0.0) r.c_.emplace(k, Complex(c.real(), 0.0));
  }
  return r;
}

TrigPoly mul(const TrigPoly& p, const TrigPoly& r) {
  if (p.dim() != r.dim()) fail(ErrorCode::InvalidArgument, "mul: dimension mismatch");
  const int d = p.dim();
  TrigPoly out(d);
  IntVec k(static_cast<std::size_t>(d));
  for (const auto& [a, ca] : p.coeffs())
    for (const auto& [b, cb] : r.coeffs()) {
      for (int i = 0; i < d; ++i) k[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)];
      out.add(k, ca * cb);
    }
  // Entries that cancel up to rounding are treated as absent.
  const double dust = 1e-16 * p.max_abs() * r.max_abs() * static_cast<double>(std::min(p.size(), r.size()));
  return out.pruned(dust);
}

TrigPoly pow(const TrigPoly& p, int m) {
  if (m < 0) fail(ErrorCode::InvalidArgument, "pow: negative exponent");
  TrigPoly r = TrigPoly::constant(p.dim(), 1.0);
  for (int i = 0; i < m; ++i) r = mul(r, p);
  return r;
}

TrigPoly shift_argument(const TrigPoly& p, const RationalVec& t) {
  const int d = p.dim();
  if (static_cast<int>(t.size()) != d) fail(ErrorCode::InvalidArgument, "shift_argument: dimension mismatch");
  TrigPoly out(d);
  for (const auto& [k, c] : p.coeffs()) {
    Rational kt(0);
    for (int i = 0; i < d; ++i) kt = kt + t[static_cast<std::size_t>(i)] * Rational(k[static_cast<std::size_t>(i)]);
    out.add(k, c * unit_phase(kt.num(), kt.den()));
  }
  return out;
}

TrigPoly compose_linear(const TrigPoly& p, const IntMatrix& b) {
  if (b.dim() != p.dim()) fail(ErrorCode::InvalidArgument, "compose_linear: dimension mismatch");
  TrigPoly out(p.dim());
  for (const auto& [k, c] : p.coeffs()) out.add(b * k, c);
  return out;
}

TrigPoly build_G(const Eigen::MatrixXd& q2) {
  const int d = static_cast<int>(q2.rows());
  Eigen::LLT<Eigen::MatrixXd> llt(q2);
  if (q2.cols() != d || llt.info() != Eigen::Success || (q2 - q2.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    fail(ErrorCode::NotPD, "Q2 is not symmetric positive definite");
  }
  TrigPoly g(d);
  IntVec k(static_cast<std::size_t>(d), 0);
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    g.add(k, 2.0 * q2(i, i));
    k[ui] = 1;
    g.add(k, -q2(i, i));
    k[ui] = -1;
    g.add(k, -q2(i, i));
    k[ui] = 0;
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      if (q2(i, j) == 0.0) continue;
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      for (int si : {1, -1})
        for (int sj : {1, -1}) {
          k[ui] = si;
          k[uj] = sj;
          // same sign: -q_ij/2, opposite sign: +q_ij/2
          g.add(k, (si == sj ? -0.5 : 0.5) * q2(i, j));
        }
      k[ui] = k[uj] = 0;
    }
  return g;
}

TrigPoly build_G(const QuadraticForm& q2) { return build_G(q2.Q2); }

double eval_G(const Eigen::MatrixXd& q2, std::span<const double> xi) {
  const int d = static_cast<int>(q2.rows());
  double sh[8], sn[8];
  std::vector<double> shv, snv;
  double* h = sh;
  double* s = sn;
  if (d > 8) {
    shv.resize(static_cast<std::size_t>(d));
    snv.resize(static_cast<std::size_t>(d));
    h = shv.data();
    s = snv.data();
  }
  for (int i = 0; i < d; ++i) {
    const double r = std::remainder(xi[static_cast<std::size_t>(i)], kTwoPi);
    h[i] = std::sin(0.5 * r);
    s[i] = std::sin(r);
  }
  double g = 0.0;
  for (int i = 0; i < d; ++i) {
    g += 4.0 * q2(i, i) * h[i] * h[i];
    for (int j = i + 1; j < d; ++j) g += 2.0 * q2(i, j) * s[i] * s[j];
  }
  return g;
}

MaskDenominator mask_denominator(const TrigPoly& g, const DigitSet& digits_at) {
  MaskDenominator den;
  for (const auto& s : digits_at.S) {
    if (std::all_of(s.begin(), s.end(), [](const Rational& r) { return r.num() == 0; })) continue;
    // G(2 pi s) as the coefficient sum of the shifted polynomial.
    const TrigPoly shifted = shift_argument(g, s);
    long double v = 0.0L;
    for (const auto& [k, c] : shifted.coeffs()) v += static_cast<long double>(c.real());
    den.digits.push_back(s);
    den.factors.push_back(v);
    den.value *= v;
  }
  return den;
}

TrigPoly build_mask(const DilationMatrix& a, const TrigPoly& g, const DigitSet& digits_at) {
  if (!(digits_at.A == a.A.transpose())) fail(ErrorCode::InvalidArgument, "build_mask expects the digit set of A^T");
  if (g.dim() != a.d) fail(ErrorCode::InvalidArgument, "build_mask: dimension mismatch");
  const MaskDenominator den = mask_denominator(g, digits_at);
  const double gscale = std::max(1.0, g.max_abs());
  for (std::size_t i = 0; i < den.digits.size(); ++i) {
    if (std::abs(static_cast<double>(den.factors[i])) <= 1e-12 * gscale) {
      std::string where;
      for (const auto& r : den.digits[i]) where += (where.empty() ? "" : ",") + r.to_string();
      fail(ErrorCode::MaskPoleAtDigit, "G vanishes at 2*pi*(" + where + ")");
    }
  }
  TrigPoly num = TrigPoly::constant(a.d, 1.0);
  for (const auto& s : den.digits) num = mul(num, shift_argument(g, s));
  TrigPoly m0 = num.scaled(Complex(static_cast<double>(1.0L / den.value), 0.0));
  m0 = m0.pruned(1e-14 * m0.max_abs()).real_part(1e-12);
  if (std::abs(m0.eval(std::vector<double>(static_cast<std::size_t>(a.d), 0.0)) - 1.0) > 1e-12) {
    fail(ErrorCode::NumericalBreakdown, "mask does not satisfy m0(0) = 1");
  }
  return m0;
}

double RefinementCoefficients::sum() const {
  Accum s;
  for (const auto& [k, v] : c) s.add(v);
  return s.value();
}

RefinementCoefficients refinement_coefficients(const TrigPoly& m0, std::int64_t q) {
  if (!m0.is_real(1e-12)) fail(ErrorCode::InvalidArgument, "refinement coefficients need a real mask");
  RefinementCoefficients rc;
  rc.q = q;
  rc.d = m0.dim();
  for (const auto& [k, c] : m0.coeffs()) rc.c.emplace(k, static_cast<double>(q) * c.real());
  if (std::abs(rc.sum() - static_cast<double>(q)) > 1e-12 * static_cast<double>(q)) {
    fail(ErrorCode::InvalidArgument, "mask is not normalized: m0(0) != 1");
  }
  return rc;
}

std::string cosine_form(const TrigPoly& p) {
  const int d = p.dim();
  auto var = [](int i) { return "x" + std::to_string(i + 1); };
  auto arg = [&](const IntVec& k) {
    std::string s;
    for (int i = 0; i < d; ++i) {
      const auto v = k[static_cast<std::size_t>(i)];
      if (v == 0) continue;
      if (!s.empty()) s += v > 0 ? "+" : "-";
      else if (v < 0) s += "-";
      const auto av = v < 0 ? -v : v;
      if (av != 1) s += std::to_string(av) + "*";
      s += var(i);
    }
    return s;
  };
  auto positive = [](const IntVec& k) {
    for (auto v : k)
      if (v != 0) return v > 0;
    return false;
  };
  std::ostringstream os;
  bool first = true;
  auto term = [&](double coef, const std::string& fn) {
    if (std::abs(coef) < 1e-15) return;
    if (first) {
      os << fmt12(coef);
    } else {
      os << (coef < 0 ? " - " : " + ") << fmt12(std::abs(coef));
    }
    if (!fn.empty()) os << "*" << fn;
    first = false;
  };
  term(p.coeff(IntVec(static_cast<std::size_t>(d), 0)).real(), "");
  for (const auto& [k, c] : p.coeffs()) {
    if (!positive(k)) continue;
    const Complex cm = p.coeff(negate(k));
    // c e^{-ik.x} + cm e^{ik.x} = (c + cm) cos(k.x) - i (c - cm) sin(k.x)
    term((c + cm).real(), "cos(" + arg(k) + ")");
    term((Complex(0, -1) * (c - cm)).real(), "sin(" + arg(k) + ")");
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace esf
