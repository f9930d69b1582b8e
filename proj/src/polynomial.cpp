#include "esf/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "esf/error.hpp"
#include "esf/io.hpp"

namespace esf {

namespace {

int degree_of(const IntVec& a) {
  std::int64_t s = 0;
  for (auto v : a) s += v;
  return static_cast<int>(s);
}

void homogeneous_rec(int d, int i, int left, IntVec& cur, std::vector<IntVec>& out) {
  if (i == d - 1) {
    cur[static_cast<std::size_t>(i)] = left;
    out.push_back(cur);
    return;
  }
  for (int v = left; v >= 0; --v) {
    cur[static_cast<std::size_t>(i)] = v;
    homogeneous_rec(d, i + 1, left - v, cur, out);
  }
}

}  // namespace

Polynomial Polynomial::monomial(int dim, const IntVec& alpha, double c) {
  Polynomial p(dim);
  p.add(alpha, c);
  return p;
}

int Polynomial::total_degree() const {
  int deg = -1;
  for (const auto& [a, c] : terms)
    if (c != 0.0) deg = std::max(deg, degree_of(a));
  return deg;
}

double Polynomial::eval(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& [a, c] : terms) {
    double t = c;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::int64_t e = 0; e < a[i]; ++e) t *= x[i];
    s += t;
  }
  return s;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial p(d);
  for (const auto& [a, c] : terms) {
    const auto ui = static_cast<std::size_t>(i);
    if (a[ui] == 0) continue;
    IntVec b = a;
    b[ui] -= 1;
    p.add(b, c * static_cast<double>(a[ui]));
  }
  return p;
}

void Polynomial::add(const IntVec& alpha, double c) {
  if (static_cast<int>(alpha.size()) != d) fail(ErrorCode::InvalidArgument, "multi-index dimension mismatch");
  auto [it, fresh] = terms.emplace(alpha, c);
  if (!fresh) it->second += c;
  if (it->second == 0.0) terms.erase(it);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial p = *this;
  for (const auto& [a, c] : o.terms) p.add(a, c);
  return p;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o.scaled(-1.0); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial p(d);
  for (const auto& [a, c] : terms)
    for (const auto& [b, e] : o.terms) {
      IntVec s = a;
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += b[i];
      p.add(s, c * e);
    }
  return p;
}

Polynomial Polynomial::scaled(double s) const {
  Polynomial p(d);
  for (const auto& [a, c] : terms) p.add(a, c * s);
  return p;
}

std::string Polynomial::to_string() const {
  if (terms.empty()) return "0";
  std::string out;
  // highest degree first
  std::vector<std::pair<IntVec, double>> ts(terms.begin(), terms.end());
  std::sort(ts.begin(), ts.end(), [](const auto& x, const auto& y) {
    const int dx = degree_of(x.first), dy = degree_of(y.first);
    return dx != dy ? dx > dy : x.first > y.first;
  });
  for (const auto& [a, c] : ts) {
    std::string mono;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(i + 1);
      if (a[i] > 1) mono += "^" + std::to_string(a[i]);
    }
    const double ac = std::abs(c);
    std::string coef = (ac == 1.0 && !mono.empty()) ? "" : fmt12(ac);
    if (!coef.empty() && !mono.empty()) coef += "*";
    if (out.empty()) out = (c < 0 ? "-" : "") + coef + mono;
    else out += (c < 0 ? " - " : " + ") + coef + mono;
  }
  return out;
}

std::vector<IntVec> homogeneous_indices(int d, int n) {
  std::vector<IntVec> out;
  if (n < 0 || d < 1) return out;
  IntVec cur(static_cast<std::size_t>(d), 0);
  homogeneous_rec(d, 0, n, cur, out);
  return out;
}

std::vector<IntVec> multi_indices(int d, int max_degree) {
  std::vector<IntVec> out;
  for (int n = 0; n <= max_degree; ++n) {
    auto h = homogeneous_indices(d, n);
    out.insert(out.end(), h.begin(), h.end());
  }
  return out;
}

Polynomial apply_form(const Eigen::MatrixXd& q2, const Polynomial& p) {
  Polynomial out(p.d);
  for (int i = 0; i < p.d; ++i) {
    const Polynomial di = p.derivative(i);
    for (int j = 0; j < p.d; ++j)
      if (q2(i, j) != 0.0) out = out + di.derivative(j).scaled(q2(i, j));
  }
  return out;
}

std::vector<Polynomial> null_space_basis(const Eigen::MatrixXd& q2, int m, int n) {
  const int d = static_cast<int>(q2.rows());
  const auto src = homogeneous_indices(d, n);
  const auto dst = homogeneous_indices(d, std::max(0, n - 2 * m));
  std::vector<Polynomial> out;
  if (n < 2 * m) {
    for (const auto& a : src) out.push_back(Polynomial::monomial(d, a));
    return out;
  }
  std::map<IntVec, int> row;
  for (std::size_t r = 0; r < dst.size(); ++r) row.emplace(dst[r], static_cast<int>(r));
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(src.size()));
  for (std::size_t c = 0; c < src.size(); ++c) {
    Polynomial p = Polynomial::monomial(d, src[c]);
    for (int k = 0; k < m; ++k) p = apply_form(q2, p);
    for (const auto& [a, v] : p.terms) map(row.at(a), static_cast<Eigen::Index>(c)) = v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(map, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double thresh = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  const Eigen::MatrixXd v = svd.matrixV();
  for (Eigen::Index c = rank; c < v.cols(); ++c) {
    Polynomial p(d);
    // scale so the largest coefficient is 1
    const Eigen::Index imax = [&] {
      Eigen::Index best = 0;
      v.col(c).cwiseAbs().maxCoeff(&best);
      return best;
    }();
    const double s = 1.0 / v(imax, c);
    for (std::size_t r = 0; r < src.size(); ++r) {
      double x = v(static_cast<Eigen::Index>(r), c) * s;
      if (std::abs(x) < 1e-13) continue;
      p.add(src[r], x);
    }
    out.push_back(p);
  }
  return out;
}

Polynomial dual_form_power(const Eigen::MatrixXd& q2, int m) {
  const int d = static_cast<int>(q2.rows());
  const Eigen::MatrixXd inv = q2.inverse();
  Polynomial form(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      IntVec a(static_cast<std::size_t>(d), 0);
      a[static_cast<std::size_t>(i)] += 1;
      a[static_cast<std::size_t>(j)] += 1;
      form.add(a, inv(i, j));
    }
  Polynomial p = Polynomial::monomial(d, IntVec(static_cast<std::size_t>(d), 0));
  for (int k = 0; k < m; ++k) p = p * form;
  return p;
}

PolyFit fit_polynomial(const std::vector<std::vector<double>>& points, const std::vector<double>& values, int d,
                       int max_degree) {
  PolyFit out;
  out.poly = Polynomial(d);
  if (points.size() != values.size()) fail(ErrorCode::InvalidArgument, "fit_polynomial: size mismatch");
  if (max_degree < 0) {
    for (double v : values) out.max_residual = std::max(out.max_residual, std::abs(v));
    return out;
  }
  const auto basis = multi_indices(d, max_degree);
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd rhs(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& x = points[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < basis.size(); ++c) {
      double t = 1.0;
      for (std::size_t i = 0; i < basis[c].size(); ++i)
        for (std::int64_t e = 0; e < basis[c][i]; ++e) t *= x[i];
      m(r, static_cast<Eigen::Index>(c)) = t;
    }
    rhs(r) = values[static_cast<std::size_t>(r)];
  }
  const Eigen::VectorXd sol = m.colPivHouseholderQr().solve(rhs);
  out.max_residual = (m * sol - rhs).cwiseAbs().maxCoeff();
  for (std::size_t c = 0; c < basis.size(); ++c)
    if (sol(static_cast<Eigen::Index>(c)) != 0.0) out.poly.add(basis[c], sol(static_cast<Eigen::Index>(c)));
  return out;
}

}  // namespace esf
