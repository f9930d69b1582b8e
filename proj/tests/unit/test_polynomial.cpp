#include <doctest.h>

#include <random>

#include "esf/error.hpp"
#include "esf/polynomial.hpp"
#include "fixtures.hpp"

using namespace esf;

namespace {

Polynomial xy_poly(std::initializer_list<std::tuple<int, int, double>> ts) {
  Polynomial p(2);
  for (const auto& [a, b, c] : ts) p.add({a, b}, c);
  return p;
}

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("arithmetic and evaluation") {
  const auto p = xy_poly({{2, 0, 1}, {0, 2, -1}});
  const auto q = xy_poly({{1, 1, 2}, {0, 0, 3}});
  const std::vector<double> x{1.5, -0.5};
  CHECK(p.eval(x) == doctest::Approx(2.0));
  CHECK((p + q).eval(x) == doctest::Approx(2.0 + 1.5));
  CHECK((p - p).terms.empty());
  CHECK((p * q).eval(x) == doctest::Approx(2.0 * 1.5));
  CHECK(p.total_degree() == 2);
  CHECK(Polynomial(2).total_degree() == -1);
  CHECK(p.derivative(0).terms == std::map<IntVec, double>{{{1, 0}, 2.0}});
  CHECK(p.to_string() == "x1^2 - x2^2");
  CHECK(q.to_string() == "2*x1*x2 + 3");
  CHECK_THROWS_AS(Polynomial(2).add({1}, 1.0), Error);
}

TEST_CASE("multi-index enumeration") {
  for (int d = 1; d <= 3; ++d)
    for (int n = 0; n <= 5; ++n) {
      CHECK(static_cast<long>(homogeneous_indices(d, n).size()) == binom(n + d - 1, d - 1));
      CHECK(static_cast<long>(multi_indices(d, n).size()) == binom(n + d, d));
    }
  CHECK(multi_indices(2, 1) == std::vector<IntVec>{{0, 0}, {1, 0}, {0, 1}});
}

TEST_CASE("apply_form") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  CHECK(apply_form(id, xy_poly({{2, 0, 1}, {0, 2, -1}})).terms.empty());
  CHECK(apply_form(id, xy_poly({{1, 1, 1}})).terms.empty());
  CHECK(apply_form(id, xy_poly({{2, 0, 1}, {0, 2, 1}})).terms == std::map<IntVec, double>{{{0, 0}, 4.0}});
  // Q2 of A3: 2 d_xx + d_xy + d_yy
  const auto r = apply_form(fx::Q2_A3(), xy_poly({{1, 1, 1}}));
  CHECK(r.terms == std::map<IntVec, double>{{{0, 0}, 1.0}});
}

TEST_CASE("null-space bases") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  // harmonic polynomials: dimension 2 in every degree >= 1
  for (int n = 2; n <= 5; ++n) {
    const auto b = null_space_basis(id, 1, n);
    CHECK(b.size() == 2);
    for (const auto& p : b) {
      CHECK(p.total_degree() == n);
      for (const auto& [a, c] : apply_form(id, p).terms) CHECK(std::abs(c) < 1e-12);
    }
  }
  // below 2m everything is in the kernel
  CHECK(null_space_basis(id, 2, 3).size() == 4);
  // biharmonic, degree 4: 5 monomials, 1 constraint
  CHECK(null_space_basis(id, 2, 4).size() == 4);
  // univariate: d^2 kills nothing of degree 2
  CHECK(null_space_basis(Eigen::MatrixXd::Identity(1, 1), 1, 2).empty());
  for (const auto& q2 : {fx::Q2_A2(), fx::Q2_A3()}) {
    const auto b = null_space_basis(q2, 1, 3);
    CHECK(b.size() == 2);
    for (const auto& p : b)
      for (const auto& [a, c] : apply_form(q2, p).terms) CHECK(std::abs(c) < 1e-12);
  }
}

TEST_CASE("dual form power is outside the null space") {
  for (const auto& q2 : {fx::Q2_A1(), fx::Q2_A2(), fx::Q2_A3()})
    for (int m = 1; m <= 3; ++m) {
      Polynomial p = dual_form_power(q2, m);
      CHECK(p.total_degree() == 2 * m);
      for (int k = 0; k < m; ++k) p = apply_form(q2, p);
      REQUIRE(p.terms.size() == 1);
      CHECK(p.terms.begin()->first == IntVec{0, 0});
      CHECK(std::abs(p.terms.begin()->second) > 1.0);
    }
}

TEST_CASE("least-squares fit") {
  std::mt19937_64 rng(3);
  const auto truth = xy_poly({{2, 0, 0.5}, {1, 1, -2}, {0, 1, 1}, {0, 0, 0.25}});
  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  for (int i = 0; i < 60; ++i) {
    pts.push_back(fx::random_point(rng, 2, -1, 1));
    vals.push_back(truth.eval(pts.back()));
  }
  const auto fit = fit_polynomial(pts, vals, 2, 2);
  CHECK(fit.max_residual < 1e-12);
  CHECK(fit.poly.terms.at({1, 1}) == doctest::Approx(-2.0));
  CHECK(fit_polynomial(pts, vals, 2, 1).max_residual > 0.1);
  double vmax = 0;
  for (double v : vals) vmax = std::max(vmax, std::abs(v));
  CHECK(fit_polynomial(pts, vals, 2, -1).max_residual == vmax);
  CHECK_THROWS_AS(fit_polynomial(pts, {1.0}, 2, 1), Error);
}
