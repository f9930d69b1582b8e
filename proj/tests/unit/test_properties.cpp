#include <doctest.h>

#include <random>
#include <set>

#include "esf/error.hpp"
#include "esf/properties.hpp"
#include "fixtures.hpp"

using namespace esf;

namespace {

const SpectralProfile& profile(int which, int m = 1) {
  static std::map<std::pair<int, int>, SpectralProfile> cache;
  auto it = cache.find({which, m});
  if (it != cache.end()) return it->second;
  const IntMatrix mats[] = {fx::Auni(), fx::A1(), fx::A2(), fx::A3(), fx::A4()};
  SpectralOptions o;
  o.estimate_B = false;
  return cache.emplace(std::make_pair(which, m), make_profile(mats[which], m, o)).first->second;
}

Polynomial poly2(std::initializer_list<std::tuple<int, int, double>> ts) {
  Polynomial p(2);
  for (const auto& [a, b, c] : ts) p.add({a, b}, c);
  return p;
}

double gaussian(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::exp(-s);
}

}  // namespace

TEST_CASE("partition of unity") {
  const auto& q = profile(1);
  const auto g = sample_phi_m(q.A, q.m0, 1, 5);
  CHECK(check_partition_of_unity(g) < 1e-8);
  const auto& u = profile(0);
  CHECK(check_partition_of_unity(sample_phi_m(u.A, u.m0, 1, 3)) < 1e-12);
  auto doubled = g;
  for (auto& v : doubled.values) v *= 2;
  CHECK(check_partition_of_unity(doubled) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(check_partition_of_unity(sample_phi_m(q.A, q.m0, 1, 2)), Error);
}

TEST_CASE("total positivity") {
  CHECK(check_total_positivity(profile(1), 64).passed);
  const auto u = check_total_positivity(profile(0), 120);
  CHECK(u.passed);
  CHECK(u.min_value >= 0.0);
  CHECK(u.min_value < 1e-20);
  // (1 + cos) / 2 composed with cos: mask cos(xi) gives sin(xi) / xi
  TrigPoly cosmask(1);
  cosmask.add({1}, 0.5);
  cosmask.add({-1}, 0.5);
  const Eigen::MatrixXd half = Eigen::MatrixXd::Constant(1, 1, 0.5);
  for (double xi : {0.7, 2.0, 4.0}) {
    const std::vector<double> x{xi};
    CHECK(phi_hat_mask_product(cosmask, half, x) == doctest::Approx(std::sin(xi) / xi).epsilon(1e-12));
  }
  const auto neg = check_total_positivity(
      [&](std::span<const double> x) { return phi_hat_mask_product(cosmask, half, x); }, 1, 128);
  CHECK_FALSE(neg.passed);
  CHECK(neg.min_value < -0.2);
}

TEST_CASE("Strang-Fix conditions") {
  for (int w : {0, 1, 3, 4})
    for (int m = 1; m <= 2; ++m) {
      INFO("profile " << w << " m " << m);
      CHECK(check_strang_fix(profile(w), m) < 1e-6);
    }
}

TEST_CASE("Fourier refinement identity") {
  for (int w = 0; w <= 4; ++w)
    for (int m = 1; m <= 3; ++m) CHECK(check_fourier_refinement(profile(w), m, 100, 7) < 1e-8);
}

TEST_CASE("convolution") {
  const auto& u = profile(0);
  // hat * hat = B3: the level-6 samples of phi^2 are the cubic B-spline up to rounding
  const auto r = check_convolution(u, 1, 1, 6, 128, 1);
  CHECK(r.residual < 5e-4);
  const auto b3 = sample_phi_m(u.A, u.m0, 2, 6);
  double e = 0;
  for (std::size_t f = 0; f < b3.size(); ++f) e = std::max(e, std::abs(b3.values[f] - fx::bspline3(b3.coords(b3.index(f))[0])));
  CHECK(e < 1e-12);

  const auto q = check_convolution(profile(1), 1, 1, 6, 256, 1);
  CHECK(q.residual < 5e-3);
  CHECK(q.residual < q.plain_residual);
  CHECK(q.points == 257);
  CHECK_THROWS_AS(check_convolution(profile(1), 1, 0, 5, 16, 1), Error);
  CHECK_THROWS_AS(check_convolution(profile(1), 0, 1, 5, 16, 1), Error);
}

TEST_CASE("non-decay of M along digit orbits") {
  for (int w = 1; w <= 4; ++w) {
    const auto r = check_non_decay(profile(w));
    CHECK(r.max_relative_change < 1e-9);
    CHECK(r.min_value > 0.1);
  }
}

TEST_CASE("polynomial reproduction on the quincunx") {
  const auto& q = profile(1);
  const auto g = sample_phi_m(q.A, q.m0, 1, 5);
  const auto one = check_polynomial_reproduction(g, 1, poly2({{0, 0, 1}}));
  CHECK(one.leading_ok);
  CHECK(one.fit_residual < 1e-12);
  for (const auto& p : {poly2({{2, 0, 1}, {0, 2, -1}}), poly2({{1, 1, 1}})}) {
    const auto r = check_polynomial_reproduction(g, 1, p);
    CHECK(r.leading_ok);
    CHECK(r.residual_degree < 2);
    CHECK(r.points > 100);
  }
  const auto bad = check_polynomial_reproduction(g, 1, poly2({{2, 0, 1}, {0, 2, 1}}));
  CHECK_FALSE(bad.leading_ok);
  CHECK(bad.fit_residual > 1e-3);
  // harmonic cubics are still in range for m = 1
  CHECK(check_polynomial_reproduction(g, 1, poly2({{3, 0, 1}, {1, 2, -3}})).leading_ok);
  CHECK_THROWS_AS(check_polynomial_reproduction(g, 1, poly2({{4, 0, 1}})), Error);
}

TEST_CASE("polynomial reproduction, univariate") {
  // ker d^{2m} holds exactly the polynomials of degree <= 2m - 1
  const auto& u = profile(0);
  for (int m = 1; m <= 2; ++m) {
    const auto g = sample_phi_m(u.A, u.m0, m, 5);
    for (int n = 0; n <= 2 * m; ++n) {
      const auto r = check_polynomial_reproduction(g, m, Polynomial::monomial(1, {n}));
      CHECK(r.leading_ok == (n <= 2 * m - 1));
    }
  }
}

TEST_CASE("second moments") {
  CHECK(second_moments(profile(0), 1)(0, 0) == doctest::Approx(1.0 / 6.0));
  CHECK(second_moments(profile(0), 2)(0, 0) == doctest::Approx(1.0 / 3.0));
  // against a direct quadrature of the cascade samples
  for (int w : {1, 3}) {
    const auto& p = profile(w);
    const auto g = sample_phi_m(p.A, p.m0, 1, 8);
    Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
    for (std::size_t f = 0; f < g.size(); ++f) {
      const auto x = g.coords(g.index(f));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s(i, j) += g.values[f] * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
    }
    s *= g.quadrature_weight;
    CHECK((second_moments(p, 1) - s).cwiseAbs().maxCoeff() < 2e-3);
  }
}

TEST_CASE("approximation order") {
  for (int w : {0, 1})
    for (int m = 1; m <= 2; ++m) {
      const auto r = check_approximation_order(profile(w), m, gaussian);
      INFO("profile " << w << " m " << m << " slope " << r.slope);
      CHECK(r.levels.size() == 3);
      CHECK_FALSE(r.exact);
      CHECK(r.slope >= 2 * m - 0.4);
      CHECK(r.errors[2] < r.errors[0]);
    }
  const auto u = check_approximation_order(profile(0), 1, gaussian);
  CHECK(u.slope == doctest::Approx(2.0).epsilon(0.05));
  const auto c = check_approximation_order(profile(1), 1, [](std::span<const double>) { return 1.0; });
  CHECK(c.exact);
}

TEST_CASE("A4 mask is not a product of quincunx masks") {
  const auto& q = profile(1);
  const auto& a4 = profile(4);
  const auto prod = mul(compose_linear(q.m0, fx::A1tilde()), q.m0);
  double diff = 0;
  std::set<IntVec> keys;
  for (const auto& [k, c] : prod.coeffs()) keys.insert(k);
  for (const auto& [k, c] : a4.m0.coeffs()) keys.insert(k);
  for (const auto& k : keys) diff = std::max(diff, std::abs(prod.coeff(k) - a4.m0.coeff(k)));
  CHECK(diff > 1e-3);
  // both are still masks for 2I: value 1 at 0
  const std::vector<double> zero{0.0, 0.0};
  CHECK(std::abs(prod.eval(zero) - 1.0) < 1e-14);
  CHECK(std::abs(a4.m0.eval(zero) - 1.0) < 1e-14);
}

TEST_CASE("run_all") {
  PropertyConfig cfg;
  cfg.grid_n = 64;
  SpectralOptions o;
  o.grid_n = 64;
  const auto rep = run_all(make_profile(fx::A1(), 1, o), cfg);
  for (const auto& c : rep.checks) {
    INFO(c.name << " " << c.detail.dump());
    CHECK(c.status != CheckStatus::Fail);
  }
  CHECK(rep.passed());
  CHECK(rep.checks.size() == 11);
  CHECK(rep.find("operator_relation")->status == CheckStatus::Skip);

  const auto uni = run_all(make_profile(fx::Auni(), 2, o), cfg);
  CHECK(uni.passed());
  CHECK(uni.find("operator_relation")->status == CheckStatus::Pass);

  const auto a2 = run_all(make_profile(fx::A2(), 1, o), cfg);
  CHECK_FALSE(a2.passed());
  CHECK(a2.checks.size() == 11);
  CHECK(a2.find("riesz")->status == CheckStatus::Fail);
  CHECK(a2.find("cascade")->detail["subdominant_modulus"].get<double>() > 1.0);

  // same config, same report
  const auto again = run_all(make_profile(fx::A1(), 1, o), cfg);
  CHECK(again.to_json(false).dump() == rep.to_json(false).dump());
}
