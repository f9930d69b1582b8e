#include <doctest.h>

#include <random>

#include "esf/cascade.hpp"
#include "esf/error.hpp"
#include "esf/spectral.hpp"
#include "fixtures.hpp"

using namespace esf;

namespace {

struct Setup {
  DilationMatrix a;
  TrigPoly m0;
};

Setup setup(const IntMatrix& m) {
  Setup s;
  s.a = validate_dilation(m);
  s.m0 = build_mask(s.a, build_G(solve_quadratic_form(s.a)), digit_set(m.transpose()));
  return s;
}

RefinementCoefficients coeffs(const std::map<IntVec, double>& c, std::int64_t q) {
  RefinementCoefficients rc;
  rc.c = c;
  rc.q = q;
  rc.d = static_cast<int>(c.begin()->first.size());
  return rc;
}

RefinementCoefficients hat_coeffs() { return coeffs({{{-1}, 0.5}, {{0}, 1.0}, {{1}, 0.5}}, 2); }

double max_diff(const LatticeGrid& x, const LatticeGrid& y) {
  REQUIRE(x.lo == y.lo);
  REQUIRE(x.hi == y.hi);
  double e = 0;
  for (std::size_t i = 0; i < x.size(); ++i) e = std::max(e, std::abs(x.values[i] - y.values[i]));
  return e;
}

}  // namespace

TEST_CASE("support_box examples") {
  const auto uni = validate_dilation(fx::Auni());
  const auto b = support_box(uni, hat_coeffs());
  CHECK(b.lo == IntVec{-1});
  CHECK(b.hi == IntVec{1});
  CHECK(b.lo_real[0] == doctest::Approx(-1.0).epsilon(1e-8));

  const auto s = setup(fx::A1());
  const auto bq = support_box(s.a, refinement_coefficients(s.m0, 2));
  for (int i = 0; i < 2; ++i) {
    CHECK(bq.lo[static_cast<std::size_t>(i)] >= -2);
    CHECK(bq.hi[static_cast<std::size_t>(i)] <= 2);
  }

  const auto bd = support_box(validate_dilation(fx::A4()), coeffs({{{0, 0}, 4.0}}, 4));
  CHECK(bd.lo == IntVec{0, 0});
  CHECK(bd.hi == IntVec{0, 0});
}

TEST_CASE("support box bounds the limit set tightly") {
  // points sum_{j>=1} A^{-j} k_j with k_j in supp c fill the attractor
  std::mt19937_64 rng(3);
  for (const auto& m : {fx::A1(), fx::A2(), fx::A3(), fx::A4()}) {
    const auto s = setup(m);
    const auto c = refinement_coefficients(s.m0, s.a.q);
    const auto b = support_box(s.a, c);
    std::vector<Eigen::Vector2d> ks;
    for (const auto& [k, v] : c.c) ks.emplace_back(static_cast<double>(k[0]), static_cast<double>(k[1]));
    const Eigen::Matrix2d ainv = s.a.real().inverse();
    std::uniform_int_distribution<std::size_t> pick(0, ks.size() - 1);
    for (int t = 0; t < 200; ++t) {
      Eigen::Vector2d x = Eigen::Vector2d::Zero();
      Eigen::Matrix2d pw = ainv;
      for (int j = 0; j < 60; ++j, pw = pw * ainv) x += pw * ks[pick(rng)];
      for (int i = 0; i < 2; ++i) {
        CHECK(x(i) >= b.lo_real[static_cast<std::size_t>(i)] - 1e-9);
        CHECK(x(i) <= b.hi_real[static_cast<std::size_t>(i)] + 1e-9);
        CHECK(x(i) >= static_cast<double>(b.lo[static_cast<std::size_t>(i)]));
        CHECK(x(i) <= static_cast<double>(b.hi[static_cast<std::size_t>(i)]));
      }
    }
    // greedy choice per term attains each bound
    for (int i = 0; i < 2; ++i)
      for (int sgn : {-1, 1}) {
        double x = 0;
        Eigen::Matrix2d pw = ainv;
        for (int j = 0; j < 80; ++j, pw = pw * ainv) {
          double best = -1e300;
          for (const auto& k : ks) best = std::max(best, sgn * (pw * k)(i));
          x += best;
        }
        const double bound = sgn > 0 ? b.hi_real[static_cast<std::size_t>(i)] : -b.lo_real[static_cast<std::size_t>(i)];
        CHECK(std::abs(x - bound) < 1e-8);
      }
  }
}

TEST_CASE("integer_values examples") {
  const auto hv = integer_values(validate_dilation(fx::Auni()), hat_coeffs());
  CHECK(hv.values.at({0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(hv.values.at({-1})) < 1e-14);
  CHECK(std::abs(hv.values.at({1})) < 1e-14);
  CHECK(hv.eigenvalue_one_multiplicity == 1);

  const auto s = setup(fx::A1());
  const auto qv = integer_values(s.a, refinement_coefficients(s.m0, 2));
  for (const auto& [k, v] : qv.values) CHECK(std::abs(v - (k == IntVec{0, 0} ? 1.0 : 0.0)) < 1e-10);

  const auto s4 = setup(fx::A4());
  const auto v4 = integer_values(s4.a, refinement_coefficients(s4.m0, 4));
  double sum = 0;
  for (const auto& [k, v] : v4.values) sum += v;
  CHECK(std::abs(sum - 1.0) < 1e-12);
  CHECK(v4.subdominant_modulus > 1.0);

  const auto s2 = setup(fx::A2());
  const auto v2 = integer_values(s2.a, refinement_coefficients(s2.m0, 2));
  CHECK(v2.eigenvalue_one_multiplicity == 1);
  CHECK(v2.subdominant_modulus > 1.0);
  CHECK(v2.subdominant_modulus == doctest::Approx(1.1725).epsilon(1e-3));

  // cubic B-spline integer values 1/6, 2/3, 1/6
  const auto bv = integer_values(validate_dilation(fx::Auni()),
                                 coeffs({{{-2}, 0.125}, {{-1}, 0.5}, {{0}, 0.75}, {{1}, 0.5}, {{2}, 0.125}}, 2));
  CHECK(bv.values.at({0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(bv.values.at({1}) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("non-simple eigenvalue is rejected") {
  // phi = chi_[0,3] / 3 under A = 2: eigenvalue 1 has multiplicity 3 on the box
  try {
    integer_values(validate_dilation(fx::Auni()), coeffs({{{0}, 1.0}, {{3}, 1.0}}, 2));
    FAIL("expected NonSimpleEigenvalue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonSimpleEigenvalue);
  }
}

TEST_CASE("refine examples") {
  const auto uni = validate_dilation(fx::Auni());
  const auto c = hat_coeffs();
  auto g = run_cascade(uni, c, 1).grid;
  CHECK(g.at(IntVec{1}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.at(IntVec{0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.quadrature_weight == 0.5);

  const auto s = setup(fx::A1());
  const auto cq = refinement_coefficients(s.m0, 2);
  auto r = run_cascade(s.a, cq, 0);
  LatticeGrid lvl = r.grid;
  for (int J = 1; J <= 6; ++J) {
    const double before = lvl.mass();
    lvl = refine(s.a, cq, lvl);
    CHECK(lvl.mass() == doctest::Approx(before).epsilon(1e-13));
    // integer points are A^J k on level J
    for (const auto& [k, v] : r.integers.values) CHECK(std::abs(lvl.at(lvl.AJ * k) - v) < 1e-12);
  }
}

TEST_CASE("parallel refine matches the scatter reference") {
  for (const auto& m : {fx::A1(), fx::A2(), fx::A3(), fx::A4()}) {
    const auto s = setup(m);
    for (int order : {1, 2}) {
      const auto c = order_m_coefficients(s.a, s.m0, order);
      LatticeGrid g = run_cascade(s.a, c, 2).grid;
      const auto par = refine(s.a, c, g);
      const auto ser = reference::refine(s.a, c, g);
      double scale = 0;
      for (double v : ser.values) scale = std::max(scale, std::abs(v));
      CHECK(max_diff(par, ser) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("refinement residual at sampled points") {
  std::mt19937_64 rng(7);
  for (const auto& m : {fx::A1(), fx::A3(), fx::A4()}) {
    const auto s = setup(m);
    const auto c = refinement_coefficients(s.m0, s.a.q);
    const auto g4 = run_cascade(s.a, c, 4).grid;
    const auto g5 = refine(s.a, c, g4);
    std::uniform_int_distribution<std::size_t> pick(0, g5.size() - 1);
    for (int t = 0; t < 100; ++t) {
      const IntVec j = g5.index(pick(rng));
      // phi(x) = sum_k c_k phi(A x - k) with x = A^{-5} j, A x - k = A^{-4}(j - A^4 k)
      double s2 = 0;
      for (const auto& [k, v] : c.c) {
        IntVec src = j;
        const IntVec sh = g4.AJ * k;
        for (std::size_t i = 0; i < src.size(); ++i) src[i] -= sh[i];
        s2 += v * g4.at(src);
      }
      CHECK(std::abs(g5.at(j) - s2) < 1e-12);
    }
  }
}

TEST_CASE("sample_phi_m closed forms") {
  const auto su = setup(fx::Auni());
  const auto b3 = sample_phi_m(su.a, su.m0, 2, 4);
  double e = 0;
  for (std::size_t f = 0; f < b3.size(); ++f) e = std::max(e, std::abs(b3.values[f] - fx::bspline3(b3.coords(b3.index(f))[0])));
  CHECK(e < 1e-8);
  const auto hat3 = sample_phi_m(su.a, su.m0, 1, 3);
  for (std::size_t f = 0; f < hat3.size(); ++f) CHECK(hat3.values[f] == fx::hat(hat3.coords(hat3.index(f))[0]));

  const auto s = setup(fx::A3());
  const auto g0 = sample_phi_m(s.a, s.m0, 1, 0);
  const auto iv = integer_values(s.a, refinement_coefficients(s.m0, s.a.q));
  for (const auto& [k, v] : iv.values) CHECK(g0.at(k) == v);
}

TEST_CASE("partition of unity at level 5") {
  std::mt19937_64 rng(11);
  for (const auto& m : {fx::A1(), fx::A3(), fx::A4()}) {
    const auto s = setup(m);
    for (int order : {1, 2}) {
      const auto g = sample_phi_m(s.a, s.m0, order, 5);
      std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
      for (int t = 0; t < 50; ++t) {
        const IntVec j = g.index(pick(rng));
        const RealVec x = g.coords(j);
        double sum = 0;
        for (std::int64_t k0 = -40; k0 <= 40; ++k0)
          for (std::int64_t k1 = -40; k1 <= 40; ++k1) {
            const IntVec sh = g.AJ * IntVec{k0, k1};
            sum += g.at(IntVec{j[0] - sh[0], j[1] - sh[1]});
          }
        INFO("x = " << x[0] << "," << x[1]);
        CHECK(std::abs(sum - 1.0) < 1e-8);
      }
    }
  }
}

TEST_CASE("quincunx interpolation and nonnegativity") {
  const auto s = setup(fx::A1());
  const auto c = refinement_coefficients(s.m0, 2);
  for (const auto& [k, v] : c.c) REQUIRE(v >= 0);
  const auto g = sample_phi_m(s.a, s.m0, 1, 5);
  for_box({-3, -3}, {3, 3}, [&](const IntVec& k) {
    CHECK(std::abs(g.at(g.AJ * k) - (k == IntVec{0, 0} ? 1.0 : 0.0)) < 1e-10);
  });
  double mn = 0;
  for (double v : g.values) mn = std::min(mn, v);
  CHECK(mn >= -1e-10);
  const auto su = setup(fx::Auni());
  const auto gu = sample_phi_m(su.a, su.m0, 2, 5);
  for (double v : gu.values) CHECK(v >= -1e-10);
}

TEST_CASE("grid Fourier sum approximates phi_hat") {
  const auto p = make_profile(fx::A1(), 1, [] {
    SpectralOptions o;
    o.estimate_B = false;
    return o;
  }());
  const auto c = refinement_coefficients(p.m0, 2);
  auto g = run_cascade(p.A, c, 4).grid;
  auto worst = [&](const LatticeGrid& gr) {
    double e = 0;
    for (int i = -4; i <= 4; ++i)
      for (int j = -4; j <= 4; ++j) {
        const std::vector<double> xi{0.25 * i, 0.25 * j};
        if (std::hypot(xi[0], xi[1]) > 1.0) continue;
        const double ph = phi_hat(p, xi, 1e-12);
        e = std::max(e, std::abs(grid_fourier(gr, xi) - ph) / ph);
      }
    return e;
  };
  const double e4 = worst(g);
  g = refine(p.A, c, refine(p.A, c, g));
  const double e6 = worst(g);
  CHECK(e6 < e4);
  CHECK(e6 < 2e-3);
}

TEST_CASE("evaluate_at and CSV") {
  const auto su = setup(fx::Auni());
  const auto g = sample_phi_m(su.a, su.m0, 1, 3);
  const auto on = evaluate_at(g, std::vector<double>{0.375});
  CHECK_FALSE(on.approximate);
  CHECK(on.value == 0.625);
  const auto off = evaluate_at(g, std::vector<double>{0.3});
  CHECK(off.approximate);
  CHECK(off.value == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(evaluate_at(g, std::vector<double>{5.0}).value == 0.0);

  const std::string csv = grid_csv(g);
  CHECK(csv.rfind("# A=2, J=3, d=1\n", 0) == 0);
  CHECK(csv.find("\n-1,0\n") != std::string::npos);
  CHECK(csv.find("\n-0.875,0.125\n") != std::string::npos);
  CHECK(csv.find("\n0,1\n") != std::string::npos);
  CHECK(csv == grid_csv(g));

  const auto s = setup(fx::A1());
  const auto gq = sample_phi_m(s.a, s.m0, 1, 2);
  const std::string cq = grid_csv(gq);
  CHECK(cq.rfind("# A=1,-1;1,1, J=2, d=2\n", 0) == 0);
  // one row per stored point, x = A^{-2} j = j / 2 rotated
  CHECK(static_cast<std::size_t>(std::count(cq.begin(), cq.end(), '\n')) == gq.size() + 1);
}
