#include <doctest.h>

#include <random>

#include "esf/error.hpp"
#include "esf/matana.hpp"
#include "fixtures.hpp"

using namespace esf;

namespace {

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

// Roots of the characteristic polynomial all strictly outside the unit circle, by Eigen.
bool expanding_by_eigen(const IntMatrix& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m.to_real());
  return es.eigenvalues().cwiseAbs().minCoeff() > 1.0 + 1e-9;
}

ErrorCode code_of(const IntMatrix& m) {
  try {
    validate_dilation(m);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;  // sentinel: no error
}

}  // namespace

TEST_CASE("validate_dilation") {
  auto q = validate_dilation(fx::A1());
  CHECK(q.q == 2);
  CHECK(q.d == 2);
  CHECK(validate_dilation(fx::Auni()).q == 2);
  CHECK(code_of(IntMatrix{{1, 0}, {0, 1}}) == ErrorCode::NotExpanding);
  CHECK(code_of(IntMatrix{{1, 2}, {2, 4}}) == ErrorCode::Singular);
  // boundary cases: an eigenvalue exactly on the unit circle
  CHECK(code_of(IntMatrix{{1, 0}, {0, 2}}) == ErrorCode::NotExpanding);
  CHECK(code_of(IntMatrix{{0, -1}, {1, 0}}) == ErrorCode::NotExpanding);
  CHECK(code_of(IntMatrix{{-1}}) == ErrorCode::NotExpanding);
}

TEST_CASE("exact expanding test agrees with floating eigenvalues") {
  int checked = 0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c)
        for (int d = -3; d <= 3; ++d) {
          IntMatrix m{{a, b}, {c, d}};
          if (m.det() == 0) continue;
          Eigen::EigenSolver<Eigen::MatrixXd> es(m.to_real());
          const double mn = es.eigenvalues().cwiseAbs().minCoeff();
          if (std::abs(mn - 1.0) < 1e-9) {
            CHECK_FALSE(roots_outside_unit_circle(characteristic_polynomial(m)));
            continue;
          }
          CHECK(roots_outside_unit_circle(characteristic_polynomial(m)) == (mn > 1.0));
          ++checked;
        }
  CHECK(checked > 1000);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> u(-4, 4);
  for (int t = 0; t < 500; ++t) {
    IntMatrix m(3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
    if (m.det() == 0) continue;
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.to_real());
    const double mn = es.eigenvalues().cwiseAbs().minCoeff();
    if (std::abs(mn - 1.0) < 1e-7) continue;
    CHECK(roots_outside_unit_circle(characteristic_polynomial(m)) == (mn > 1.0));
  }
}

TEST_CASE("expanding test for d > 3 uses the norm bound") {
  IntMatrix m = IntMatrix::identity(4) * 2;
  m(0, 1) = 1;
  CHECK(validate_dilation(m).q == 16);
  IntMatrix n = IntMatrix::identity(4) * 2;
  n(3, 3) = 1;
  CHECK(code_of(n) == ErrorCode::NotExpanding);
  CHECK(expanding_by_eigen(m));
}

TEST_CASE("quadratic forms of the example matrices") {
  struct Case {
    IntMatrix a;
    Eigen::MatrixXd q2;
  } cases[] = {{fx::A1(), fx::Q2_A1()}, {fx::A2(), fx::Q2_A2()}, {fx::A3(), fx::Q2_A3()}, {fx::A4(), fx::Q2_A4()}};
  for (const auto& c : cases) {
    const auto a = validate_dilation(c.a);
    const auto qf = solve_quadratic_form(a);
    CHECK(max_abs_diff(qf.Q2, c.q2) < 1e-10);
    const Eigen::MatrixXd am = a.real();
    const double inv = max_abs_diff(am * qf.Q2 * am.transpose(), a.scale() * qf.Q2) / qf.Q2.cwiseAbs().maxCoeff();
    CHECK(inv < 1e-12);
  }
  CHECK(solve_quadratic_form(validate_dilation(fx::A4())).degenerate);
  CHECK(solve_quadratic_form(validate_dilation(fx::A4())).solution_dim == 3);
  CHECK_FALSE(solve_quadratic_form(validate_dilation(fx::A1())).degenerate);
  const auto q1d = solve_quadratic_form(validate_dilation(IntMatrix{{3}}));
  CHECK(q1d.Q2(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("P invariance under A^{-T}") {
  std::mt19937_64 rng(11);
  for (const auto& m : {fx::A1(), fx::A2(), fx::A3(), fx::A4()}) {
    const auto a = validate_dilation(m);
    const auto qf = solve_quadratic_form(a);
    const Eigen::MatrixXd ait = a.inv_transpose();
    for (int t = 0; t < 100; ++t) {
      auto xi = fx::random_point(rng, 2, -10, 10);
      Eigen::Vector2d v(xi[0], xi[1]);
      Eigen::Vector2d w = ait * v;
      const double p = eval_P(qf, xi);
      const double pw = eval_P(qf, std::vector<double>{w(0), w(1)});
      CHECK(std::abs(pw - p / a.scale()) < 1e-10 * (1 + p));
    }
  }
}

TEST_CASE("non-isotropic matrices") {
  const auto a = validate_dilation(IntMatrix{{2, 1}, {0, 2}});
  const auto cert = certify_isotropy(a);
  CHECK_FALSE(cert.isotropic);
  CHECK(cert.failure_reason == IsotropyFailure::IndefiniteForm);
  try {
    solve_quadratic_form(a);
    FAIL("expected NotIsotropic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotIsotropic);
  }
  const auto b = certify_isotropy(validate_dilation(IntMatrix{{2, 0}, {0, 3}}));
  CHECK_FALSE(b.isotropic);
}

TEST_CASE("isotropy agrees with the eigenvalue oracle on small 2x2 matrices") {
  int iso = 0, non = 0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      for (int c = -3; c <= 3; ++c)
        for (int d = -3; d <= 3; ++d) {
          IntMatrix m{{a, b}, {c, d}};
          const auto det = std::llabs(m.det());
          if (det < 2 || det > 4) continue;
          if (!roots_outside_unit_circle(characteristic_polynomial(m))) continue;
          const auto cert = certify_isotropy(validate_dilation(m));
          const bool expect = fx::isotropic_bruteforce_2x2(m);
          INFO(m.to_string());
          CHECK(cert.isotropic == expect);
          (expect ? iso : non)++;
        }
  CHECK(iso > 50);
  CHECK(non > 10);
  // d = 1: always isotropic
  for (int a : {-4, -3, -2, 2, 3, 4}) CHECK(certify_isotropy(validate_dilation(IntMatrix{{a}})).isotropic);
}

TEST_CASE("orthogonal part") {
  {
    const auto a = validate_dilation(fx::A2());
    const auto u = orthogonal_part(a, solve_quadratic_form(a));
    CHECK(u.orthogonality_error < 1e-10);
    CHECK(u.reconstruction_error < 1e-10);
    CHECK(std::abs(u.U(0, 0)) == doctest::Approx(1 / (2 * std::sqrt(2.0))).epsilon(1e-12));
    CHECK(std::abs(u.U(1, 0)) == doctest::Approx(std::sqrt(7.0) / (2 * std::sqrt(2.0))).epsilon(1e-12));
  }
  {
    const auto a = validate_dilation(fx::A1());
    const auto u = orthogonal_part(a, solve_quadratic_form(a));
    const double s = std::sqrt(0.5);
    CHECK(max_abs_diff(u.U, fx::mat2(s, -s, s, s)) < 1e-12);
  }
  {
    const auto a = validate_dilation(fx::A4());
    const auto u = orthogonal_part(a, solve_quadratic_form(a));
    CHECK(max_abs_diff(u.U, Eigen::MatrixXd::Identity(2, 2)) < 1e-12);
  }
  for (const auto& m : {fx::A1(), fx::A2(), fx::A3(), fx::A4()}) {
    const auto a = validate_dilation(m);
    CHECK(orthogonal_part(a, solve_quadratic_form(a)).orthogonality_error < 1e-10);
  }
  QuadraticForm bad;
  bad.Q2 = fx::mat2(1, 2, 2, 1);
  CHECK_THROWS_AS(orthogonal_part(validate_dilation(fx::A1()), bad), Error);
}

TEST_CASE("eval_P") {
  QuadraticForm id;
  id.Q2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK(eval_P(id, std::vector<double>{3, 4}) == 25.0);
  QuadraticForm q2;
  q2.Q2 = fx::Q2_A2();
  CHECK(eval_P(q2, std::vector<double>{1, 1}) == doctest::Approx(2.0));
  CHECK(eval_P(q2, std::vector<double>{0, 0}) == 0.0);
}
