#include "esf/matana.hpp"

#include <cmath>
#include <cstdlib>
#include <utility>
#include <vector>

#include "esf/error.hpp"

namespace esf {

namespace {

__extension__ typedef __int128 i128;

i128 abs128(i128 v) { return v < 0 ? -v : v; }

i128 gcd128(i128 a, i128 b) {
  a = abs128(a);
  b = abs128(b);
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Spectral radius of A^{-1} below 1 - margin, via ||B^k||^{1/k} with k = 2^s.
bool gelfand_expanding(const Eigen::MatrixXd& a, double margin) {
  Eigen::MatrixXd b = a.inverse();
  double log_scale = 0.0;
  double k = 1.0;
  for (int s = 0; s <= 40; ++s) {
    const double nrm = b.norm();
    if (nrm == 0.0) return true;
    const double bound = std::exp((std::log(nrm) + log_scale) / k);
    if (bound < 1.0 - margin) return true;
    b /= nrm;
    log_scale += std::log(nrm);
    b = b * b;
    log_scale *= 2.0;
    k *= 2.0;
  }
  return false;
}

struct SymBasis {
  int d;
  std::vector<std::pair<int, int>> idx;

  explicit SymBasis(int dim) : d(dim) {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) idx.emplace_back(i, j);
  }
  int size() const { return static_cast<int>(idx.size()); }

  // Orthonormal (Frobenius) coordinates.
  Eigen::VectorXd coords(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd v(size());
    for (int t = 0; t < size(); ++t) {
      auto [i, j] = idx[static_cast<std::size_t>(t)];
      v(t) = i == j ? x(i, j) : std::sqrt(2.0) * x(i, j);
    }
    return v;
  }
  Eigen::MatrixXd matrix(const Eigen::VectorXd& v) const {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(d, d);
    for (int t = 0; t < size(); ++t) {
      auto [i, j] = idx[static_cast<std::size_t>(t)];
      if (i == j) {
        x(i, i) = v(t);
      } else {
        x(i, j) = x(j, i) = v(t) / std::sqrt(2.0);
      }
    }
    return x;
  }
};

bool is_pd(const Eigen::MatrixXd& x) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  const auto& ev = es.eigenvalues();
  return ev.minCoeff() > 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
}

}  // namespace

std::string_view to_string(IsotropyFailure f) {
  switch (f) {
    case IsotropyFailure::None: return "none";
    case IsotropyFailure::NoInvariantForm: return "no_invariant_form";
    case IsotropyFailure::IndefiniteForm: return "invariant_form_not_positive_definite";
  }
  return "unknown";
}

double DilationMatrix::scale() const {
  return std::pow(static_cast<double>(q), 2.0 / d);
}

bool roots_outside_unit_circle(const std::vector<std::int64_t>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return true;
  if (c[0] == 0) return false;
  std::vector<i128> r(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) r[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(n - k)];
  while (r.size() > 1) {
    const std::size_t deg = r.size() - 1;
    if (abs128(r[deg]) <= abs128(r[0])) return false;
    std::vector<i128> g(deg);
    i128 gg = 0;
    for (std::size_t k = 1; k <= deg; ++k) {
      g[k - 1] = r[deg] * r[k] - r[0] * r[deg - k];
      gg = gcd128(gg, g[k - 1]);
    }
    if (gg > 1)
      for (auto& v : g) v /= gg;
    r = std::move(g);
  }
  return true;
}

DilationMatrix validate_dilation(const IntMatrix& m) {
  if (m.dim() < 1) fail(ErrorCode::InvalidArgument, "empty matrix");
  const std::int64_t det = m.det();
  if (det == 0) fail(ErrorCode::Singular, "dilation matrix is singular");
  bool expanding;
  if (m.dim() <= 3) {
    expanding = roots_outside_unit_circle(characteristic_polynomial(m));
  } else {
    expanding = gelfand_expanding(m.to_real(), 1e-8);
  }
  if (!expanding) fail(ErrorCode::NotExpanding, "matrix has an eigenvalue of modulus <= 1");
  DilationMatrix a;
  a.A = m;
  a.d = m.dim();
  a.q = std::llabs(det);
  return a;
}

IsotropyCertificate certify_isotropy(const DilationMatrix& a) {
  const int d = a.d;
  const SymBasis basis(d);
  const int n = basis.size();
  const Eigen::MatrixXd am = a.real();
  const double c = a.scale();

  Eigen::MatrixXd lmap(n, n);
  for (int t = 0; t < n; ++t) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(t) = 1.0;
    const Eigen::MatrixXd x = basis.matrix(e);
    lmap.col(t) = basis.coords(am * x * am.transpose() - c * x);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lmap, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double thresh = 1e-9 * std::max(1.0, sv(0));
  int k = 0;
  for (int t = 0; t < n; ++t)
    if (sv(t) < thresh) ++k;

  IsotropyCertificate cert;
  cert.solution_dim = k;
  if (k == 0) {
    cert.failure_reason = IsotropyFailure::NoInvariantForm;
    return cert;
  }
  const Eigen::MatrixXd kernel = svd.matrixV().rightCols(k);

  Eigen::MatrixXd x;
  if (k == 1) {
    x = basis.matrix(kernel.col(0));
    if (x.trace() < 0) x = -x;
  } else {
    // Frobenius-closest element to the identity.
    const Eigen::VectorXd id = basis.coords(Eigen::MatrixXd::Identity(d, d));
    x = basis.matrix(kernel * (kernel.transpose() * id));
    if (!is_pd(x)) {
      // Fall back to the spectral projection of I onto the invariant forms
      // along range(L); it is an average of congruent copies of I, hence PD
      // whenever A is isotropic.
      Eigen::JacobiSVD<Eigen::MatrixXd> rs(lmap, Eigen::ComputeFullU);
      Eigen::MatrixXd sys(n, n);
      sys << kernel, rs.matrixU().leftCols(n - k);
      const Eigen::VectorXd coef = sys.colPivHouseholderQr().solve(id);
      x = basis.matrix(kernel * coef.head(k));
    }
  }
  if (!is_pd(x) || x(d - 1, d - 1) <= 0.0) {
    cert.failure_reason = IsotropyFailure::IndefiniteForm;
    return cert;
  }
  x /= x(d - 1, d - 1);
  x = 0.5 * (x + x.transpose());
  const double big = x.cwiseAbs().maxCoeff();
  x = x.unaryExpr([big](double v) { return std::abs(v) < 1e-14 * big ? 0.0 : v; });

  QuadraticForm qf;
  qf.Q2 = x;
  qf.degenerate = k > 1;
  qf.solution_dim = k;
  cert.isotropic = true;
  cert.witness = qf;
  return cert;
}

QuadraticForm solve_quadratic_form(const DilationMatrix& a) {
  IsotropyCertificate cert = certify_isotropy(a);
  if (!cert.isotropic) {
    fail(ErrorCode::NotIsotropic,
         "matrix " + a.A.to_string() + " is not isotropic (" + std::string(to_string(cert.failure_reason)) + ")");
  }
  return *cert.witness;
}

OrthogonalPart orthogonal_part(const DilationMatrix& a, const QuadraticForm& q2) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q2.Q2);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    fail(ErrorCode::NumericalBreakdown, "Q2 has no positive-definite square root");
  }
  OrthogonalPart out;
  out.Q = es.operatorSqrt();
  const Eigen::MatrixXd qinv = es.operatorInverseSqrt();
  const double s = std::pow(static_cast<double>(a.q), 1.0 / a.d);
  const Eigen::MatrixXd ait = a.inv_transpose();
  out.U = s * out.Q * ait * qinv;
  out.orthogonality_error =
      (out.U.transpose() * out.U - Eigen::MatrixXd::Identity(a.d, a.d)).cwiseAbs().maxCoeff();
  out.reconstruction_error = (ait - (1.0 / s) * qinv * out.U * out.Q).cwiseAbs().maxCoeff();
  return out;
}

double eval_P(const Eigen::MatrixXd& q2, std::span<const double> xi) {
  const int d = static_cast<int>(q2.rows());
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    s += q2(i, i) * xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < d; ++j)
      s += 2.0 * q2(i, j) * xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(j)];
  }
  return s;
}

double eval_P(const QuadraticForm& q2, std::span<const double> xi) {
  if (static_cast<int>(xi.size()) != q2.dim()) fail(ErrorCode::InvalidArgument, "dimension mismatch in eval_P");
  return eval_P(q2.Q2, xi);
}

}  // namespace esf
