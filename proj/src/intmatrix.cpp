#include "esf/intmatrix.hpp"

#include <numeric>
#include <sstream>

#include "esf/error.hpp"

namespace esf {

namespace {

__extension__ typedef __int128 i128;

std::int64_t narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) {
    fail(ErrorCode::NumericalBreakdown, "integer overflow in exact matrix arithmetic");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NotExpanding: return "NotExpanding";
    case ErrorCode::NotIsotropic: return "NotIsotropic";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::NotPD: return "NotPD";
    case ErrorCode::MaskPoleAtDigit: return "MaskPoleAtDigit";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NonSimpleEigenvalue: return "NonSimpleEigenvalue";
    case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

IntMatrix::IntMatrix(int d) : d_(d), a_(static_cast<std::size_t>(d * d), 0) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  std::vector<std::vector<std::int64_t>> r;
  for (const auto& row : rows) r.emplace_back(row);
  *this = from_rows(r);
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
  const int d = static_cast<int>(rows.size());
  if (d == 0) fail(ErrorCode::InvalidArgument, "empty matrix");
  IntMatrix m(d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != d) {
      fail(ErrorCode::InvalidArgument, "matrix must be square");
    }
    for (int j = 0; j < d; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

IntMatrix IntMatrix::identity(int d) {
  IntMatrix m(d);
  for (int i = 0; i < d; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
  IntMatrix r(d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) {
      i128 s = 0;
      for (int k = 0; k < d_; ++k) s += static_cast<i128>((*this)(i, k)) * rhs(k, j);
      r(i, j) = narrow(s);
    }
  return r;
}

IntVec IntMatrix::operator*(const IntVec& v) const {
  IntVec r(static_cast<std::size_t>(d_), 0);
  for (int i = 0; i < d_; ++i) {
    i128 s = 0;
    for (int k = 0; k < d_; ++k) s += static_cast<i128>((*this)(i, k)) * v[static_cast<std::size_t>(k)];
    r[static_cast<std::size_t>(i)] = narrow(s);
  }
  return r;
}

IntMatrix IntMatrix::operator*(std::int64_t s) const {
  IntMatrix r = *this;
  for (auto& x : r.a_) x = narrow(static_cast<i128>(x) * s);
  return r;
}

std::int64_t IntMatrix::det() const {
  // Bareiss: every intermediate division is exact.
  std::vector<i128> m(a_.begin(), a_.end());
  auto at = [&](int i, int j) -> i128& { return m[static_cast<std::size_t>(i * d_ + j)]; };
  int sign = 1;
  i128 prev = 1;
  for (int k = 0; k < d_ - 1; ++k) {
    if (at(k, k) == 0) {
      int swap = -1;
      for (int i = k + 1; i < d_; ++i)
        if (at(i, k) != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      for (int j = 0; j < d_; ++j) std::swap(at(k, j), at(swap, j));
      sign = -sign;
    }
    for (int i = k + 1; i < d_; ++i)
      for (int j = k + 1; j < d_; ++j) at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
    prev = at(k, k);
  }
  return narrow(sign * at(d_ - 1, d_ - 1));
}

IntMatrix IntMatrix::adjugate() const {
  IntMatrix adj(d_);
  if (d_ == 1) {
    adj(0, 0) = 1;
    return adj;
  }
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) {
      IntMatrix minor(d_ - 1);
      for (int r = 0, rr = 0; r < d_; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < d_; ++c) {
          if (c == j) continue;
          minor(rr, cc++) = (*this)(r, c);
        }
        ++rr;
      }
      const std::int64_t cof = ((i + j) % 2 == 0 ? 1 : -1) * minor.det();
      adj(j, i) = cof;
    }
  return adj;
}

IntMatrix IntMatrix::pow(int n) const {
  IntMatrix r = identity(d_);
  for (int i = 0; i < n; ++i) r = r * (*this);
  return r;
}

Eigen::MatrixXd IntMatrix::to_real() const {
  Eigen::MatrixXd m(d_, d_);
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) m(i, j) = static_cast<double>((*this)(i, j));
  return m;
}

std::vector<std::vector<std::int64_t>> IntMatrix::rows() const {
  std::vector<std::vector<std::int64_t>> r(static_cast<std::size_t>(d_));
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) r[static_cast<std::size_t>(i)].push_back((*this)(i, j));
  return r;
}

std::string IntMatrix::to_string() const {
  std::ostringstream os;
  for (int i = 0; i < d_; ++i) {
    if (i) os << ';';
    for (int j = 0; j < d_; ++j) {
      if (j) os << ',';
      os << (*this)(i, j);
    }
  }
  return os.str();
}

IntMatrix parse_matrix(const std::string& text) {
  std::vector<std::vector<std::int64_t>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<std::int64_t> r;
    std::stringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) {
      std::size_t pos = 0;
      long long v = 0;
      try {
        v = std::stoll(cell, &pos);
      } catch (const std::exception&) {
        fail(ErrorCode::ConfigError, "matrix entry is not an integer: '" + cell + "'");
      }
      while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
      if (pos != cell.size()) fail(ErrorCode::ConfigError, "matrix entry is not an integer: '" + cell + "'");
      r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  try {
    return IntMatrix::from_rows(rows);
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, e.what());
  }
}

std::vector<std::int64_t> characteristic_polynomial(const IntMatrix& a) {
  // Faddeev-LeVerrier; the division by k is exact over the integers.
  const int d = a.dim();
  std::vector<std::int64_t> c(static_cast<std::size_t>(d + 1), 0);
  c[static_cast<std::size_t>(d)] = 1;
  IntMatrix mk(d);  // M_0 = 0
  for (int k = 1; k <= d; ++k) {
    IntMatrix next = a * mk;
    for (int i = 0; i < d; ++i) next(i, i) += c[static_cast<std::size_t>(d - k + 1)];
    mk = next;
    IntMatrix amk = a * mk;
    i128 tr = 0;
    for (int i = 0; i < d; ++i) tr += amk(i, i);
    c[static_cast<std::size_t>(d - k)] = narrow(-tr / k);
  }
  return c;
}

RealVec to_real(const IntVec& v) {
  RealVec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = static_cast<double>(v[i]);
  return r;
}

}  // namespace esf
