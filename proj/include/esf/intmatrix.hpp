#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace esf {

using IntVec = std::vector<std::int64_t>;
using RealVec = std::vector<double>;

/// Small dense square integer matrix, row-major. Dimensions in this project
/// are tiny (d <= 3 in practice) so all routines favour exactness over speed.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(int d);
  IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);
  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows);
  static IntMatrix identity(int d);

  int dim() const { return d_; }
  std::int64_t& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * d_ + j)]; }
  std::int64_t operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * d_ + j)]; }

  IntMatrix transpose() const;
  IntMatrix operator*(const IntMatrix& rhs) const;
  IntVec operator*(const IntVec& v) const;
  IntMatrix operator*(std::int64_t s) const;
  bool operator==(const IntMatrix& rhs) const = default;

  /// Exact determinant (fraction-free Bareiss elimination in 128-bit arithmetic).
  std::int64_t det() const;
  /// Exact adjugate, adj(A) * A = det(A) * I.
  IntMatrix adjugate() const;
  IntMatrix pow(int n) const;

  Eigen::MatrixXd to_real() const;
  std::vector<std::vector<std::int64_t>> rows() const;
  /// "a,b;c,d" form used on the command line.
  std::string to_string() const;

 private:
  int d_ = 0;
  std::vector<std::int64_t> a_;
};

/// Parse "a,b;c,d" into a square matrix. Throws ConfigError on malformed input.
IntMatrix parse_matrix(const std::string& text);

/// Characteristic polynomial coefficients c_0..c_d of det(lambda I - A), monic.
std::vector<std::int64_t> characteristic_polynomial(const IntMatrix& a);

RealVec to_real(const IntVec& v);

/// Calls f(v) for every v in [lo, hi], last coordinate fastest.
template <class F>
void for_box(const IntVec& lo, const IntVec& hi, F&& f) {
  const std::size_t d = lo.size();
  for (std::size_t i = 0; i < d; ++i)
    if (lo[i] > hi[i]) return;
  IntVec v = lo;
  while (true) {
    f(v);
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (v[i] < hi[i]) {
        ++v[i];
        for (std::size_t j = i + 1; j < d; ++j) v[j] = lo[j];
        break;
      }
      if (i == 0) return;
    }
    if (d == 0) return;
  }
}

}  // namespace esf
