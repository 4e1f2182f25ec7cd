#include "chawkes/linalg.hpp"

#include <cmath>
#include <utility>

#include "chawkes/errors.hpp"

namespace chawkes {

namespace {

template <typename T>
std::vector<T> solve_impl(Matrix<T> m, std::vector<T> rhs) {
  const std::size_t n = m.rows();
  if (m.cols() != n || rhs.size() != n) throw ValidationError("lu_solve: dimension mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(m(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m(r, col)) > best) {
        best = std::abs(m(r, col));
        pivot = r;
      }
    }
    if (best == 0.0) throw NumericalError("lu_solve: singular matrix");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(col, j), m(pivot, j));
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const T f = m(r, col) / m(col, col);
      if (f == T{}) continue;
      for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<T> x(n);
  for (std::size_t i = n; i-- > 0;) {
    T acc = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= m(i, j) * x[j];
    x[i] = acc / m(i, i);
  }
  return x;
}

}  // namespace

CMatrix to_complex(const RMatrix& m) {
  CMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

CVec lu_solve(CMatrix m, CVec rhs) { return solve_impl(std::move(m), std::move(rhs)); }
RVec lu_solve(RMatrix m, RVec rhs) { return solve_impl(std::move(m), std::move(rhs)); }

CMatrix inverse(const CMatrix& m) {
  const std::size_t n = m.rows();
  CMatrix out(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    CVec unit(n, cplx{});
    unit[j] = 1.0;
    const CVec col = lu_solve(m, unit);
    for (std::size_t i = 0; i < n; ++i) out(i, j) = col[i];
  }
  return out;
}

double frobenius_norm(const CMatrix& m) {
  double s = 0.0;
  for (const cplx& v : m.data()) s += std::norm(v);
  return std::sqrt(s);
}

double euclidean_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace chawkes
