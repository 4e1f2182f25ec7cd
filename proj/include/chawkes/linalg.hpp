#pragma once

// Small dense linear algebra for the p x p state-space matrices (p is tiny,
// typically <= 5). Row-major storage, value semantics.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace chawkes {

using cplx = std::complex<double>;
using RVec = std::vector<double>;
using CVec = std::vector<cplx>;

template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const T> data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RMatrix = Matrix<double>;
using CMatrix = Matrix<cplx>;

template <typename T>
Matrix<T> operator*(const Matrix<T>& x, const Matrix<T>& y) {
  Matrix<T> out(x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t k = 0; k < x.cols(); ++k) {
      const T xik = x(i, k);
      for (std::size_t j = 0; j < y.cols(); ++j) out(i, j) += xik * y(k, j);
    }
  return out;
}

template <typename T>
std::vector<T> operator*(const Matrix<T>& x, std::span<const T> v) {
  std::vector<T> out(x.rows(), T{});
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out[i] += x(i, j) * v[j];
  return out;
}

template <typename T>
std::vector<T> operator*(const Matrix<T>& x, const std::vector<T>& v) {
  return x * std::span<const T>(v);
}

CMatrix to_complex(const RMatrix& m);

// Solves M x = rhs by Gaussian elimination with partial pivoting.
// Throws NumericalError on an exactly singular pivot.
CVec lu_solve(CMatrix m, CVec rhs);
RVec lu_solve(RMatrix m, RVec rhs);

// Inverse via p solves against the identity columns.
CMatrix inverse(const CMatrix& m);

double frobenius_norm(const CMatrix& m);
double euclidean_norm(std::span<const cplx> v);

}  // namespace chawkes
