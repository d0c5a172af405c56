#include <cmath>

#include "ubp/error.hpp"
#include "ubp/matrix.hpp"

namespace ubp::reference {

template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  require(a.cols() == b.rows(), "reference::matmul: dimension mismatch");
  Matrix<T> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      T acc = T(0);
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

template <typename T>
Matrix<T> l2_normalize_rows(const Matrix<T>& m) {
  Matrix<T> out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    T ss = T(0);
    for (T v : m.row(i)) ss += v * v;
    if (ss == T(0)) throw DegenerateInput("l2_normalize_rows: all-zero row");
    const T norm = std::sqrt(ss);
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j) / norm;
  }
  return out;
}

template Matrix<float> matmul(const Matrix<float>&, const Matrix<float>&);
template Matrix<double> matmul(const Matrix<double>&, const Matrix<double>&);
template Matrix<float> l2_normalize_rows(const Matrix<float>&);
template Matrix<double> l2_normalize_rows(const Matrix<double>&);

}  // namespace ubp::reference
