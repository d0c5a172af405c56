#include "ubp/matrix.hpp"

#include <cmath>
#include <string>

#include "ubp/error.hpp"

namespace ubp {

template <typename T>
Matrix<T>::Matrix(std::size_t rows, std::size_t cols, T fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

template <typename T>
Matrix<T>::Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows * cols, "matrix data length " + std::to_string(data_.size()) +
                                           " != " + std::to_string(rows) + "x" + std::to_string(cols));
  require(all_finite(), "matrix contains non-finite values");
}

template <typename T>
Matrix<T> Matrix<T>::from_rows(std::initializer_list<std::initializer_list<T>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r ? rows.begin()->size() : 0;
  std::vector<T> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    require(row.size() == c, "ragged initializer");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

template <typename T>
Matrix<T> Matrix<T>::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
  return m;
}

template <typename T>
bool Matrix<T>::all_finite() const {
  for (T v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  require(a.cols() == b.rows(), "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  const std::size_t n = a.rows(), inner = a.cols(), m = b.cols();
  Matrix<T> out(n, m);
  const T* pa = a.data().data();
  const T* pb = b.data().data();
  T* po = out.data().data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    T* orow = po + i * m;
    for (std::size_t k = 0; k < inner; ++k) {
      const T aik = pa[i * inner + k];
      const T* brow = pb + k * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

template <typename T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b) {
  require(a.rows() == b.rows(), "matmul_tn: row counts differ");
  const std::size_t n = a.cols(), inner = a.rows(), m = b.cols();
  Matrix<T> out(n, m);
  const T* pa = a.data().data();
  const T* pb = b.data().data();
  T* po = out.data().data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    T* orow = po + i * m;
    for (std::size_t k = 0; k < inner; ++k) {
      const T aki = pa[k * n + i];
      if (aki == T(0)) continue;
      const T* brow = pb + k * m;
      for (std::size_t j = 0; j < m; ++j) orow[j] += aki * brow[j];
    }
  }
  return out;
}

template <typename T>
Matrix<T> matmul_nt(const Matrix<T>& a, const Matrix<T>& b) {
  require(a.cols() == b.cols(), "matmul_nt: column counts differ");
  const std::size_t n = a.rows(), inner = a.cols(), m = b.rows();
  Matrix<T> out(n, m);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    auto arow = a.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < m; ++j) {
      auto brow = b.row(j);
      T acc = T(0);
      for (std::size_t k = 0; k < inner; ++k) acc += arow[k] * brow[k];
      out(static_cast<std::size_t>(i), j) = acc;
    }
  }
  return out;
}

template <typename T>
Matrix<T> transpose(const Matrix<T>& a) {
  Matrix<T> out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

template <typename T>
Matrix<T> l2_normalize_rows(const Matrix<T>& m) {
  Matrix<T> out = m;
  bool degenerate = false;
#pragma omp parallel for schedule(static) reduction(|| : degenerate)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m.rows()); ++i) {
    auto r = out.row(static_cast<std::size_t>(i));
    T ss = T(0);
    for (T v : r) ss += v * v;
    if (ss == T(0)) {
      degenerate = true;
      continue;
    }
    const T inv = T(1) / std::sqrt(ss);
    for (T& v : r) v *= inv;
  }
  if (degenerate) throw DegenerateInput("l2_normalize_rows: all-zero row");
  return out;
}

template <typename T>
std::vector<T> column_sums(const Matrix<T>& m) {
  std::vector<T> out(m.cols(), T(0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += r[j];
  }
  return out;
}

template <typename T>
Matrix<T> gather_rows(const Matrix<T>& m, std::span<const std::size_t> rows) {
  Matrix<T> out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < m.rows(), "gather_rows: index out of range");
    auto src = m.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

#define UBP_INSTANTIATE(T)                                                         \
  template class Matrix<T>;                                                        \
  template Matrix<T> matmul(const Matrix<T>&, const Matrix<T>&);                   \
  template Matrix<T> matmul_tn(const Matrix<T>&, const Matrix<T>&);                \
  template Matrix<T> matmul_nt(const Matrix<T>&, const Matrix<T>&);                \
  template Matrix<T> transpose(const Matrix<T>&);                                  \
  template Matrix<T> l2_normalize_rows(const Matrix<T>&);                          \
  template std::vector<T> column_sums(const Matrix<T>&);                           \
  template Matrix<T> gather_rows(const Matrix<T>&, std::span<const std::size_t>);

UBP_INSTANTIATE(float)
UBP_INSTANTIATE(double)
#undef UBP_INSTANTIATE

}  // namespace ubp
