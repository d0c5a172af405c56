#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ubp {

// Dense row-major matrix. `float` in training builds, `double` for oracle and
// gradient-check builds.
template <typename T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T(0));
  // Rejects size mismatch and non-finite values.
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<T>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const std::vector<T>& values() const { return data_; }

  bool all_finite() const;

  template <typename U>
  Matrix<U> cast() const {
    Matrix<U> out(rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data()[i] = static_cast<U>(data_[i]);
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using MatrixF = Matrix<float>;
using MatrixD = Matrix<double>;

// OpenMP-parallel kernels. Each output row is computed in the same order as
// the serial reference, so results are bit-identical for any thread count.

// a · b
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b);
// aᵀ · b
template <typename T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b);
// a · bᵀ
template <typename T>
Matrix<T> matmul_nt(const Matrix<T>& a, const Matrix<T>& b);

template <typename T>
Matrix<T> transpose(const Matrix<T>& a);

// Throws DegenerateInput on an all-zero row.
template <typename T>
Matrix<T> l2_normalize_rows(const Matrix<T>& m);

template <typename T>
std::vector<T> column_sums(const Matrix<T>& m);

// Selects rows by index, in the order given.
template <typename T>
Matrix<T> gather_rows(const Matrix<T>& m, std::span<const std::size_t> rows);

namespace reference {

// Serial textbook kernels kept as test oracles and benchmark baselines.
template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b);
template <typename T>
Matrix<T> l2_normalize_rows(const Matrix<T>& m);

}  // namespace reference

}  // namespace ubp
