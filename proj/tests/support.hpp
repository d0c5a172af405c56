#pragma once

// Shared helpers for the test binaries.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "ubp/matrix.hpp"
#include "ubp/rng.hpp"

namespace ubp::testing {

template <typename T>
Matrix<T> random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  Matrix<T> m(rows, cols);
  for (T& v : m.data()) v = static_cast<T>(scale * rng.normal());
  return m;
}

template <typename T>
double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i])));
  return worst;
}

// Tensor-level relative error: max entry difference over the largest reference entry.
inline double relative_error(const MatrixD& analytic, const MatrixD& numeric) {
  double scale = 0.0;
  for (double v : numeric.data()) scale = std::max(scale, std::abs(v));
  return max_abs_diff(analytic, numeric) / std::max(scale, 1e-8);
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ubp-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ubp::testing
