#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "ubp/error.hpp"
#include "ubp/matrix.hpp"

namespace ubp {

// Central-difference gradient of a scalar function, one entry at a time.
// Gradient oracle for the hand-written backward passes.
inline MatrixD finite_diff_grad(const std::function<double(const MatrixD&)>& f, const MatrixD& x, double h) {
  require(h > 0.0, "finite_diff_grad: step must be positive");
  MatrixD grad(x.rows(), x.cols());
  MatrixD probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = probe.data()[i];
    probe.data()[i] = orig + h;
    const double fp = f(probe);
    probe.data()[i] = orig - h;
    const double fm = f(probe);
    probe.data()[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw OracleFailure("finite_diff_grad: non-finite value at entry " + std::to_string(i));
    }
    grad.data()[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace ubp
