#include "ubp/loss.hpp"

#include <algorithm>
#include <cmath>

#include "ubp/encoder.hpp"
#include "ubp/error.hpp"

namespace ubp {

template <typename T>
Matrix<T> similarity_matrix(const Matrix<T>& h_b, const Matrix<T>& h_v, T tau_raw) {
  require(h_b.cols() == h_v.cols(), "similarity_matrix: embedding dimensions differ");
  Matrix<T> m = matmul_nt(h_b, h_v);
  const T scale = static_cast<T>(softplus(static_cast<double>(tau_raw)));
  for (T& v : m.data()) v *= scale;
  return m;
}

namespace {

// Row-wise log-sum-exp with max subtraction; `by_column` walks columns instead.
template <typename T>
std::vector<double> log_sum_exp(const Matrix<T>& m, bool by_column) {
  const std::size_t n = m.rows();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto at = [&](std::size_t j) { return static_cast<double>(by_column ? m(j, i) : m(i, j)); };
    double mx = at(0);
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, at(j));
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::exp(at(j) - mx);
    out[i] = mx + std::log(s);
  }
  return out;
}

template <typename T>
void check_square(const Matrix<T>& m) {
  require(m.rows() == m.cols(), "sce: similarity matrix must be square");
  require(m.rows() >= 2, "sce: batch must contain at least two pairs");
}

}  // namespace

template <typename T>
T sce_loss(const Matrix<T>& m) {
  check_square(m);
  const std::size_t n = m.rows();
  const auto row_lse = log_sum_exp(m, false);
  const auto col_lse = log_sum_exp(m, true);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diag = static_cast<double>(m(i, i));
    total += (row_lse[i] - diag) + (col_lse[i] - diag);
  }
  return static_cast<T>(total / static_cast<double>(n));
}

template <typename T>
Matrix<T> sce_grad_similarity(const Matrix<T>& m) {
  check_square(m);
  const std::size_t n = m.rows();
  const auto row_lse = log_sum_exp(m, false);
  const auto col_lse = log_sum_exp(m, true);
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix<T> g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = static_cast<double>(m(i, j));
      const double p_row = std::exp(v - row_lse[i]);
      const double p_col = std::exp(v - col_lse[j]);
      const double eye = i == j ? 1.0 : 0.0;
      g(i, j) = static_cast<T>(inv_n * ((p_row - eye) + (p_col - eye)));
    }
  return g;
}

template <typename T>
LossOutput<T> sce_backward(const Matrix<T>& m, const Matrix<T>& h_b, const Matrix<T>& h_v, T tau_raw,
                           bool vision_frozen) {
  check_square(m);
  require(h_b.rows() == m.rows() && h_v.rows() == m.rows() && h_b.cols() == h_v.cols(),
          "sce_backward: embedding shapes do not match the similarity matrix");
  LossOutput<T> out;
  out.value = sce_loss(m);
  const Matrix<T> dm = sce_grad_similarity(m);
  const double scale = softplus(static_cast<double>(tau_raw));

  out.grad_hb = matmul(dm, h_v);
  for (T& v : out.grad_hb.data()) v = static_cast<T>(static_cast<double>(v) * scale);
  if (vision_frozen) {
    out.grad_hv = Matrix<T>(h_v.rows(), h_v.cols());
  } else {
    out.grad_hv = matmul_tn(dm, h_b);
    for (T& v : out.grad_hv.data()) v = static_cast<T>(static_cast<double>(v) * scale);
  }

  // dL/dtau = sum(dM ⊙ M) / softplus(tau) * sigmoid(tau)
  double acc = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) acc += static_cast<double>(dm.data()[k]) * static_cast<double>(m.data()[k]);
  out.grad_tau_raw = static_cast<T>(acc / scale * sigmoid(static_cast<double>(tau_raw)));

  out.diag_scores.resize(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out.diag_scores[i] = m(i, i);
  return out;
}

template <typename T>
LossOutput<T> contrastive_loss(const Matrix<T>& h_b, const Matrix<T>& h_v, T tau_raw, bool vision_frozen) {
  return sce_backward(similarity_matrix(h_b, h_v, tau_raw), h_b, h_v, tau_raw, vision_frozen);
}

#define UBP_INSTANTIATE(T)                                                                           \
  template Matrix<T> similarity_matrix(const Matrix<T>&, const Matrix<T>&, T);                       \
  template T sce_loss(const Matrix<T>&);                                                             \
  template Matrix<T> sce_grad_similarity(const Matrix<T>&);                                          \
  template LossOutput<T> sce_backward(const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, T, bool); \
  template LossOutput<T> contrastive_loss(const Matrix<T>&, const Matrix<T>&, T, bool);

UBP_INSTANTIATE(float)
UBP_INSTANTIATE(double)
#undef UBP_INSTANTIATE

}  // namespace ubp
