#pragma once

#include <vector>

#include "ubp/matrix.hpp"

namespace ubp {

template <typename T>
struct LossOutput {
  T value = T(0);
  Matrix<T> grad_hb;
  Matrix<T> grad_hv;  // zero-filled when the vision branch is frozen
  T grad_tau_raw = T(0);
  std::vector<T> diag_scores;
};

// M[i][j] = <h_b[i], h_v[j]> * softplus(tau_raw)
template <typename T>
Matrix<T> similarity_matrix(const Matrix<T>& h_b, const Matrix<T>& h_v, T tau_raw);

// Symmetric in-batch cross-entropy: mean over rows of -log row-softmax
// diagonal plus mean over columns of -log column-softmax diagonal.
template <typename T>
T sce_loss(const Matrix<T>& m);

// d L / d M = (P_row - I)/N + (P_col - I)/N
template <typename T>
Matrix<T> sce_grad_similarity(const Matrix<T>& m);

template <typename T>
LossOutput<T> sce_backward(const Matrix<T>& m, const Matrix<T>& h_b, const Matrix<T>& h_v, T tau_raw,
                           bool vision_frozen = true);

// similarity_matrix followed by sce_backward.
template <typename T>
LossOutput<T> contrastive_loss(const Matrix<T>& h_b, const Matrix<T>& h_v, T tau_raw, bool vision_frozen = true);

}  // namespace ubp
