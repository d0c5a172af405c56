#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

#include "ubp/matrix.hpp"
#include "ubp/rng.hpp"

namespace ubp {

// Brain encoder: linear projection, residual GELU -> linear -> dropout branch,
// layer norm, optional row L2 normalization.
//
//   z = x W1 + b1
//   u = z + dropout(GELU(z) W2 + b2)
//   y = layernorm(u) * ln_gain + ln_bias
//   h = y / |y|          (when normalize_embeddings)
template <typename T>
struct EncoderParams {
  Matrix<T> w1;       // input_dim x proj_dim
  Matrix<T> b1;       // 1 x proj_dim
  Matrix<T> w2;       // proj_dim x proj_dim
  Matrix<T> b2;       // 1 x proj_dim
  Matrix<T> ln_gain;  // 1 x proj_dim
  Matrix<T> ln_bias;  // 1 x proj_dim
  T tau_raw = T(0);   // temperature before softplus

  std::size_t input_dim() const { return w1.rows(); }
  std::size_t proj_dim() const { return w1.cols(); }

  // Same shapes, all zeros.
  EncoderParams zeros_like() const;

  template <typename U>
  EncoderParams<U> cast() const {
    return {w1.template cast<U>(),      b1.template cast<U>(),      w2.template cast<U>(),
            b2.template cast<U>(),      ln_gain.template cast<U>(), ln_bias.template cast<U>(),
            static_cast<U>(tau_raw)};
  }

  friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

// Visits every learnable tensor in declaration order. `decayed` marks the
// weight matrices that take decoupled weight decay.
template <typename T, typename Fn>
void for_each_tensor(EncoderParams<T>& p, Fn&& fn) {
  fn(std::string_view("w1"), p.w1.data(), true);
  fn(std::string_view("b1"), p.b1.data(), false);
  fn(std::string_view("w2"), p.w2.data(), true);
  fn(std::string_view("b2"), p.b2.data(), false);
  fn(std::string_view("ln_gain"), p.ln_gain.data(), false);
  fn(std::string_view("ln_bias"), p.ln_bias.data(), false);
  fn(std::string_view("tau_raw"), std::span<T>(&p.tau_raw, 1), false);
}

enum class Activation { gelu, identity };

struct EncoderOptions {
  double dropout_rate = 0.3;
  bool normalize_embeddings = true;
  double layernorm_eps = 1e-5;
  // `identity` exists for closed-form gradient tests.
  Activation activation = Activation::gelu;
};

inline constexpr double kInitTemperature = 14.28;

template <typename T>
struct ForwardCache {
  Matrix<T> x;
  Matrix<T> z;
  Matrix<T> act;
  Matrix<T> mask;  // empty when dropout was inactive
  Matrix<T> xhat;
  std::vector<T> rstd;
  Matrix<T> y;
  std::vector<T> norms;  // empty when not normalized
};

template <typename T>
struct ForwardResult {
  Matrix<T> h;
  ForwardCache<T> cache;
};

template <typename T>
struct BackwardResult {
  EncoderParams<T> grads;  // tau_raw gradient is left at zero
  Matrix<T> grad_x;
};

template <typename T>
EncoderParams<T> init_params(std::size_t input_dim, std::size_t proj_dim, Rng& rng);

template <typename T>
ForwardResult<T> forward(const EncoderParams<T>& p, const Matrix<T>& x, bool train, Rng& rng,
                         const EncoderOptions& opts = {});

template <typename T>
BackwardResult<T> backward(const EncoderParams<T>& p, const ForwardCache<T>& cache, const Matrix<T>& grad_h,
                           const EncoderOptions& opts = {});

double gelu(double x);
double gelu_grad(double x);
double softplus(double x);
double softplus_inverse(double y);
double sigmoid(double x);

}  // namespace ubp
