#pragma once

#include <cstdint>
#include <vector>

#include "ubp/encoder.hpp"

namespace ubp {

template <typename T>
struct AdamWState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  // One accumulator per tensor, in for_each_tensor order.
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;

  friend bool operator==(const AdamWState&, const AdamWState&) = default;
};

template <typename T>
AdamWState<T> make_adamw_state(const EncoderParams<T>& params);

// Decoupled weight decay: θ ← θ − lr·(m̂/(√v̂ + ε) + wd·θ). Decay applies to
// the weight matrices only, not biases, layer-norm parameters or tau_raw.
template <typename T>
void adamw_step(EncoderParams<T>& params, const EncoderParams<T>& grads, AdamWState<T>& state, double lr, double wd);

}  // namespace ubp
