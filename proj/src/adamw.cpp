#include "ubp/adamw.hpp"

#include <cmath>

#include "ubp/error.hpp"

namespace ubp {

template <typename T>
AdamWState<T> make_adamw_state(const EncoderParams<T>& params) {
  AdamWState<T> st;
  auto copy = params;
  for_each_tensor(copy, [&](std::string_view, std::span<T> t, bool) {
    st.m.emplace_back(t.size(), T(0));
    st.v.emplace_back(t.size(), T(0));
  });
  return st;
}

template <typename T>
void adamw_step(EncoderParams<T>& params, const EncoderParams<T>& grads, AdamWState<T>& state, double lr, double wd) {
  std::vector<std::span<const T>> g;
  auto gcopy = grads;
  for_each_tensor(gcopy, [&](std::string_view, std::span<T> t, bool) { g.emplace_back(t); });
  require(state.m.size() == g.size() && state.v.size() == g.size(), "adamw_step: optimizer state does not match parameters");

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  std::size_t idx = 0;
  for_each_tensor(params, [&](std::string_view name, std::span<T> theta, bool decayed) {
    auto& m = state.m[idx];
    auto& v = state.v[idx];
    const auto grad = g[idx];
    require(theta.size() == grad.size() && theta.size() == m.size(),
            "adamw_step: shape mismatch in " + std::string(name));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double gi = static_cast<double>(grad[i]);
      const double mi = state.beta1 * static_cast<double>(m[i]) + (1.0 - state.beta1) * gi;
      const double vi = state.beta2 * static_cast<double>(v[i]) + (1.0 - state.beta2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double update = (mi / bc1) / (std::sqrt(vi / bc2) + state.eps);
      const double th = static_cast<double>(theta[i]);
      theta[i] = static_cast<T>(th - lr * (update + (decayed ? wd * th : 0.0)));
    }
    ++idx;
  });
}

template AdamWState<float> make_adamw_state(const EncoderParams<float>&);
template AdamWState<double> make_adamw_state(const EncoderParams<double>&);
template void adamw_step(EncoderParams<float>&, const EncoderParams<float>&, AdamWState<float>&, double, double);
template void adamw_step(EncoderParams<double>&, const EncoderParams<double>&, AdamWState<double>&, double, double);

}  // namespace ubp
