#include "ubp/encoder.hpp"

#include <cmath>
#include <numbers>

#include "ubp/error.hpp"

namespace ubp {

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); }

double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double softplus_inverse(double y) {
  require(y > 0.0, "softplus_inverse: argument must be positive");
  // log(exp(y) - 1) = y + log(1 - exp(-y))
  return y + std::log(-std::expm1(-y));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <typename T>
EncoderParams<T> EncoderParams<T>::zeros_like() const {
  return {Matrix<T>(w1.rows(), w1.cols()),         Matrix<T>(1, b1.cols()),      Matrix<T>(w2.rows(), w2.cols()),
          Matrix<T>(1, b2.cols()),                 Matrix<T>(1, ln_gain.cols()), Matrix<T>(1, ln_bias.cols()),
          T(0)};
}

template <typename T>
EncoderParams<T> init_params(std::size_t input_dim, std::size_t proj_dim, Rng& rng) {
  require(input_dim >= 1 && proj_dim >= 1, "init_params: dimensions must be >= 1");
  auto uniform_fill = [&](std::size_t rows, std::size_t cols) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(rows));
    Matrix<T> m(rows, cols);
    for (T& v : m.data()) v = static_cast<T>(rng.uniform(-bound, bound));
    return m;
  };
  EncoderParams<T> p;
  p.w1 = uniform_fill(input_dim, proj_dim);
  p.b1 = Matrix<T>(1, proj_dim);
  p.w2 = uniform_fill(proj_dim, proj_dim);
  p.b2 = Matrix<T>(1, proj_dim);
  p.ln_gain = Matrix<T>(1, proj_dim, T(1));
  p.ln_bias = Matrix<T>(1, proj_dim);
  p.tau_raw = static_cast<T>(softplus_inverse(kInitTemperature));
  return p;
}

namespace {

template <typename T>
void add_row_bias(Matrix<T>& m, const Matrix<T>& bias) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] += bias.data()[j];
  }
}

template <typename T>
void check_shapes(const EncoderParams<T>& p) {
  const auto d = p.proj_dim();
  require(p.b1.rows() == 1 && p.b1.cols() == d && p.w2.rows() == d && p.w2.cols() == d && p.b2.cols() == d &&
              p.ln_gain.cols() == d && p.ln_bias.cols() == d,
          "encoder parameter shapes are inconsistent");
}

}  // namespace

template <typename T>
ForwardResult<T> forward(const EncoderParams<T>& p, const Matrix<T>& x, bool train, Rng& rng,
                         const EncoderOptions& opts) {
  check_shapes(p);
  require(x.cols() == p.input_dim(), "encoder forward: input has " + std::to_string(x.cols()) +
                                         " columns, expected " + std::to_string(p.input_dim()));
  const std::size_t n = x.rows(), d = p.proj_dim();
  ForwardResult<T> out;
  auto& c = out.cache;
  c.x = x;

  c.z = matmul(x, p.w1);
  add_row_bias(c.z, p.b1);

  c.act = c.z;
  if (opts.activation == Activation::gelu) {
    for (T& v : c.act.data()) v = static_cast<T>(gelu(static_cast<double>(v)));
  }

  Matrix<T> branch = matmul(c.act, p.w2);
  add_row_bias(branch, p.b2);
  if (train && opts.dropout_rate > 0.0) {
    c.mask = Matrix<T>(n, d);
    const T keep_scale = static_cast<T>(1.0 / (1.0 - opts.dropout_rate));
    for (T& m : c.mask.data()) m = rng.uniform() < opts.dropout_rate ? T(0) : keep_scale;
    for (std::size_t i = 0; i < branch.size(); ++i) branch.data()[i] *= c.mask.data()[i];
  }

  // u = z + branch, then layer norm row by row
  c.xhat = Matrix<T>(n, d);
  c.rstd.assign(n, T(0));
  c.y = Matrix<T>(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto zr = c.z.row(i);
    auto br = branch.row(i);
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += static_cast<double>(zr[j] + br[j]);
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = static_cast<double>(zr[j] + br[j]) - mean;
      var += dev * dev;
    }
    var /= static_cast<double>(d);
    const double rstd = 1.0 / std::sqrt(var + opts.layernorm_eps);
    c.rstd[i] = static_cast<T>(rstd);
    for (std::size_t j = 0; j < d; ++j) {
      const T xh = static_cast<T>((static_cast<double>(zr[j] + br[j]) - mean) * rstd);
      c.xhat(i, j) = xh;
      c.y(i, j) = xh * p.ln_gain.data()[j] + p.ln_bias.data()[j];
    }
  }

  if (opts.normalize_embeddings) {
    c.norms.assign(n, T(0));
    out.h = Matrix<T>(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      double ss = 0.0;
      for (T v : c.y.row(i)) ss += static_cast<double>(v) * static_cast<double>(v);
      // An all-zero output row (zero gain) stays zero instead of dividing by 0.
      const T norm = static_cast<T>(std::sqrt(std::max(ss, 1e-24)));
      c.norms[i] = norm;
      for (std::size_t j = 0; j < d; ++j) out.h(i, j) = c.y(i, j) / norm;
    }
  } else {
    out.h = c.y;
  }
  return out;
}

template <typename T>
BackwardResult<T> backward(const EncoderParams<T>& p, const ForwardCache<T>& c, const Matrix<T>& grad_h,
                           const EncoderOptions& opts) {
  check_shapes(p);
  const std::size_t n = c.y.rows(), d = p.proj_dim();
  require(grad_h.rows() == n && grad_h.cols() == d, "encoder backward: grad_h shape does not match cache");
  require(c.x.cols() == p.input_dim() && c.z.rows() == n, "encoder backward: cache does not match parameters");
  require(!opts.normalize_embeddings || c.norms.size() == n,
          "encoder backward: cache lacks normalization state for normalize_embeddings");

  BackwardResult<T> out{p.zeros_like(), Matrix<T>()};
  auto& g = out.grads;

  // through h = y / |y|
  Matrix<T> dy = grad_h;
  if (opts.normalize_embeddings) {
    for (std::size_t i = 0; i < n; ++i) {
      const T norm = c.norms[i];
      T dot = T(0);
      for (std::size_t j = 0; j < d; ++j) dot += (c.y(i, j) / norm) * grad_h(i, j);
      for (std::size_t j = 0; j < d; ++j) dy(i, j) = (grad_h(i, j) - (c.y(i, j) / norm) * dot) / norm;
    }
  }

  // through layer norm
  Matrix<T> du(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    T mean_dxhat = T(0), mean_dxhat_xhat = T(0);
    for (std::size_t j = 0; j < d; ++j) {
      const T dxh = dy(i, j) * p.ln_gain.data()[j];
      g.ln_gain.data()[j] += dy(i, j) * c.xhat(i, j);
      g.ln_bias.data()[j] += dy(i, j);
      mean_dxhat += dxh;
      mean_dxhat_xhat += dxh * c.xhat(i, j);
    }
    mean_dxhat /= static_cast<T>(d);
    mean_dxhat_xhat /= static_cast<T>(d);
    for (std::size_t j = 0; j < d; ++j) {
      const T dxh = dy(i, j) * p.ln_gain.data()[j];
      du(i, j) = c.rstd[i] * (dxh - mean_dxhat - c.xhat(i, j) * mean_dxhat_xhat);
    }
  }

  // residual branch
  Matrix<T> dt = du;
  if (!c.mask.empty()) {
    for (std::size_t k = 0; k < dt.size(); ++k) dt.data()[k] *= c.mask.data()[k];
  }
  g.w2 = matmul_tn(c.act, dt);
  g.b2 = Matrix<T>(1, d, column_sums(dt));
  Matrix<T> dz = matmul_nt(dt, p.w2);
  for (std::size_t k = 0; k < dz.size(); ++k) {
    const T local = opts.activation == Activation::gelu
                        ? static_cast<T>(gelu_grad(static_cast<double>(c.z.data()[k])))
                        : T(1);
    dz.data()[k] = dz.data()[k] * local + du.data()[k];
  }

  g.w1 = matmul_tn(c.x, dz);
  g.b1 = Matrix<T>(1, d, column_sums(dz));
  out.grad_x = matmul_nt(dz, p.w1);
  return out;
}

#define UBP_INSTANTIATE(T)                                                                                     \
  template struct EncoderParams<T>;                                                                            \
  template EncoderParams<T> init_params<T>(std::size_t, std::size_t, Rng&);                                    \
  template ForwardResult<T> forward(const EncoderParams<T>&, const Matrix<T>&, bool, Rng&, const EncoderOptions&); \
  template BackwardResult<T> backward(const EncoderParams<T>&, const ForwardCache<T>&, const Matrix<T>&,         \
                                      const EncoderOptions&);

UBP_INSTANTIATE(float)
UBP_INSTANTIATE(double)
#undef UBP_INSTANTIATE

}  // namespace ubp
