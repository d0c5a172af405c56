#include "ubp/blur.hpp"

#include <algorithm>
#include <cmath>

#include "ubp/error.hpp"

namespace ubp {

Kernel radius_to_kernel(double radius) {
  require(std::isfinite(radius), "radius_to_kernel: radius must be finite");
  if (radius < 1.0) return Kernel::identity();
  const auto k = std::max<long>(1, std::lround((radius - 1.0) / 2.0));
  const auto half = static_cast<std::size_t>(k);
  return gaussian_kernel_1d(half, static_cast<double>(2 * half + 1) / 6.0);
}

Kernel gaussian_kernel_1d(std::size_t half_width, double sigma) {
  require(half_width >= 1, "gaussian_kernel_1d: half width must be >= 1");
  require(sigma > 0.0 && std::isfinite(sigma), "gaussian_kernel_1d: sigma must be positive");
  Kernel out;
  out.half_width = half_width;
  out.sigma = sigma;
  out.weights.assign(2 * half_width + 1, 0.0);
  const auto k = static_cast<std::ptrdiff_t>(half_width);
  double sum = 0.0;
  for (std::ptrdiff_t i = -k; i <= k; ++i) {
    const double w = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    out.weights[static_cast<std::size_t>(i + k)] = w;
    sum += w;
  }
  for (double& w : out.weights) w /= sum;
  // Symmetrize explicitly so w[i] == w[2k-i] holds bit-exactly.
  for (std::size_t i = 0; i < half_width; ++i) out.weights[2 * half_width - i] = out.weights[i];
  return out;
}

std::ptrdiff_t reflect101(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

namespace {

void blur_row_horizontal(const Image& src, Image& dst, const Kernel& kernel, std::size_t c, std::size_t y) {
  const auto w = static_cast<std::ptrdiff_t>(src.width());
  const auto k = static_cast<std::ptrdiff_t>(kernel.half_width);
  for (std::ptrdiff_t x = 0; x < w; ++x) {
    double acc = 0.0;
    for (std::ptrdiff_t m = -k; m <= k; ++m) {
      acc += kernel.weights[static_cast<std::size_t>(m + k)] *
             src.at(c, y, static_cast<std::size_t>(reflect101(x - m, w)));
    }
    dst.at(c, y, static_cast<std::size_t>(x)) = acc;
  }
}

void blur_row_vertical(const Image& src, Image& dst, const Kernel& kernel, std::size_t c, std::size_t y) {
  const auto h = static_cast<std::ptrdiff_t>(src.height());
  const auto k = static_cast<std::ptrdiff_t>(kernel.half_width);
  const auto yy = static_cast<std::ptrdiff_t>(y);
  for (std::size_t x = 0; x < src.width(); ++x) {
    double acc = 0.0;
    for (std::ptrdiff_t m = -k; m <= k; ++m) {
      acc += kernel.weights[static_cast<std::size_t>(m + k)] *
             src.at(c, static_cast<std::size_t>(reflect101(yy - m, h)), x);
    }
    dst.at(c, y, x) = std::clamp(acc, 0.0, 1.0);
  }
}

}  // namespace

Image uniform_blur(const Image& img, const Kernel& kernel) {
  if (kernel.is_identity()) return img;
  Image tmp(img.height(), img.width(), img.channels());
  Image out(img.height(), img.width(), img.channels());
  const auto rows = static_cast<std::ptrdiff_t>(img.channels() * img.height());
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
      const auto u = static_cast<std::size_t>(i);
      blur_row_horizontal(img, tmp, kernel, u / img.height(), u % img.height());
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
      const auto u = static_cast<std::size_t>(i);
      blur_row_vertical(tmp, out, kernel, u / img.height(), u % img.height());
    }
  }
  return out;
}

namespace reference {

Image uniform_blur(const Image& img, const Kernel& kernel) {
  if (kernel.is_identity()) return img;
  Image tmp(img.height(), img.width(), img.channels());
  Image out(img.height(), img.width(), img.channels());
  for (std::size_t c = 0; c < img.channels(); ++c)
    for (std::size_t y = 0; y < img.height(); ++y) blur_row_horizontal(img, tmp, kernel, c, y);
  for (std::size_t c = 0; c < img.channels(); ++c)
    for (std::size_t y = 0; y < img.height(); ++y) blur_row_vertical(tmp, out, kernel, c, y);
  return out;
}

}  // namespace reference

MatrixD fovea_alpha_map(std::size_t height, std::size_t width, double lambda, std::optional<PixelCoord> center) {
  require(lambda >= 0.0, "fovea_alpha_map: lambda must be non-negative");
  const PixelCoord ctr = center.value_or(
      PixelCoord{(static_cast<double>(height) - 1.0) / 2.0, (static_cast<double>(width) - 1.0) / 2.0});
  require(ctr.row >= 0.0 && ctr.row <= static_cast<double>(height) - 1.0 && ctr.col >= 0.0 &&
              ctr.col <= static_cast<double>(width) - 1.0,
          "fovea_alpha_map: center outside image");
  const double far_row = std::max(ctr.row, static_cast<double>(height) - 1.0 - ctr.row);
  const double far_col = std::max(ctr.col, static_cast<double>(width) - 1.0 - ctr.col);
  const double max_dist = std::hypot(far_row, far_col);

  MatrixD alpha(height, width, 1.0);
  if (max_dist == 0.0 || lambda == 0.0) return alpha;
  for (std::size_t i = 0; i < height; ++i)
    for (std::size_t j = 0; j < width; ++j) {
      const double d = std::hypot(static_cast<double>(i) - ctr.row, static_cast<double>(j) - ctr.col);
      alpha(i, j) = std::exp(-lambda * d / max_dist);
    }
  return alpha;
}

Image blend(const Image& original, const Image& blurred, const MatrixD& alpha) {
  require(original.height() == blurred.height() && original.width() == blurred.width() &&
              original.channels() == blurred.channels(),
          "blend: image shapes differ");
  require(alpha.rows() == original.height() && alpha.cols() == original.width(), "blend: alpha shape mismatch");
  Image out(original.height(), original.width(), original.channels());
  const auto plane = original.plane_size();
  for (std::size_t c = 0; c < original.channels(); ++c) {
    auto o = original.plane(c);
    auto b = blurred.plane(c);
    auto dst = out.plane(c);
    for (std::size_t p = 0; p < plane; ++p) {
      const double a = alpha.data()[p];
      dst[p] = std::clamp(a * o[p] + (1.0 - a) * b[p], 0.0, 1.0);
    }
  }
  return out;
}

Image fovea_blur(const Image& img, const BlurParams& params) {
  const Kernel kernel = radius_to_kernel(params.radius);
  if (kernel.is_identity() || params.lambda == 0.0) return img;
  const Image blurred = uniform_blur(img, kernel);
  return blend(img, blurred, fovea_alpha_map(img.height(), img.width(), params.lambda, params.center));
}

}  // namespace ubp
