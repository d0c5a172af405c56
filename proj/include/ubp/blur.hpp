#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ubp/image.hpp"
#include "ubp/matrix.hpp"

namespace ubp {

// Separable Gaussian kernel. half_width == 0 is the identity (weights == {1}).
struct Kernel {
  std::size_t half_width = 0;
  double sigma = 0.0;
  std::vector<double> weights{1.0};

  std::size_t size() const { return 2 * half_width + 1; }
  bool is_identity() const { return half_width == 0; }

  static Kernel identity() { return {}; }
};

struct PixelCoord {
  double row = 0.0;
  double col = 0.0;
};

struct BlurParams {
  double radius = 0.0;
  // Fovea decay rate.
  double lambda = 2.0;
  // Defaults to the image center.
  std::optional<PixelCoord> center;
};

// r < 1 maps to the identity; otherwise k = round((r-1)/2) clamped to >= 1,
// K = 2k+1 and sigma = K/6.
Kernel radius_to_kernel(double radius);

// Samples exp(-i²/2σ²) for i in [-k, k] and rescales to unit sum.
Kernel gaussian_kernel_1d(std::size_t half_width, double sigma);

// Reflect-101 border index (…2 1 | 0 1 2 … n-1 | n-2 …), valid for any offset.
std::ptrdiff_t reflect101(std::ptrdiff_t i, std::ptrdiff_t n);

// Separable horizontal-then-vertical convolution, reflect-101 borders.
Image uniform_blur(const Image& img, const Kernel& kernel);

// exp(-lambda * d / L) where L is the distance from center to the farthest corner.
MatrixD fovea_alpha_map(std::size_t height, std::size_t width, double lambda, std::optional<PixelCoord> center = {});

// alpha ⊙ original + (1 - alpha) ⊙ blurred, with one alpha map shared by all channels.
Image blend(const Image& original, const Image& blurred, const MatrixD& alpha);

Image fovea_blur(const Image& img, const BlurParams& params);

namespace reference {
// Serial separable blur; same arithmetic order as the parallel kernel.
Image uniform_blur(const Image& img, const Kernel& kernel);
}  // namespace reference

}  // namespace ubp
