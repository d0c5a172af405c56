#pragma once

#include <cstdint>
#include <vector>

#include "ubp/image.hpp"
#include "ubp/matrix.hpp"

namespace ubp {

// Stand-in for a frozen pretrained vision backbone: box-resize to 32x32,
// remove the mean, apply a fixed seeded Gaussian projection, L2-normalize.
class ToyVisionEncoder {
 public:
  static constexpr std::size_t kSide = 32;

  ToyVisionEncoder(std::size_t dim, std::size_t channels, std::uint64_t seed);

  std::size_t dim() const { return projection_.rows(); }
  std::size_t channels() const { return channels_; }

  std::vector<float> encode(const Image& img) const;

 private:
  std::size_t channels_;
  MatrixD projection_;  // dim x (channels * 32 * 32)
};

// Area-weighted box resampling.
Image box_resize(const Image& img, std::size_t height, std::size_t width);

std::vector<float> toy_vision_encoder(const Image& img, std::size_t dim, std::uint64_t seed);

}  // namespace ubp
