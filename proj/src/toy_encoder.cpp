#include "ubp/toy_encoder.hpp"

#include <algorithm>
#include <cmath>

#include "ubp/error.hpp"
#include "ubp/rng.hpp"

namespace ubp {

ToyVisionEncoder::ToyVisionEncoder(std::size_t dim, std::size_t channels, std::uint64_t seed)
    : channels_(channels), projection_(dim, channels * kSide * kSide) {
  require(dim >= 1, "toy encoder: dim must be >= 1");
  require(channels == 1 || channels == 3, "toy encoder: channels must be 1 or 3");
  Rng rng = Rng(seed).derive("toy-vision-projection", dim);
  for (double& v : projection_.data()) v = rng.normal();
}

Image box_resize(const Image& img, std::size_t height, std::size_t width) {
  Image out(height, width, img.channels());
  const double sy = static_cast<double>(img.height()) / static_cast<double>(height);
  const double sx = static_cast<double>(img.width()) / static_cast<double>(width);
  // 1-D overlap weights between output cell [o*s, (o+1)*s) and input pixel [i, i+1).
  auto weights = [](std::size_t out_n, std::size_t in_n, double scale) {
    std::vector<std::vector<std::pair<std::size_t, double>>> w(out_n);
    for (std::size_t o = 0; o < out_n; ++o) {
      const double a = static_cast<double>(o) * scale, b = a + scale;
      for (auto i = static_cast<std::size_t>(std::floor(a)); i < in_n && static_cast<double>(i) < b; ++i) {
        const double overlap = std::min(b, static_cast<double>(i + 1)) - std::max(a, static_cast<double>(i));
        if (overlap > 0.0) w[o].push_back({i, overlap / scale});
      }
    }
    return w;
  };
  const auto wy = weights(height, img.height(), sy);
  const auto wx = weights(width, img.width(), sx);
  for (std::size_t c = 0; c < img.channels(); ++c)
    for (std::size_t y = 0; y < height; ++y)
      for (std::size_t x = 0; x < width; ++x) {
        double acc = 0.0;
        for (auto [iy, fy] : wy[y])
          for (auto [ix, fx] : wx[x]) acc += fy * fx * img.at(c, iy, ix);
        out.at(c, y, x) = std::clamp(acc, 0.0, 1.0);
      }
  return out;
}

std::vector<float> ToyVisionEncoder::encode(const Image& img) const {
  require(img.channels() == channels_, "toy encoder: channel count mismatch");
  const Image small = box_resize(img, kSide, kSide);
  const auto pixels = small.data();
  const double mean = small.mean();
  double spread = 0.0;
  for (double px : pixels) spread = std::max(spread, std::abs(px - mean));
  std::vector<double> v(dim(), 0.0);
  for (std::size_t k = 0; k < dim(); ++k) {
    auto row = projection_.row(k);
    double acc = 0.0;
    for (std::size_t p = 0; p < pixels.size(); ++p) acc += row[p] * (pixels[p] - mean);
    v[k] = acc;
  }
  double ss = 0.0;
  for (double x : v) ss += x * x;
  // A flat image has no signal after mean removal (up to resampling round-off);
  // map it to a fixed unit vector.
  if (spread < 1e-12 || ss == 0.0) {
    v.assign(dim(), 0.0);
    v[0] = 1.0;
    ss = 1.0;
  }
  const double inv = 1.0 / std::sqrt(ss);
  std::vector<float> out(dim());
  for (std::size_t k = 0; k < dim(); ++k) out[k] = static_cast<float>(v[k] * inv);
  return out;
}

std::vector<float> toy_vision_encoder(const Image& img, std::size_t dim, std::uint64_t seed) {
  return ToyVisionEncoder(dim, img.channels(), seed).encode(img);
}

}  // namespace ubp
