#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ubp {

// Planar image, values in [0, 1]. Channel-major: plane c, row y, column x.
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);
  // Validates shape and range.
  Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::size_t plane_size() const { return height_ * width_; }

  double& at(std::size_t c, std::size_t y, std::size_t x) { return data_[(c * height_ + y) * width_ + x]; }
  double at(std::size_t c, std::size_t y, std::size_t x) const { return data_[(c * height_ + y) * width_ + x]; }

  std::span<double> plane(std::size_t c) { return {data_.data() + c * plane_size(), plane_size()}; }
  std::span<const double> plane(std::size_t c) const { return {data_.data() + c * plane_size(), plane_size()}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double mean() const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

// "UBPI" raster: magic, h u32, w u32, channels u8, f32 planar data.
std::vector<std::uint8_t> encode_raster(const Image& img);
Image decode_raster(std::span<const std::uint8_t> bytes);
void save_raster(const std::filesystem::path& path, const Image& img);
Image load_raster(const std::filesystem::path& path);

// Binary 8-bit PGM (P5) for one channel, PPM (P6) for three.
void save_pnm(const std::filesystem::path& path, const Image& img);
Image load_pnm(const std::filesystem::path& path);

}  // namespace ubp
