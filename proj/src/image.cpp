#include "ubp/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "ubp/binary_io.hpp"
#include "ubp/error.hpp"

namespace ubp {

Image::Image(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels), data_(height * width * channels, fill) {
  require(height >= 1 && width >= 1, "image must be at least 1x1");
  require(channels == 1 || channels == 3, "image must have 1 or 3 channels");
}

Image::Image(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  require(height >= 1 && width >= 1, "image must be at least 1x1");
  require(channels == 1 || channels == 3, "image must have 1 or 3 channels");
  require(data_.size() == height * width * channels, "image data length mismatch");
  for (double v : data_) require(v >= 0.0 && v <= 1.0, "image values must lie in [0,1]");
}

double Image::mean() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

std::vector<std::uint8_t> encode_raster(const Image& img) {
  io::ByteWriter w;
  w.magic("UBPI");
  w.u32(static_cast<std::uint32_t>(img.height()));
  w.u32(static_cast<std::uint32_t>(img.width()));
  w.u8(static_cast<std::uint8_t>(img.channels()));
  for (double v : img.data()) w.f32(static_cast<float>(v));
  return w.bytes();
}

Image decode_raster(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "UBPI raster");
  r.expect_magic("UBPI");
  const std::uint32_t h = r.u32();
  const std::uint32_t w = r.u32();
  const std::uint8_t c = r.u8();
  if (h == 0 || w == 0 || (c != 1 && c != 3)) throw FormatError("UBPI raster: bad header");
  auto raw = r.f32_array(std::size_t{h} * w * c);
  r.expect_end();
  std::vector<double> data(raw.begin(), raw.end());
  for (double v : data) {
    if (!(v >= 0.0 && v <= 1.0)) throw FormatError("UBPI raster: value outside [0,1]");
  }
  return Image(h, w, c, std::move(data));
}

void save_raster(const std::filesystem::path& path, const Image& img) { io::write_file(path, encode_raster(img)); }

Image load_raster(const std::filesystem::path& path) { return decode_raster(io::read_file(path)); }

void save_pnm(const std::filesystem::path& path, const Image& img) {
  std::ostringstream out;
  out << (img.channels() == 1 ? "P5" : "P6") << "\n" << img.width() << " " << img.height() << "\n255\n";
  std::string pixels;
  pixels.reserve(img.plane_size() * img.channels());
  for (std::size_t y = 0; y < img.height(); ++y)
    for (std::size_t x = 0; x < img.width(); ++x)
      for (std::size_t c = 0; c < img.channels(); ++c)
        pixels.push_back(static_cast<char>(std::lround(std::clamp(img.at(c, y, x), 0.0, 1.0) * 255.0)));
  io::write_text(path, out.str() + pixels);
}

Image load_pnm(const std::filesystem::path& path) {
  const auto bytes = io::read_file(path);
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  const std::string magic = token();
  if (magic != "P5" && magic != "P6") throw FormatError(path.string() + ": not a binary PGM/PPM");
  const std::size_t channels = magic == "P5" ? 1 : 3;
  std::size_t w = 0, h = 0, maxval = 0;
  try {
    w = std::stoul(token());
    h = std::stoul(token());
    maxval = std::stoul(token());
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": bad PNM header");
  }
  if (maxval == 0 || maxval > 255) throw FormatError(path.string() + ": only 8-bit PNM supported");
  ++pos;  // single whitespace after maxval
  if (bytes.size() - pos < w * h * channels) throw FormatError(path.string() + ": truncated PNM data");
  Image img(h, w, channels);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < channels; ++c)
        img.at(c, y, x) = static_cast<double>(bytes[pos++]) / static_cast<double>(maxval);
  return img;
}

}  // namespace ubp
