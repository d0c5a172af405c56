#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ubp::io {

// IEEE-754 binary16 conversions, round-to-nearest-even on the way down.
std::uint16_t float_to_half(float value);
float half_to_float(std::uint16_t bits);

// Append-only little-endian byte sink.
class ByteWriter {
 public:
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  void f16(float v);
  void magic(std::string_view four_cc);
  // u32 byte length followed by the raw UTF-8 bytes.
  void string(std::string_view s);
  void f32_array(std::span<const float> values);

  const std::vector<std::uint8_t>& bytes() const { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

// Bounds-checked little-endian reader; throws FormatError on truncation.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string context);

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  float f16();
  void expect_magic(std::string_view four_cc);
  std::string string();
  std::vector<float> f32_array(std::size_t n);

  bool at_end() const { return pos_ == bytes_.size(); }
  void expect_end() const;
  const std::string& context() const { return context_; }

 private:
  std::span<const std::uint8_t> take(std::size_t n);

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::string context_;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
// Writes through a temporary sibling and renames it into place.
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace ubp::io
