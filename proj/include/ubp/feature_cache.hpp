#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ubp/image.hpp"
#include "ubp/toy_encoder.hpp"
#include "ubp/uncertainty.hpp"

namespace ubp {

// Frozen vision embeddings per image at the three blur levels (low, base,
// high), indexed by RadiusBranch.
class FeatureCache {
 public:
  FeatureCache() = default;
  FeatureCache(std::size_t dim, std::string backbone_tag);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::string& backbone_tag() const { return backbone_tag_; }
  std::span<const std::uint32_t> image_ids() const { return ids_; }

  // Each embedding must have length dim() and unit norm within 1e-4.
  void add(std::uint32_t image_id, std::array<std::vector<float>, 3> levels);

  bool contains(std::uint32_t image_id) const { return index_.contains(image_id); }
  // Throws DataError naming the id when absent.
  std::span<const float> lookup(std::uint32_t image_id, RadiusBranch level) const;

  friend bool operator==(const FeatureCache& a, const FeatureCache& b) {
    return a.dim_ == b.dim_ && a.backbone_tag_ == b.backbone_tag_ && a.ids_ == b.ids_ && a.levels_ == b.levels_;
  }

 private:
  std::size_t dim_ = 0;
  std::string backbone_tag_;
  std::vector<std::uint32_t> ids_;
  std::vector<std::array<std::vector<float>, 3>> levels_;
  std::unordered_map<std::uint32_t, std::size_t> index_;
};

// "UBPF": magic, version u32, n_images u32, dim u32, backbone tag string, then
// per image: id u32 and three dim-length f32 vectors (low, base, high).
std::vector<std::uint8_t> encode_feature_cache(const FeatureCache& cache);
FeatureCache decode_feature_cache(std::span<const std::uint8_t> bytes);
void save_feature_cache(const std::filesystem::path& path, const FeatureCache& cache);
FeatureCache load_feature_cache(const std::filesystem::path& path);

// Throws FormatError on a dimension mismatch and DataError on a missing id.
void validate_feature_cache(const FeatureCache& cache, std::size_t expected_dim,
                            std::span<const std::uint32_t> required_ids);

enum class BlurMode { fovea, uniform };

struct LabeledImage {
  std::uint32_t id = 0;
  Image image;
};

// Radii (r0 - c, r0, r0 + c).
std::array<double, 3> radius_levels(double r0, double c);

FeatureCache build_feature_cache(std::span<const LabeledImage> images, const ToyVisionEncoder& encoder,
                                 const std::array<double, 3>& radii, double blur_lambda,
                                 BlurMode mode = BlurMode::fovea);

}  // namespace ubp
