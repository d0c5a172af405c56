#include "ubp/feature_cache.hpp"

#include <cmath>

#include "ubp/binary_io.hpp"
#include "ubp/blur.hpp"
#include "ubp/error.hpp"

namespace ubp {

namespace {
constexpr std::uint32_t kCacheVersion = 1;
constexpr double kNormTolerance = 1e-4;
}  // namespace

FeatureCache::FeatureCache(std::size_t dim, std::string backbone_tag)
    : dim_(dim), backbone_tag_(std::move(backbone_tag)) {
  require(dim >= 1, "feature cache: dim must be >= 1");
}

void FeatureCache::add(std::uint32_t image_id, std::array<std::vector<float>, 3> levels) {
  require(!contains(image_id), "feature cache: duplicate image id " + std::to_string(image_id));
  for (const auto& v : levels) {
    require(v.size() == dim_, "feature cache: embedding length mismatch for image " + std::to_string(image_id));
    double ss = 0.0;
    for (float x : v) ss += static_cast<double>(x) * x;
    require(std::abs(std::sqrt(ss) - 1.0) <= kNormTolerance,
            "feature cache: embedding for image " + std::to_string(image_id) + " is not unit norm");
  }
  index_.emplace(image_id, ids_.size());
  ids_.push_back(image_id);
  levels_.push_back(std::move(levels));
}

std::span<const float> FeatureCache::lookup(std::uint32_t image_id, RadiusBranch level) const {
  auto it = index_.find(image_id);
  if (it == index_.end()) throw DataError("feature cache has no entry for image id " + std::to_string(image_id));
  return levels_[it->second][static_cast<std::size_t>(level)];
}

std::vector<std::uint8_t> encode_feature_cache(const FeatureCache& cache) {
  io::ByteWriter w;
  w.magic("UBPF");
  w.u32(kCacheVersion);
  w.u32(static_cast<std::uint32_t>(cache.size()));
  w.u32(static_cast<std::uint32_t>(cache.dim()));
  w.string(cache.backbone_tag());
  for (auto id : cache.image_ids()) {
    w.u32(id);
    for (auto level : {RadiusBranch::low, RadiusBranch::base, RadiusBranch::high}) w.f32_array(cache.lookup(id, level));
  }
  return w.bytes();
}

FeatureCache decode_feature_cache(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "UBPF feature cache");
  r.expect_magic("UBPF");
  const auto version = r.u32();
  if (version != kCacheVersion) throw FormatError("UBPF feature cache: unsupported version " + std::to_string(version));
  const auto n = r.u32();
  const auto dim = r.u32();
  if (dim == 0) throw FormatError("UBPF feature cache: zero dimension");
  FeatureCache cache(dim, r.string());
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto id = r.u32();
    std::array<std::vector<float>, 3> levels;
    for (auto& v : levels) v = r.f32_array(dim);
    try {
      cache.add(id, std::move(levels));
    } catch (const ContractViolation& e) {
      throw FormatError(std::string("UBPF feature cache: ") + e.what());
    }
  }
  r.expect_end();
  return cache;
}

void save_feature_cache(const std::filesystem::path& path, const FeatureCache& cache) {
  io::write_file(path, encode_feature_cache(cache));
}

FeatureCache load_feature_cache(const std::filesystem::path& path) {
  try {
    return decode_feature_cache(io::read_file(path));
  } catch (const FormatError& err) {
    throw FormatError(path.string() + ": " + err.what());
  }
}

void validate_feature_cache(const FeatureCache& cache, std::size_t expected_dim,
                            std::span<const std::uint32_t> required_ids) {
  if (cache.dim() != expected_dim) {
    throw FormatError("feature cache dim " + std::to_string(cache.dim()) + " does not match expected " +
                      std::to_string(expected_dim));
  }
  for (auto id : required_ids) {
    if (!cache.contains(id)) throw DataError("feature cache has no entry for image id " + std::to_string(id));
  }
}

std::array<double, 3> radius_levels(double r0, double c) { return {r0 - c, r0, r0 + c}; }

FeatureCache build_feature_cache(std::span<const LabeledImage> images, const ToyVisionEncoder& encoder,
                                 const std::array<double, 3>& radii, double blur_lambda, BlurMode mode) {
  FeatureCache cache(encoder.dim(), "toy-" + std::to_string(encoder.dim()));
  for (const auto& item : images) {
    std::array<std::vector<float>, 3> levels;
    for (std::size_t l = 0; l < 3; ++l) {
      // Levels that discretize to the same kernel share one encoding.
      if (l > 0 && radius_to_kernel(radii[l]).size() == radius_to_kernel(radii[l - 1]).size()) {
        levels[l] = levels[l - 1];
        continue;
      }
      const Image view = mode == BlurMode::fovea
                             ? fovea_blur(item.image, BlurParams{radii[l], blur_lambda, std::nullopt})
                             : uniform_blur(item.image, radius_to_kernel(radii[l]));
      levels[l] = encoder.encode(view);
    }
    cache.add(item.id, std::move(levels));
  }
  return cache;
}

}  // namespace ubp
