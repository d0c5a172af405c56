#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ubp/epoch.hpp"
#include "ubp/feature_cache.hpp"
#include "ubp/matrix.hpp"
#include "ubp/rng.hpp"

namespace ubp {

// Procedural stand-in for a paired image / brain-recording corpus.
//
// Each image is a multi-scale grating texture. Its brain response is a fixed
// linear map of the vision embedding of a degraded view of the image
// (foveated low-pass with a little high-frequency leak), plus per-trial
// attention drift in embedding space and additive sensor noise.
struct SyntheticSpec {
  std::size_t n_concepts = 60;
  std::size_t images_per_concept = 8;
  std::size_t trials_per_image = 4;
  std::size_t test_trials_per_image = 20;
  double test_fraction = 1.0 / 6.0;

  std::size_t channels = 17;
  std::size_t timepoints = 20;
  std::uint32_t sample_rate_hz = 250;

  std::size_t image_size = 64;
  std::size_t image_channels = 3;
  std::size_t feature_dim = 32;
  std::uint64_t encoder_seed = 7;

  std::uint64_t mix_matrix_seed = 11;
  double noise_sigma = 1.0;
  // Random-GAP strength: per-trial drift in embedding space.
  double attention_drift = 0.3;
  // System-GAP strength is set by system_radius; leak re-admits the sharp image.
  double highfreq_leak = 0.1;
  double system_radius = 11.0;
  double system_lambda = 2.0;

  std::string subject_id = "sub-01";

  // Throws ConfigError with the offending field.
  void validate() const;
};

struct GroundTruth {
  MatrixD mixing;  // (channels * timepoints) x feature_dim
  // Embedding of the degraded view that generated each image's responses.
  std::unordered_map<std::uint32_t, std::vector<float>> system_features;
  std::unordered_map<std::uint32_t, std::uint32_t> concept_of;
  std::vector<std::uint32_t> train_concepts;
  std::vector<std::uint32_t> test_concepts;
};

struct SyntheticDataset {
  EpochTensor train;  // raw trials
  EpochTensor test;   // raw trials
  std::vector<LabeledImage> images;
  GroundTruth truth;

  std::vector<LabeledImage> images_for(const EpochTensor& e) const;
};

Image render_texture(Rng concept_rng, Rng image_rng, std::size_t size, std::size_t channels);

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, Rng rng);

// Fresh trials for existing images, drawn the same way as the generator's.
EpochTensor sample_trials(const SyntheticSpec& spec, const GroundTruth& truth, std::span<const std::uint32_t> ids,
                          std::size_t trials, Rng& rng);

// Least-squares inversion of the mixing map, one embedding per sample row.
MatrixD oracle_decode(const GroundTruth& truth, const EpochTensor& e);

}  // namespace ubp
