#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ubp/matrix.hpp"

namespace ubp {

enum class StorageType : std::uint32_t { f16 = 16, f32 = 32 };

// Preprocessed brain recordings: [samples x channels x timepoints], row-major.
struct EpochTensor {
  std::size_t n_samples = 0;
  std::size_t n_channels = 0;
  std::size_t n_timepoints = 0;
  std::vector<float> data;
  std::uint32_t sample_rate_hz = 250;
  std::vector<std::uint32_t> image_ids;
  std::string subject_id;
  // On-disk precision; data is always held as f32 in memory.
  StorageType storage = StorageType::f32;

  std::size_t sample_size() const { return n_channels * n_timepoints; }
  float& at(std::size_t s, std::size_t c, std::size_t t) {
    return data[(s * n_channels + c) * n_timepoints + t];
  }
  float at(std::size_t s, std::size_t c, std::size_t t) const {
    return data[(s * n_channels + c) * n_timepoints + t];
  }
  std::span<const float> sample(std::size_t s) const { return {data.data() + s * sample_size(), sample_size()}; }

  // Throws ContractViolation if sizes disagree.
  void validate() const;

  friend bool operator==(const EpochTensor&, const EpochTensor&) = default;
};

// One flattened sample per row (channels x timepoints, row-major).
MatrixF to_matrix(const EpochTensor& e);

// "UBPE": magic, version u32, n_samples u32, n_channels u32, n_timepoints u32,
// sample_rate_hz u32, dtype u32 (16|32), subject string, image ids u32[n], data.
std::vector<std::uint8_t> encode_epochs(const EpochTensor& e);
EpochTensor decode_epochs(std::span<const std::uint8_t> bytes);
void save_epochs(const std::filesystem::path& path, const EpochTensor& e);
EpochTensor load_epochs(const std::filesystem::path& path);

// 63-channel 10-10 montage of the default EEG recordings, in file order.
std::span<const std::string_view> eeg63_montage();
// Occipital and parietal channels used by default.
std::span<const std::string_view> visual_channels17();

// Maps channel names to indices in `montage`; throws ContractViolation on an unknown name.
std::vector<std::size_t> resolve_channels(std::span<const std::string> names, std::span<const std::string_view> montage);

// Channel subset, in the requested order.
EpochTensor select_channels(const EpochTensor& e, std::span<const std::size_t> channels);

struct WindowMs {
  double start = 0.0;
  double end = 1000.0;
};

// Window is relative to stimulus onset, which sits `onset_ms` after the first
// recorded sample. Keeps every factor-th sample after cropping. With
// `anti_alias`, each kept sample is the mean of its factor-long block instead.
EpochTensor crop_and_downsample(const EpochTensor& e, WindowMs window, std::size_t factor, double onset_ms = 0.0,
                                bool anti_alias = false);

// Subtracts each trial/channel's mean over [onset - baseline_ms, onset).
// Returns false (data untouched) when the recording has no pre-stimulus samples.
bool baseline_correct(EpochTensor& e, double onset_ms, double baseline_ms = 200.0);

// One sample per distinct image id (first-appearance order), averaged over trials.
EpochTensor average_repetitions(const EpochTensor& e);

// Mean over image ids of the mean (over channel x timepoint) across-trial
// standard deviation. Requires at least two trials per id.
double subject_variability(const EpochTensor& e);

// Concatenates samples from tensors of identical shape; subject becomes `subject_id`.
EpochTensor concat_epochs(std::span<const EpochTensor> parts, std::string subject_id);

// Samples whose image id satisfies `keep`.
template <typename Pred>
EpochTensor filter_samples(const EpochTensor& e, Pred keep) {
  EpochTensor out = e;
  out.data.clear();
  out.image_ids.clear();
  out.n_samples = 0;
  for (std::size_t s = 0; s < e.n_samples; ++s) {
    if (!keep(e.image_ids[s])) continue;
    auto src = e.sample(s);
    out.data.insert(out.data.end(), src.begin(), src.end());
    out.image_ids.push_back(e.image_ids[s]);
    ++out.n_samples;
  }
  return out;
}

}  // namespace ubp
