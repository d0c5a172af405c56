#include "ubp/epoch.hpp"

#include <array>
#include <cmath>
#include <map>
#include <unordered_map>

#include "ubp/binary_io.hpp"
#include "ubp/error.hpp"

namespace ubp {

namespace {
constexpr std::uint32_t kEpochVersion = 1;

constexpr std::array<std::string_view, 63> kMontage63 = {
    "Fp1", "Fp2", "AF7", "AF3", "AFz", "AF4", "AF8", "F7",  "F5",  "F3",  "F1",  "F2",  "F4",
    "F6",  "F8",  "FT9", "FT7", "FC5", "FC3", "FC1", "FCz", "FC2", "FC4", "FC6", "FT8", "FT10",
    "T7",  "C5",  "C3",  "C1",  "Cz",  "C2",  "C4",  "C6",  "T8",  "TP9", "TP7", "CP5", "CP3",
    "CP1", "CPz", "CP2", "CP4", "CP6", "TP8", "TP10", "P7", "P5",  "P3",  "P1",  "Pz",  "P2",
    "P4",  "P6",  "P8",  "PO7", "PO3", "POz", "PO4", "PO8", "O1",  "Oz",  "O2"};

constexpr std::array<std::string_view, 17> kVisual17 = {"P7",  "P5",  "P3",  "P1",  "Pz",  "P2",
                                                        "P4",  "P6",  "P8",  "PO7", "PO3", "POz",
                                                        "PO4", "PO8", "O1",  "Oz",  "O2"};

std::size_t ms_to_index(double ms, std::uint32_t rate, const char* what) {
  const double idx = ms * static_cast<double>(rate) / 1000.0;
  const double rounded = std::round(idx);
  require(std::abs(idx - rounded) < 1e-6, std::string("crop window ") + what + " is not on the sample grid");
  require(rounded >= 0.0, std::string("crop window ") + what + " precedes the recording");
  return static_cast<std::size_t>(rounded);
}
}  // namespace

void EpochTensor::validate() const {
  require(data.size() == n_samples * n_channels * n_timepoints, "epoch tensor: data length mismatch");
  require(image_ids.size() == n_samples, "epoch tensor: image id count mismatch");
}

MatrixF to_matrix(const EpochTensor& e) {
  e.validate();
  return MatrixF(e.n_samples, e.sample_size(), e.data);
}

std::vector<std::uint8_t> encode_epochs(const EpochTensor& e) {
  e.validate();
  io::ByteWriter w;
  w.magic("UBPE");
  w.u32(kEpochVersion);
  w.u32(static_cast<std::uint32_t>(e.n_samples));
  w.u32(static_cast<std::uint32_t>(e.n_channels));
  w.u32(static_cast<std::uint32_t>(e.n_timepoints));
  w.u32(e.sample_rate_hz);
  w.u32(static_cast<std::uint32_t>(e.storage));
  w.string(e.subject_id);
  for (auto id : e.image_ids) w.u32(id);
  if (e.storage == StorageType::f16) {
    for (float v : e.data) w.f16(v);
  } else {
    w.f32_array(e.data);
  }
  return w.bytes();
}

EpochTensor decode_epochs(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "UBPE epochs");
  r.expect_magic("UBPE");
  const auto version = r.u32();
  if (version != kEpochVersion) throw FormatError("UBPE epochs: unsupported version " + std::to_string(version));
  EpochTensor e;
  e.n_samples = r.u32();
  e.n_channels = r.u32();
  e.n_timepoints = r.u32();
  e.sample_rate_hz = r.u32();
  const auto dtype = r.u32();
  if (dtype != 16 && dtype != 32) throw FormatError("UBPE epochs: unknown dtype tag " + std::to_string(dtype));
  e.storage = static_cast<StorageType>(dtype);
  e.subject_id = r.string();
  e.image_ids.resize(e.n_samples);
  for (auto& id : e.image_ids) id = r.u32();
  const std::size_t n = e.n_samples * e.n_channels * e.n_timepoints;
  if (e.storage == StorageType::f16) {
    e.data.resize(n);
    for (auto& v : e.data) v = r.f16();
  } else {
    e.data = r.f32_array(n);
  }
  r.expect_end();
  return e;
}

void save_epochs(const std::filesystem::path& path, const EpochTensor& e) { io::write_file(path, encode_epochs(e)); }

EpochTensor load_epochs(const std::filesystem::path& path) {
  try {
    return decode_epochs(io::read_file(path));
  } catch (const FormatError& err) {
    throw FormatError(path.string() + ": " + err.what());
  }
}

std::span<const std::string_view> eeg63_montage() { return kMontage63; }
std::span<const std::string_view> visual_channels17() { return kVisual17; }

std::vector<std::size_t> resolve_channels(std::span<const std::string> names,
                                          std::span<const std::string_view> montage) {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& name : names) {
    std::size_t idx = montage.size();
    for (std::size_t i = 0; i < montage.size(); ++i) {
      if (montage[i] == name) {
        idx = i;
        break;
      }
    }
    require(idx < montage.size(), "unknown channel \"" + name + "\"");
    out.push_back(idx);
  }
  return out;
}

EpochTensor select_channels(const EpochTensor& e, std::span<const std::size_t> channels) {
  e.validate();
  for (auto c : channels) require(c < e.n_channels, "select_channels: channel " + std::to_string(c) + " out of range");
  EpochTensor out = e;
  out.n_channels = channels.size();
  out.data.assign(e.n_samples * out.n_channels * e.n_timepoints, 0.0f);
  for (std::size_t s = 0; s < e.n_samples; ++s)
    for (std::size_t k = 0; k < channels.size(); ++k)
      for (std::size_t t = 0; t < e.n_timepoints; ++t) out.at(s, k, t) = e.at(s, channels[k], t);
  return out;
}

EpochTensor crop_and_downsample(const EpochTensor& e, WindowMs window, std::size_t factor, double onset_ms,
                                bool anti_alias) {
  e.validate();
  require(factor >= 1, "crop_and_downsample: factor must be >= 1");
  require(window.end > window.start, "crop_and_downsample: empty window");
  const std::size_t first = ms_to_index(window.start + onset_ms, e.sample_rate_hz, "start");
  const std::size_t last = ms_to_index(window.end + onset_ms, e.sample_rate_hz, "end");
  require(last <= e.n_timepoints, "crop_and_downsample: window extends past the recording");
  const std::size_t span = last - first;
  require(span % factor == 0, "crop_and_downsample: factor does not divide the window length");
  require(e.sample_rate_hz % factor == 0, "crop_and_downsample: factor does not divide the sample rate");

  EpochTensor out = e;
  out.n_timepoints = span / factor;
  out.sample_rate_hz = e.sample_rate_hz / static_cast<std::uint32_t>(factor);
  out.data.assign(e.n_samples * e.n_channels * out.n_timepoints, 0.0f);
  for (std::size_t s = 0; s < e.n_samples; ++s)
    for (std::size_t c = 0; c < e.n_channels; ++c)
      for (std::size_t t = 0; t < out.n_timepoints; ++t) {
        const std::size_t src = first + t * factor;
        if (anti_alias) {
          double acc = 0.0;
          for (std::size_t k = 0; k < factor; ++k) acc += e.at(s, c, src + k);
          out.at(s, c, t) = static_cast<float>(acc / static_cast<double>(factor));
        } else {
          out.at(s, c, t) = e.at(s, c, src);
        }
      }
  return out;
}

bool baseline_correct(EpochTensor& e, double onset_ms, double baseline_ms) {
  e.validate();
  const auto onset = static_cast<std::size_t>(std::llround(std::max(onset_ms, 0.0) * e.sample_rate_hz / 1000.0));
  if (onset == 0) return false;
  const auto len = static_cast<std::size_t>(std::llround(baseline_ms * e.sample_rate_hz / 1000.0));
  const std::size_t begin = onset > len ? onset - len : 0;
  for (std::size_t s = 0; s < e.n_samples; ++s)
    for (std::size_t c = 0; c < e.n_channels; ++c) {
      double mean = 0.0;
      for (std::size_t t = begin; t < onset; ++t) mean += e.at(s, c, t);
      mean /= static_cast<double>(onset - begin);
      for (std::size_t t = 0; t < e.n_timepoints; ++t) e.at(s, c, t) = static_cast<float>(e.at(s, c, t) - mean);
    }
  return true;
}

namespace {
// Sample indices per image id, ids in first-appearance order.
std::vector<std::pair<std::uint32_t, std::vector<std::size_t>>> group_by_id(const EpochTensor& e) {
  std::vector<std::pair<std::uint32_t, std::vector<std::size_t>>> groups;
  std::unordered_map<std::uint32_t, std::size_t> slot;
  for (std::size_t s = 0; s < e.n_samples; ++s) {
    auto [it, inserted] = slot.try_emplace(e.image_ids[s], groups.size());
    if (inserted) groups.push_back({e.image_ids[s], {}});
    groups[it->second].second.push_back(s);
  }
  return groups;
}
}  // namespace

EpochTensor average_repetitions(const EpochTensor& e) {
  e.validate();
  const auto groups = group_by_id(e);
  EpochTensor out = e;
  out.n_samples = groups.size();
  out.image_ids.clear();
  out.data.assign(out.n_samples * e.sample_size(), 0.0f);
  std::vector<double> acc(e.sample_size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& [id, members] = groups[g];
    out.image_ids.push_back(id);
    std::fill(acc.begin(), acc.end(), 0.0);
    for (auto s : members) {
      auto src = e.sample(s);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += src[k];
    }
    for (std::size_t k = 0; k < acc.size(); ++k)
      out.data[g * e.sample_size() + k] = static_cast<float>(acc[k] / static_cast<double>(members.size()));
  }
  return out;
}

double subject_variability(const EpochTensor& e) {
  e.validate();
  const auto groups = group_by_id(e);
  require(!groups.empty(), "subject_variability: no samples");
  double total = 0.0;
  for (const auto& [id, members] : groups) {
    require(members.size() >= 2, "subject_variability: image id " + std::to_string(id) +
                                     " has fewer than two trials");
    const double k = static_cast<double>(members.size());
    double std_sum = 0.0;
    for (std::size_t p = 0; p < e.sample_size(); ++p) {
      double mean = 0.0;
      for (auto s : members) mean += e.data[s * e.sample_size() + p];
      mean /= k;
      double ss = 0.0;
      for (auto s : members) {
        const double dev = e.data[s * e.sample_size() + p] - mean;
        ss += dev * dev;
      }
      std_sum += std::sqrt(ss / (k - 1.0));
    }
    total += std_sum / static_cast<double>(e.sample_size());
  }
  return total / static_cast<double>(groups.size());
}

EpochTensor concat_epochs(std::span<const EpochTensor> parts, std::string subject_id) {
  require(!parts.empty(), "concat_epochs: nothing to concatenate");
  EpochTensor out = parts.front();
  out.subject_id = std::move(subject_id);
  out.data.clear();
  out.image_ids.clear();
  out.n_samples = 0;
  for (const auto& p : parts) {
    p.validate();
    require(p.n_channels == out.n_channels && p.n_timepoints == out.n_timepoints &&
                p.sample_rate_hz == out.sample_rate_hz,
            "concat_epochs: shapes differ");
    out.data.insert(out.data.end(), p.data.begin(), p.data.end());
    out.image_ids.insert(out.image_ids.end(), p.image_ids.begin(), p.image_ids.end());
    out.n_samples += p.n_samples;
  }
  return out;
}

}  // namespace ubp
