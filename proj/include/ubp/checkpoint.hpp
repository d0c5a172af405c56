#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ubp/adamw.hpp"
#include "ubp/encoder.hpp"
#include "ubp/uncertainty.hpp"

namespace ubp {

struct TrainingState {
  AdamWState<float> optimizer;
  SimilarityTracker tracker;
  RadiusTable radius;
  std::uint32_t epochs_done = 0;

  friend bool operator==(const TrainingState&, const TrainingState&) = default;
};

struct Checkpoint {
  EncoderParams<float> params;
  std::optional<TrainingState> state;
  std::string config_json;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

// "UBPC": magic, version u32, input_dim u32, proj_dim u32, then w1, b1, w2,
// b2, ln_gain, ln_bias, tau_raw as f32. Followed by a u8 training-state flag;
// when set: AdamW step u64 and per-tensor m, v (f32); tracker mu, var,
// momentum, z (f64), warmup and seen (u64); radius r0, c (f64), count u32 and
// one branch byte per sample (0 low, 1 base, 2 high); epochs done u32.
// Ends with the effective config as a length-prefixed JSON string.
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace ubp
