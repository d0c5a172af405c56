#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ubp/adamw.hpp"
#include "ubp/checkpoint.hpp"
#include "ubp/encoder.hpp"
#include "ubp/epoch.hpp"
#include "ubp/feature_cache.hpp"
#include "ubp/uncertainty.hpp"

namespace ubp {

enum class TrainMode { intra, inter };

struct TrainConfig {
  std::size_t batch_size = 1024;
  std::size_t epochs = 50;
  // Unset means the mode default: 1e-4 intra-subject, 1e-5 inter-subject.
  std::optional<double> lr;
  double weight_decay = 1e-4;
  double r0 = 0.25;
  double c = 10.0;
  double z = 1.96;
  double ema_momentum = 0.9;
  double blur_lambda = 2.0;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::intra;
  bool flip_radius_rule = false;
  bool normalize_embeddings = true;
  std::size_t patience = 10;
  // false trains against the base level only (no uncertainty-driven blur).
  bool uncertainty_blur = true;
  double dropout_rate = 0.3;
  double validation_fraction = 0.05;
  std::size_t warmup_epochs = 1;
  bool average_repetitions = true;

  double effective_lr() const { return lr.value_or(mode == TrainMode::intra ? 1e-4 : 1e-5); }
  EncoderOptions encoder_options() const;

  // Throws ConfigError on invalid values.
  void validate() const;
};

nlohmann::json config_to_json(const TrainConfig& cfg);
// Rejects unknown keys and mistyped values with ConfigError.
TrainConfig config_from_json(const nlohmann::json& j);
// FNV-1a of the canonical (sorted-key) JSON dump.
std::string config_hash(const TrainConfig& cfg);

struct TrainingData {
  MatrixF x;
  std::vector<std::uint32_t> image_ids;
};

TrainingData make_training_data(const EpochTensor& e);

struct TrainState {
  EncoderParams<float> params;
  AdamWState<float> optimizer;
  SimilarityTracker tracker;
  RadiusTable radius;
  std::size_t epoch = 0;
};

TrainState init_train_state(const TrainConfig& cfg, std::size_t input_dim, std::size_t proj_dim, std::size_t n_samples);

// Batches of at most batch_size; a trailing single sample joins the batch before it.
std::vector<std::pair<std::size_t, std::size_t>> batch_bounds(std::size_t n, std::size_t batch_size);

struct EpochLog {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  std::optional<Interval> interval;
  // Radius assignments made this epoch: low, base, high.
  std::array<std::size_t, 3> branch_counts{};
  double temperature = 0.0;
  double val_top1 = 0.0;
  double val_map = 0.0;
  std::size_t samples = 0;
};

// Per-batch trace for ordering checks.
struct BatchTrace {
  std::span<const std::size_t> sample_ids;
  std::span<const RadiusBranch> level_used;
  std::span<const RadiusBranch> level_assigned;
  bool assigned = false;
};
using BatchObserver = std::function<void(const BatchTrace&)>;

// One pass over shuffled batches: look up each sample's embedding at its
// current radius level, encode, contrastive loss, update the tracker and the
// radius table from this batch's diagonal scores, then take an AdamW step.
EpochLog train_epoch(TrainState& state, const TrainingData& data, const FeatureCache& cache, const TrainConfig& cfg,
                     const BatchObserver& observer = {});

struct SubjectData {
  std::string subject;
  EpochTensor train;
};

struct FitInput {
  std::vector<SubjectData> subjects;
  // inter mode: index of the left-out subject.
  std::size_t held_out = 0;
};

struct TrainReport {
  std::vector<EpochLog> epochs;
  std::size_t best_epoch = 0;
  double best_val_top1 = 0.0;
  std::vector<std::string> train_subjects;
  std::string validation_subject;
  std::vector<std::uint32_t> validation_ids;
  std::size_t train_samples = 0;
  std::string config_hash;

  // One JSON object per epoch.
  std::string to_jsonl() const;
};

struct FitResult {
  Checkpoint best;
  TrainReport report;
};

FitResult fit(const TrainConfig& cfg, const FitInput& input, const FeatureCache& cache);

}  // namespace ubp
