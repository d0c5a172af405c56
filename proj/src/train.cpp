#include "ubp/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "ubp/error.hpp"
#include "ubp/eval.hpp"
#include "ubp/hash.hpp"
#include "ubp/loss.hpp"

namespace ubp {

EncoderOptions TrainConfig::encoder_options() const {
  EncoderOptions o;
  o.dropout_rate = dropout_rate;
  o.normalize_embeddings = normalize_embeddings;
  return o;
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("train config: " + what); };
  if (batch_size < 2) fail("batch_size must be >= 2");
  if (epochs < 1) fail("epochs must be >= 1");
  if (lr && !(*lr > 0.0)) fail("lr must be positive");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be >= 0");
  if (!(c >= 0.0)) fail("c must be >= 0");
  if (!std::isfinite(r0)) fail("r0 must be finite");
  if (!(z >= 0.0)) fail("z must be >= 0");
  if (!(ema_momentum >= 0.0 && ema_momentum < 1.0)) fail("ema_momentum must be in [0,1)");
  if (!(blur_lambda >= 0.0)) fail("blur_lambda must be >= 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate must be in [0,1)");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) fail("validation_fraction must be in [0,1)");
}

nlohmann::json config_to_json(const TrainConfig& cfg) {
  nlohmann::json j;
  j["batch_size"] = cfg.batch_size;
  j["epochs"] = cfg.epochs;
  j["lr"] = cfg.lr ? nlohmann::json(*cfg.lr) : nlohmann::json(nullptr);
  j["weight_decay"] = cfg.weight_decay;
  j["r0"] = cfg.r0;
  j["c"] = cfg.c;
  j["z"] = cfg.z;
  j["ema_momentum"] = cfg.ema_momentum;
  j["blur_lambda"] = cfg.blur_lambda;
  j["seed"] = cfg.seed;
  j["mode"] = cfg.mode == TrainMode::intra ? "intra" : "inter";
  j["flip_radius_rule"] = cfg.flip_radius_rule;
  j["normalize_embeddings"] = cfg.normalize_embeddings;
  j["patience"] = cfg.patience;
  j["uncertainty_blur"] = cfg.uncertainty_blur;
  j["dropout_rate"] = cfg.dropout_rate;
  j["validation_fraction"] = cfg.validation_fraction;
  j["warmup_epochs"] = cfg.warmup_epochs;
  j["average_repetitions"] = cfg.average_repetitions;
  return j;
}

TrainConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  TrainConfig cfg;
  const nlohmann::json known = config_to_json(cfg);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("train config: unknown key \"" + key + "\"");
    try {
      if (key == "batch_size") cfg.batch_size = value.get<std::size_t>();
      else if (key == "epochs") cfg.epochs = value.get<std::size_t>();
      else if (key == "lr") cfg.lr = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
      else if (key == "weight_decay") cfg.weight_decay = value.get<double>();
      else if (key == "r0") cfg.r0 = value.get<double>();
      else if (key == "c") cfg.c = value.get<double>();
      else if (key == "z") cfg.z = value.get<double>();
      else if (key == "ema_momentum") cfg.ema_momentum = value.get<double>();
      else if (key == "blur_lambda") cfg.blur_lambda = value.get<double>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "mode") {
        const auto m = value.get<std::string>();
        if (m != "intra" && m != "inter") throw ConfigError("train config: mode must be \"intra\" or \"inter\"");
        cfg.mode = m == "intra" ? TrainMode::intra : TrainMode::inter;
      }
      else if (key == "flip_radius_rule") cfg.flip_radius_rule = value.get<bool>();
      else if (key == "normalize_embeddings") cfg.normalize_embeddings = value.get<bool>();
      else if (key == "patience") cfg.patience = value.get<std::size_t>();
      else if (key == "uncertainty_blur") cfg.uncertainty_blur = value.get<bool>();
      else if (key == "dropout_rate") cfg.dropout_rate = value.get<double>();
      else if (key == "validation_fraction") cfg.validation_fraction = value.get<double>();
      else if (key == "warmup_epochs") cfg.warmup_epochs = value.get<std::size_t>();
      else if (key == "average_repetitions") cfg.average_repetitions = value.get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("train config: bad value for \"" + key + "\": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

std::string config_hash(const TrainConfig& cfg) { return hex64(fnv1a64(config_to_json(cfg).dump())); }

TrainingData make_training_data(const EpochTensor& e) { return {to_matrix(e), e.image_ids}; }

std::vector<std::pair<std::size_t, std::size_t>> batch_bounds(std::size_t n, std::size_t batch_size) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < n; b += batch_size) out.emplace_back(b, std::min(n, b + batch_size));
  if (out.size() >= 2 && out.back().second - out.back().first == 1) {
    out[out.size() - 2].second = n;
    out.pop_back();
  }
  return out;
}

TrainState init_train_state(const TrainConfig& cfg, std::size_t input_dim, std::size_t proj_dim, std::size_t n_samples) {
  TrainState st;
  Rng init_rng = Rng(cfg.seed).derive("init");
  st.params = init_params<float>(input_dim, proj_dim, init_rng);
  st.optimizer = make_adamw_state(st.params);
  st.tracker.momentum = cfg.ema_momentum;
  st.tracker.z = cfg.z;
  st.tracker.warmup_batches = batch_bounds(n_samples, cfg.batch_size).size() * cfg.warmup_epochs;
  st.radius = RadiusTable(n_samples, cfg.r0, cfg.c);
  return st;
}

EpochLog train_epoch(TrainState& state, const TrainingData& data, const FeatureCache& cache, const TrainConfig& cfg,
                     const BatchObserver& observer) {
  const std::size_t n = data.x.rows();
  if (n < 2) throw DataError("train_epoch: need at least two training samples");
  require(data.image_ids.size() == n, "train_epoch: one image id per sample required");
  require(state.radius.size() == n, "train_epoch: radius table does not match the dataset");
  if (cache.dim() != state.params.proj_dim()) {
    throw FormatError("feature cache dim " + std::to_string(cache.dim()) + " != encoder output dim " +
                      std::to_string(state.params.proj_dim()));
  }
  for (auto id : data.image_ids) {
    if (!cache.contains(id)) throw DataError("feature cache has no entry for image id " + std::to_string(id));
  }

  const EncoderOptions opts = cfg.encoder_options();
  const Rng master(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng = master.derive("shuffle", state.epoch);
  shuffle_rng.shuffle(order.begin(), order.end());
  Rng dropout_rng = master.derive("dropout", state.epoch);

  const bool assign = cfg.uncertainty_blur && state.epoch >= cfg.warmup_epochs;
  EpochLog log;
  log.epoch = state.epoch;
  double loss_sum = 0.0;

  std::vector<RadiusBranch> used, assigned;
  for (auto [begin, end] : batch_bounds(n, cfg.batch_size)) {
    const std::span<const std::size_t> ids(order.data() + begin, end - begin);
    const MatrixF x = gather_rows(data.x, ids);
    used.assign(ids.size(), RadiusBranch::base);
    MatrixF hv(ids.size(), cache.dim());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (cfg.uncertainty_blur) used[i] = state.radius.branch(ids[i]);
      auto v = cache.lookup(data.image_ids[ids[i]], used[i]);
      std::copy(v.begin(), v.end(), hv.row(i).begin());
    }

    auto fwd = forward(state.params, x, true, dropout_rng, opts);
    const auto loss = contrastive_loss(fwd.h, hv, state.params.tau_raw);
    loss_sum += static_cast<double>(loss.value) * static_cast<double>(ids.size());

    const std::vector<double> scores(loss.diag_scores.begin(), loss.diag_scores.end());
    state.tracker = tracker_update(state.tracker, scores);
    if (assign) {
      const auto counts = update_radius_table(state.radius, ids, scores, state.tracker, cfg.flip_radius_rule);
      for (std::size_t k = 0; k < 3; ++k) log.branch_counts[k] += counts[k];
    } else {
      log.branch_counts[static_cast<std::size_t>(RadiusBranch::base)] += ids.size();
    }
    if (observer) {
      assigned.clear();
      for (auto id : ids) assigned.push_back(state.radius.branch(id));
      observer(BatchTrace{ids, used, assigned, assign});
    }

    auto bw = backward(state.params, fwd.cache, loss.grad_hb, opts);
    bw.grads.tau_raw = loss.grad_tau_raw;
    adamw_step(state.params, bw.grads, state.optimizer, cfg.effective_lr(), cfg.weight_decay);
  }

  log.mean_loss = loss_sum / static_cast<double>(n);
  log.samples = n;
  // Logged in vanilla runs too; the tracker is fed either way.
  if (state.tracker.ready() && state.epoch >= cfg.warmup_epochs) {
    log.interval = confidence_interval(state.tracker);
  }
  log.temperature = softplus(static_cast<double>(state.params.tau_raw));
  ++state.epoch;
  return log;
}

std::string TrainReport::to_jsonl() const {
  std::ostringstream out;
  for (const auto& e : epochs) {
    nlohmann::json j;
    j["epoch"] = e.epoch;
    j["loss"] = e.mean_loss;
    j["ci_lo"] = e.interval ? nlohmann::json(e.interval->lo) : nlohmann::json(nullptr);
    j["ci_hi"] = e.interval ? nlohmann::json(e.interval->hi) : nlohmann::json(nullptr);
    j["branch_counts"] = {{"low", e.branch_counts[0]}, {"base", e.branch_counts[1]}, {"high", e.branch_counts[2]}};
    j["temperature"] = e.temperature;
    j["val_top1"] = e.val_top1;
    j["val_map"] = e.val_map;
    j["samples"] = e.samples;
    j["train_subjects"] = train_subjects;
    j["validation_subject"] = validation_subject;
    j["config_hash"] = config_hash;
    out << j.dump() << "\n";
  }
  return out.str();
}

namespace {

struct Validation {
  MatrixF x;
  Gallery gallery;
  MatrixF gallery_embeddings;
};

std::pair<double, double> validate_once(const EncoderParams<float>& params, const Validation& val,
                                        const EncoderOptions& opts) {
  Rng unused(0);
  EncoderOptions o = opts;
  o.normalize_embeddings = true;
  const auto fwd = forward(params, val.x, false, unused, o);
  const auto res = rank_gallery(fwd.h, val.gallery_embeddings, val.gallery.truth);
  return {topk_accuracy(res, 1), map_score(res)};
}

}  // namespace

FitResult fit(const TrainConfig& cfg, const FitInput& input, const FeatureCache& cache) {
  cfg.validate();
  if (input.subjects.empty()) throw DataError("fit: no training data");
  if (cfg.mode == TrainMode::inter) {
    if (input.subjects.size() < 2) throw ConfigError("fit: inter-subject mode needs at least two subjects");
    require(input.held_out < input.subjects.size(), "fit: held-out subject index out of range");
  }

  auto prepare = [&](const EpochTensor& e) { return cfg.average_repetitions ? average_repetitions(e) : e; };
  std::vector<EpochTensor> train_parts;
  TrainReport report;
  report.config_hash = config_hash(cfg);
  for (std::size_t s = 0; s < input.subjects.size(); ++s) {
    if (cfg.mode == TrainMode::intra && s > 0) break;
    if (cfg.mode == TrainMode::inter && s == input.held_out) continue;
    train_parts.push_back(prepare(input.subjects[s].train));
    report.train_subjects.push_back(input.subjects[s].subject);
  }
  const EpochTensor& val_source_raw =
      cfg.mode == TrainMode::intra ? input.subjects.front().train : input.subjects[input.held_out].train;
  report.validation_subject =
      cfg.mode == TrainMode::intra ? input.subjects.front().subject : input.subjects[input.held_out].subject;

  // Hold out a fraction of training images (by image id) for early stopping.
  std::set<std::uint32_t> id_set;
  for (const auto& p : train_parts) id_set.insert(p.image_ids.begin(), p.image_ids.end());
  if (id_set.empty()) throw DataError("fit: training data is empty");
  std::vector<std::uint32_t> ids(id_set.begin(), id_set.end());
  std::size_t n_val = 0;
  if (cfg.validation_fraction > 0.0) {
    n_val = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(cfg.validation_fraction * ids.size())));
    if (n_val + 2 > ids.size()) n_val = 0;
  }
  Rng split_rng = Rng(cfg.seed).derive("validation-split");
  split_rng.shuffle(ids.begin(), ids.end());
  std::unordered_set<std::uint32_t> val_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_val));
  report.validation_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::sort(report.validation_ids.begin(), report.validation_ids.end());

  for (auto& p : train_parts) p = filter_samples(p, [&](std::uint32_t id) { return !val_ids.contains(id); });
  const EpochTensor train_tensor = concat_epochs(train_parts, report.train_subjects.front());
  if (train_tensor.n_samples < 2) throw DataError("fit: fewer than two training samples after the validation split");
  const TrainingData data = make_training_data(train_tensor);
  report.train_samples = train_tensor.n_samples;

  std::optional<Validation> val;
  if (n_val > 0) {
    const EpochTensor v = average_repetitions(
        filter_samples(val_source_raw, [&](std::uint32_t id) { return val_ids.contains(id); }));
    if (v.n_samples >= 2) {
      Validation vv;
      vv.x = to_matrix(v);
      vv.gallery = gallery_for(v.image_ids);
      vv.gallery_embeddings = gallery_matrix(cache, vv.gallery.ids, RadiusBranch::base);
      if (vv.gallery.ids.size() >= 2) val = std::move(vv);
    }
  }

  TrainState state = init_train_state(cfg, data.x.cols(), cache.dim(), data.x.rows());
  const std::string cfg_json = config_to_json(cfg).dump();
  auto snapshot = [&]() {
    return Checkpoint{state.params,
                      TrainingState{state.optimizer, state.tracker, state.radius, static_cast<std::uint32_t>(state.epoch)},
                      cfg_json};
  };

  FitResult result;
  double best_top1 = -1.0, best_map = -1.0;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    EpochLog log = train_epoch(state, data, cache, cfg);
    bool improved = true;
    if (val) {
      const auto [top1, map] = validate_once(state.params, *val, cfg.encoder_options());
      log.val_top1 = top1;
      log.val_map = map;
      improved = top1 > best_top1 || (top1 == best_top1 && map > best_map);
    }
    report.epochs.push_back(log);
    if (improved) {
      best_top1 = log.val_top1;
      best_map = log.val_map;
      report.best_epoch = e;
      result.best = snapshot();
    } else if (e - report.best_epoch > cfg.patience) {
      break;
    }
  }
  report.best_val_top1 = std::max(best_top1, 0.0);
  result.report = std::move(report);
  return result;
}

}  // namespace ubp
