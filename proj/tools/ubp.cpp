// ubp: command-line driver for synthetic data, preprocessing, feature
// extraction, training, evaluation and report aggregation.
//
// Exit codes: 0 success, 1 data/format errors, 2 configuration errors.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ubp/binary_io.hpp"
#include "ubp/blur.hpp"
#include "ubp/checkpoint.hpp"
#include "ubp/epoch.hpp"
#include "ubp/error.hpp"
#include "ubp/eval.hpp"
#include "ubp/feature_cache.hpp"
#include "ubp/hash.hpp"
#include "ubp/image.hpp"
#include "ubp/synthetic.hpp"
#include "ubp/toy_encoder.hpp"
#include "ubp/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ubp::cli {
namespace {

constexpr int kExitData = 1;
constexpr int kExitConfig = 2;

json read_json(const fs::path& path) {
  std::string text;
  try {
    text = io::read_text(path);
  } catch (const DataError&) {
    throw ConfigError("cannot read config " + path.string());
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("UBP_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto seed = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return seed;
  } catch (const std::exception&) {
    throw ConfigError(std::string("UBP_SEED is not an unsigned integer: ") + v);
  }
}

std::string content_hash(const fs::path& path) { return hex64(fnv1a64(io::read_file(path))); }

// ---------------------------------------------------------------- synth

SyntheticSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("synthetic spec must be a JSON object");
  SyntheticSpec s;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "n_concepts") s.n_concepts = v.get<std::size_t>();
      else if (key == "images_per_concept") s.images_per_concept = v.get<std::size_t>();
      else if (key == "trials_per_image") s.trials_per_image = v.get<std::size_t>();
      else if (key == "test_trials_per_image") s.test_trials_per_image = v.get<std::size_t>();
      else if (key == "test_fraction") s.test_fraction = v.get<double>();
      else if (key == "channels") s.channels = v.get<std::size_t>();
      else if (key == "timepoints") s.timepoints = v.get<std::size_t>();
      else if (key == "sample_rate_hz") s.sample_rate_hz = v.get<std::uint32_t>();
      else if (key == "image_size") s.image_size = v.get<std::size_t>();
      else if (key == "image_channels") s.image_channels = v.get<std::size_t>();
      else if (key == "feature_dim") s.feature_dim = v.get<std::size_t>();
      else if (key == "encoder_seed") s.encoder_seed = v.get<std::uint64_t>();
      else if (key == "mix_matrix_seed") s.mix_matrix_seed = v.get<std::uint64_t>();
      else if (key == "noise_sigma") s.noise_sigma = v.get<double>();
      else if (key == "attention_drift") s.attention_drift = v.get<double>();
      else if (key == "highfreq_leak") s.highfreq_leak = v.get<double>();
      else if (key == "system_radius") s.system_radius = v.get<double>();
      else if (key == "system_lambda") s.system_lambda = v.get<double>();
      else if (key == "subject_id") s.subject_id = v.get<std::string>();
      else throw ConfigError("synthetic spec: unknown key \"" + key + "\"");
    } catch (const json::exception& e) {
      throw ConfigError("synthetic spec: bad value for \"" + key + "\": " + e.what());
    }
  }
  s.validate();
  return s;
}

json spec_to_json(const SyntheticSpec& s) {
  return {{"n_concepts", s.n_concepts},
          {"images_per_concept", s.images_per_concept},
          {"trials_per_image", s.trials_per_image},
          {"test_trials_per_image", s.test_trials_per_image},
          {"test_fraction", s.test_fraction},
          {"channels", s.channels},
          {"timepoints", s.timepoints},
          {"sample_rate_hz", s.sample_rate_hz},
          {"image_size", s.image_size},
          {"image_channels", s.image_channels},
          {"feature_dim", s.feature_dim},
          {"encoder_seed", s.encoder_seed},
          {"mix_matrix_seed", s.mix_matrix_seed},
          {"noise_sigma", s.noise_sigma},
          {"attention_drift", s.attention_drift},
          {"highfreq_leak", s.highfreq_leak},
          {"system_radius", s.system_radius},
          {"system_lambda", s.system_lambda},
          {"subject_id", s.subject_id}};
}

struct SynthArgs {
  std::string spec_path;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t subjects = 1;
  double r0 = 0.25;
  double c = 10.0;
  double lambda = 2.0;
};

int cmd_synth(const SynthArgs& a) {
  SyntheticSpec spec = a.spec_path.empty() ? SyntheticSpec{} : spec_from_json(read_json(a.spec_path));
  spec.validate();
  if (a.subjects < 1) throw ConfigError("--subjects must be >= 1");
  const std::uint64_t seed = env_seed().value_or(a.seed);
  const fs::path out(a.out);
  fs::create_directories(out / "images");

  json manifest;
  manifest["spec"] = spec_to_json(spec);
  manifest["seed"] = seed;
  manifest["config_hash"] =
      hex64(fnv1a64(json{{"spec", manifest["spec"]}, {"r0", a.r0}, {"c", a.c}, {"lambda", a.lambda}}.dump()));
  manifest["subjects"] = json::array();
  json artifacts = json::array();
  auto record = [&](const fs::path& p) {
    artifacts.push_back({{"path", fs::relative(p, out).generic_string()}, {"fnv1a64", content_hash(p)}});
  };

  std::optional<SyntheticDataset> first;
  for (std::size_t s = 0; s < a.subjects; ++s) {
    SyntheticSpec sub = spec;
    if (a.subjects > 1) {
      std::ostringstream name;
      name << "sub-" << (s + 1 < 10 ? "0" : "") << (s + 1);
      sub.subject_id = name.str();
    }
    auto ds = generate_synthetic(sub, Rng(seed).derive("subject", s));
    const fs::path dir = a.subjects > 1 ? out / sub.subject_id : out;
    fs::create_directories(dir);
    save_epochs(dir / "train.ubpe", ds.train);
    save_epochs(dir / "test.ubpe", ds.test);
    record(dir / "train.ubpe");
    record(dir / "test.ubpe");
    manifest["subjects"].push_back(sub.subject_id);
    if (!first) first = std::move(ds);
  }

  for (const auto& li : first->images) {
    const fs::path p = out / "images" / (std::to_string(li.id) + ".ubpi");
    save_raster(p, li.image);
    record(p);
  }
  const ToyVisionEncoder encoder(spec.feature_dim, spec.image_channels, spec.encoder_seed);
  const auto cache = build_feature_cache(first->images, encoder, radius_levels(a.r0, a.c), a.lambda);
  save_feature_cache(out / "features.ubpf", cache);
  record(out / "features.ubpf");

  json split;
  split["train_concepts"] = first->truth.train_concepts;
  split["test_concepts"] = first->truth.test_concepts;
  manifest["split"] = split;
  manifest["feature_levels"] = {{"r0", a.r0}, {"c", a.c}, {"lambda", a.lambda}};
  manifest["artifacts"] = artifacts;
  io::write_text(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << artifacts.size() << " artifacts to " << out.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------- preprocess

struct PreprocessArgs {
  std::string in;
  std::string out;
  std::vector<std::string> channels;
  std::string window;
  std::size_t factor = 1;
  double onset_ms = 0.0;
  double baseline_ms = 200.0;
  bool average = false;
  bool anti_alias = false;
  std::string storage;
};

WindowMs parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("--window expects START:END in ms, got \"" + text + "\"");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ConfigError("--window expects START:END in ms, got \"" + text + "\"");
  }
}

std::vector<std::size_t> parse_channels(const std::vector<std::string>& spec, std::size_t n_channels) {
  std::vector<std::string> names;
  for (const auto& item : spec) {
    if (item == "visual17") {
      for (auto n : visual_channels17()) names.emplace_back(n);
    } else {
      names.push_back(item);
    }
  }
  const bool numeric = std::all_of(names.begin(), names.end(), [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
  });
  if (numeric) {
    std::vector<std::size_t> idx;
    for (const auto& s : names) idx.push_back(std::stoul(s));
    return idx;
  }
  if (n_channels != eeg63_montage().size()) {
    throw ContractViolation("channel names need a " + std::to_string(eeg63_montage().size()) +
                            "-channel recording; this file has " + std::to_string(n_channels) + " (use indices)");
  }
  return resolve_channels(names, eeg63_montage());
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const ContractViolation& e) {
    throw DataError(std::string("preprocess/") + name + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(std::string("preprocess/") + name + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string("preprocess/") + name + ": " + e.what());
  }
}

int cmd_preprocess(const PreprocessArgs& a) {
  std::optional<WindowMs> window;
  if (!a.window.empty()) window = parse_window(a.window);
  if (a.factor < 1) throw ConfigError("--factor must be >= 1");
  std::optional<StorageType> storage;
  if (a.storage == "f16") storage = StorageType::f16;
  else if (a.storage == "f32") storage = StorageType::f32;
  else if (!a.storage.empty()) throw ConfigError("--storage must be f16 or f32");

  EpochTensor e = stage("load", [&] { return load_epochs(a.in); });
  if (!a.channels.empty()) {
    e = stage("select", [&] { return select_channels(e, parse_channels(a.channels, e.n_channels)); });
  }
  stage("baseline", [&] {
    if (!baseline_correct(e, a.onset_ms, a.baseline_ms)) {
      std::cerr << "notice: no pre-stimulus samples; baseline correction skipped\n";
    }
    return 0;
  });
  if (window || a.factor != 1) {
    const double span_ms = 1000.0 * static_cast<double>(e.n_timepoints) / e.sample_rate_hz - a.onset_ms;
    const WindowMs w = window.value_or(WindowMs{0.0, span_ms});
    e = stage("downsample", [&] { return crop_and_downsample(e, w, a.factor, a.onset_ms, a.anti_alias); });
  }
  if (a.average) e = stage("average", [&] { return average_repetitions(e); });
  if (storage) e.storage = *storage;
  save_epochs(a.out, e);
  std::cout << a.out << ": " << e.n_samples << " samples, " << e.n_channels << " channels, " << e.n_timepoints
            << " timepoints at " << e.sample_rate_hz << " Hz\n";
  return 0;
}

// ---------------------------------------------------------------- extract-features

struct ExtractArgs {
  std::string images;
  std::string out;
  std::string external;
  std::vector<std::string> require_ids_from;
  std::size_t dim = 32;
  std::uint64_t seed = 7;
  double r0 = 0.25;
  double c = 10.0;
  double lambda = 2.0;
  std::string mode = "fovea";
};

std::vector<std::uint32_t> ids_from_epochs(const std::vector<std::string>& paths) {
  std::vector<std::uint32_t> ids;
  for (const auto& p : paths) {
    const auto e = load_epochs(p);
    ids.insert(ids.end(), e.image_ids.begin(), e.image_ids.end());
  }
  return ids;
}

int cmd_extract(const ExtractArgs& a) {
  const auto required = ids_from_epochs(a.require_ids_from);
  if (!a.external.empty()) {
    const auto cache = load_feature_cache(a.external);
    validate_feature_cache(cache, a.dim, required);
    std::cout << a.external << ": " << cache.size() << " images, dim " << cache.dim() << ", backbone "
              << cache.backbone_tag() << "\n";
    if (!a.out.empty()) save_feature_cache(a.out, cache);
    return 0;
  }
  if (a.images.empty() || a.out.empty()) throw ConfigError("extract-features needs --images and --out (or --external)");
  BlurMode mode = BlurMode::fovea;
  if (a.mode == "uniform") mode = BlurMode::uniform;
  else if (a.mode != "fovea") throw ConfigError("--mode must be fovea or uniform");

  std::vector<LabeledImage> images;
  for (const auto& entry : fs::directory_iterator(a.images)) {
    if (entry.path().extension() != ".ubpi") continue;
    const auto stem = entry.path().stem().string();
    std::uint32_t id = 0;
    try {
      id = static_cast<std::uint32_t>(std::stoul(stem));
    } catch (const std::exception&) {
      throw DataError(entry.path().string() + ": raster names must be <image id>.ubpi");
    }
    images.push_back({id, load_raster(entry.path())});
  }
  if (images.empty()) throw DataError(a.images + ": no .ubpi rasters found");
  std::sort(images.begin(), images.end(), [](const auto& x, const auto& y) { return x.id < y.id; });
  const ToyVisionEncoder encoder(a.dim, images.front().image.channels(), a.seed);
  const auto cache = build_feature_cache(images, encoder, radius_levels(a.r0, a.c), a.lambda, mode);
  validate_feature_cache(cache, a.dim, required);
  save_feature_cache(a.out, cache);
  std::cout << a.out << ": " << cache.size() << " images, dim " << cache.dim() << "\n";
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config;
  std::vector<std::string> data;
  std::string features;
  std::string out;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::size_t> patience;
  std::size_t held_out = 0;
  bool flip = false;
  bool no_blur = false;
};

TrainConfig effective_config(const TrainArgs& a) {
  json j = a.config.empty() ? json::object() : read_json(a.config);
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  if (a.epochs) j["epochs"] = *a.epochs;
  if (a.batch_size) j["batch_size"] = *a.batch_size;
  if (a.lr) j["lr"] = *a.lr;
  if (a.seed) j["seed"] = *a.seed;
  if (a.mode) j["mode"] = *a.mode;
  if (a.patience) j["patience"] = *a.patience;
  if (a.flip) j["flip_radius_rule"] = true;
  if (a.no_blur) j["uncertainty_blur"] = false;
  if (auto s = env_seed()) j["seed"] = *s;
  return config_from_json(j);
}

int cmd_train(const TrainArgs& a) {
  const TrainConfig cfg = effective_config(a);
  FitInput input;
  for (const auto& p : a.data) {
    auto e = load_epochs(p);
    input.subjects.push_back({e.subject_id.empty() ? fs::path(p).stem().string() : e.subject_id, std::move(e)});
  }
  input.held_out = a.held_out;
  if (cfg.mode == TrainMode::inter && a.held_out >= input.subjects.size()) {
    throw ConfigError("--held-out index out of range");
  }
  const auto cache = load_feature_cache(a.features);
  const auto result = fit(cfg, input, cache);

  const fs::path out(a.out);
  fs::create_directories(out);
  save_checkpoint(out / "model.ubpc", result.best);
  io::write_text(out / "train_log.jsonl", result.report.to_jsonl());
  json effective = config_to_json(cfg);
  io::write_text(out / "config.json", json{{"config", effective}, {"config_hash", config_hash(cfg)}, {"seed", cfg.seed}}.dump(2) + "\n");
  const auto& best = result.report.epochs[result.report.best_epoch];
  std::cout << "best epoch " << result.report.best_epoch << " of " << result.report.epochs.size() << ", val top1 "
            << best.val_top1 << ", loss " << best.mean_loss << "\n";
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string checkpoint;
  std::string data;
  std::string features;
  std::string out;
  std::string gallery_blur = "base";
};

int cmd_eval(const EvalArgs& a) {
  GalleryBlur blur = GalleryBlur::base;
  if (a.gallery_blur == "none") blur = GalleryBlur::none;
  else if (a.gallery_blur != "base") throw ConfigError("--gallery-blur must be base or none");

  const auto ckpt = load_checkpoint(a.checkpoint);
  TrainConfig cfg;
  try {
    cfg = config_from_json(ckpt.config_json.empty() ? json::object() : json::parse(ckpt.config_json));
  } catch (const json::exception& e) {
    throw FormatError(a.checkpoint + ": config echo is not JSON: " + e.what());
  }
  const auto test = load_epochs(a.data);
  const auto cache = load_feature_cache(a.features);

  EvalOptions opts;
  opts.gallery_blur = blur;
  opts.low_level_is_identity = radius_to_kernel(cfg.r0 - cfg.c).is_identity();
  opts.encoder = cfg.encoder_options();
  opts.mode = cfg.mode == TrainMode::intra ? "intra" : "inter";
  opts.seed = cfg.seed;
  opts.config_hash = config_hash(cfg);
  const auto report = evaluate(ckpt.params, test, cache, opts);

  const fs::path out(a.out);
  fs::create_directories(out);
  io::write_text(out / "report.json", report.to_json());
  io::write_text(out / "ranks.csv", report.to_csv());
  std::cout << report.to_json();
  return 0;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  std::vector<std::string> reports;
  std::string out;
};

int cmd_report(const ReportArgs& a) {
  std::ostringstream csv;
  csv << "subject,gallery_size,top1,top5,map,mean_similarity\n";
  double sums[4] = {0, 0, 0, 0};
  char line[256];
  for (const auto& p : a.reports) {
    EvalReport r;
    try {
      r = parse_report_json(io::read_text(p));
    } catch (const FormatError& e) {
      throw FormatError(p + ": " + e.what());
    }
    std::snprintf(line, sizeof line, ",%zu,%.2f,%.2f,%.2f,%.4f\n", r.gallery_size, r.top1, r.top5, r.map,
                  r.mean_similarity);
    csv << r.subject << line;
    sums[0] += r.top1;
    sums[1] += r.top5;
    sums[2] += r.map;
    sums[3] += r.mean_similarity;
  }
  const double n = static_cast<double>(a.reports.size());
  std::snprintf(line, sizeof line, "mean,,%.2f,%.2f,%.2f,%.4f\n", sums[0] / n, sums[1] / n, sums[2] / n, sums[3] / n);
  csv << line;
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    io::write_text(a.out, csv.str());
  }
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware blur prior: EEG/MEG visual decoding toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic paired image / brain-recording corpus");
  s->add_option("--spec", synth.spec_path, "Synthetic spec JSON (defaults apply when omitted)");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--seed", synth.seed, "Trial seed (UBP_SEED overrides)");
  s->add_option("--subjects", synth.subjects, "Number of subjects sharing the stimuli");
  s->add_option("--r0", synth.r0, "Base blur radius for the feature cache");
  s->add_option("--c", synth.c, "Radius offset for the low/high levels");
  s->add_option("--lambda", synth.lambda, "Fovea decay rate");

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "Channel selection, baseline, crop/downsample, averaging");
  p->add_option("--in", pre.in, "Input epoch file")->required();
  p->add_option("--out", pre.out, "Output epoch file")->required();
  p->add_option("--channels", pre.channels, "Channel names, indices, or 'visual17'")->delimiter(',');
  p->add_option("--window", pre.window, "Crop window START:END in ms relative to onset");
  p->add_option("--factor", pre.factor, "Decimation factor");
  p->add_option("--onset-ms", pre.onset_ms, "Stimulus onset relative to the first sample, ms");
  p->add_option("--baseline-ms", pre.baseline_ms, "Pre-stimulus baseline length, ms");
  p->add_flag("--average", pre.average, "Average repetitions of each image");
  p->add_flag("--anti-alias", pre.anti_alias, "Block-average before decimating");
  p->add_option("--storage", pre.storage, "On-disk precision: f16 or f32 (default: keep input)");

  ExtractArgs ex;
  auto* x = app.add_subcommand("extract-features", "Build or validate a feature cache");
  x->add_option("--images", ex.images, "Directory of <id>.ubpi rasters");
  x->add_option("--out", ex.out, "Output feature cache");
  x->add_option("--external", ex.external, "Validate an externally produced cache instead of encoding");
  x->add_option("--require-ids-from", ex.require_ids_from, "Epoch files whose image ids must be covered");
  x->add_option("--dim", ex.dim, "Embedding dimension");
  x->add_option("--seed", ex.seed, "Toy encoder projection seed");
  x->add_option("--r0", ex.r0, "Base blur radius");
  x->add_option("--c", ex.c, "Radius offset");
  x->add_option("--lambda", ex.lambda, "Fovea decay rate");
  x->add_option("--mode", ex.mode, "fovea or uniform");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train the brain encoder");
  t->add_option("--config", tr.config, "Train config JSON");
  t->add_option("--data", tr.data, "Training epoch file(s), one per subject")->required();
  t->add_option("--features", tr.features, "Feature cache")->required();
  t->add_option("--out", tr.out, "Output directory")->required();
  t->add_option("--epochs", tr.epochs, "Override epochs");
  t->add_option("--batch-size", tr.batch_size, "Override batch size");
  t->add_option("--lr", tr.lr, "Override learning rate");
  t->add_option("--seed", tr.seed, "Override seed (UBP_SEED wins)");
  t->add_option("--mode", tr.mode, "intra or inter");
  t->add_option("--patience", tr.patience, "Override early-stopping patience");
  t->add_option("--held-out", tr.held_out, "Inter mode: index of the left-out subject");
  t->add_flag("--flip", tr.flip, "Swap the outer branches of the radius rule");
  t->add_flag("--no-blur", tr.no_blur, "Disable uncertainty-driven blur (vanilla training)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Zero-shot retrieval on a test set");
  e->add_option("--checkpoint", ev.checkpoint, "Checkpoint file")->required();
  e->add_option("--data", ev.data, "Test epoch file")->required();
  e->add_option("--features", ev.features, "Gallery feature cache")->required();
  e->add_option("--out", ev.out, "Output directory")->required();
  e->add_option("--gallery-blur", ev.gallery_blur, "base or none");

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Summarize evaluation reports into a CSV table");
  r->add_option("reports", rep.reports, "report.json files")->required();
  r->add_option("--out", rep.out, "Output CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*s) return cmd_synth(synth);
    if (*p) return cmd_preprocess(pre);
    if (*x) return cmd_extract(ex);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*r) return cmd_report(rep);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& err) {
    std::cerr << "format error: " << err.what() << "\n";
    return kExitData;
  } catch (const DataError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return kExitData;
  } catch (const ContractViolation& err) {
    std::cerr << "invalid input: " << err.what() << "\n";
    return kExitData;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  }
  return 0;
}

}  // namespace ubp::cli

int main(int argc, char** argv) { return ubp::cli::run(argc, argv); }
