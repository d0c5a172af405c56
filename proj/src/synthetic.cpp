#include "ubp/synthetic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "ubp/blur.hpp"
#include "ubp/error.hpp"

namespace ubp {

void SyntheticSpec::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v < 1) throw ConfigError(std::string("synthetic spec: ") + name + " must be >= 1");
  };
  positive(n_concepts, "n_concepts");
  positive(images_per_concept, "images_per_concept");
  positive(trials_per_image, "trials_per_image");
  positive(test_trials_per_image, "test_trials_per_image");
  positive(channels, "channels");
  positive(timepoints, "timepoints");
  positive(image_size, "image_size");
  positive(feature_dim, "feature_dim");
  positive(sample_rate_hz, "sample_rate_hz");
  if (image_channels != 1 && image_channels != 3) throw ConfigError("synthetic spec: image_channels must be 1 or 3");
  if (!(noise_sigma >= 0.0)) throw ConfigError("synthetic spec: noise_sigma must be >= 0");
  if (!(attention_drift >= 0.0)) throw ConfigError("synthetic spec: attention_drift must be >= 0");
  if (!(highfreq_leak >= 0.0 && highfreq_leak <= 1.0)) throw ConfigError("synthetic spec: highfreq_leak must be in [0,1]");
  if (!(system_lambda >= 0.0)) throw ConfigError("synthetic spec: system_lambda must be >= 0");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("synthetic spec: test_fraction must be in (0,1)");
  const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n_concepts) * test_fraction));
  if (n_test < 2 || n_test >= n_concepts) {
    throw ConfigError("synthetic spec: test_fraction must leave >= 2 test concepts and >= 1 training concept");
  }
}

std::vector<LabeledImage> SyntheticDataset::images_for(const EpochTensor& e) const {
  std::unordered_set<std::uint32_t> wanted(e.image_ids.begin(), e.image_ids.end());
  std::vector<LabeledImage> out;
  for (const auto& img : images) {
    if (wanted.contains(img.id)) out.push_back(img);
  }
  return out;
}

Image render_texture(Rng concept_rng, Rng image_rng, std::size_t size, std::size_t channels) {
  struct Grating {
    double freq, theta, phase, amp;
    std::array<double, 3> color;
  };
  // Concept: shared layout of gratings across octaves. Image: its own phases,
  // amplitude jitter and one extra fine-scale grating.
  std::vector<Grating> gratings;
  constexpr std::array<double, 6> kOctaves = {1.5, 3.0, 5.0, 8.0, 12.0, 18.0};
  for (double base : kOctaves) {
    Grating g;
    g.freq = base * concept_rng.uniform(0.8, 1.25);
    g.theta = concept_rng.uniform(0.0, std::numbers::pi);
    g.amp = concept_rng.uniform(0.5, 1.0);
    for (auto& c : g.color) c = concept_rng.uniform(0.3, 1.0);
    g.phase = image_rng.uniform(0.0, 2.0 * std::numbers::pi);
    g.amp *= image_rng.uniform(0.6, 1.4);
    g.theta += image_rng.normal(0.0, 0.15);
    gratings.push_back(g);
  }
  {
    Grating g;
    g.freq = image_rng.uniform(10.0, 20.0);
    g.theta = image_rng.uniform(0.0, std::numbers::pi);
    g.phase = image_rng.uniform(0.0, 2.0 * std::numbers::pi);
    g.amp = image_rng.uniform(0.5, 1.0);
    for (auto& c : g.color) c = image_rng.uniform(0.3, 1.0);
    gratings.push_back(g);
  }
  double amp_total = 0.0;
  for (const auto& g : gratings) amp_total += g.amp;
  const double scale = 0.48 / amp_total;

  Image img(size, size, channels);
  const double n = static_cast<double>(size);
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x) {
        double v = 0.5;
        for (const auto& g : gratings) {
          const double coord = (static_cast<double>(x) * std::cos(g.theta) + static_cast<double>(y) * std::sin(g.theta)) / n;
          v += scale * g.amp * g.color[c] * std::cos(2.0 * std::numbers::pi * g.freq * coord + g.phase);
        }
        img.at(c, y, x) = std::clamp(v, 0.0, 1.0);
      }
  return img;
}

namespace {

Image system_view(const Image& img, const SyntheticSpec& spec) {
  const Image degraded = fovea_blur(img, BlurParams{spec.system_radius, spec.system_lambda, std::nullopt});
  Image out(img.height(), img.width(), img.channels());
  for (std::size_t k = 0; k < out.data().size(); ++k) {
    out.data()[k] = (1.0 - spec.highfreq_leak) * degraded.data()[k] + spec.highfreq_leak * img.data()[k];
  }
  return out;
}

EpochTensor empty_epochs(const SyntheticSpec& spec) {
  EpochTensor e;
  e.n_channels = spec.channels;
  e.n_timepoints = spec.timepoints;
  e.sample_rate_hz = spec.sample_rate_hz;
  e.subject_id = spec.subject_id;
  return e;
}

void append_trials(EpochTensor& e, std::uint32_t id, const std::vector<float>& feature, std::size_t trials,
                   const MatrixD& mixing, const SyntheticSpec& spec, Rng& rng) {
  const std::size_t d = feature.size();
  const double drift_scale = spec.attention_drift / std::sqrt(static_cast<double>(d));
  std::vector<double> latent(d);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t k = 0; k < d; ++k) latent[k] = feature[k] + drift_scale * rng.normal();
    for (std::size_t p = 0; p < mixing.rows(); ++p) {
      auto row = mixing.row(p);
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += row[k] * latent[k];
      e.data.push_back(static_cast<float>(acc + spec.noise_sigma * rng.normal()));
    }
    e.image_ids.push_back(id);
    ++e.n_samples;
  }
}

}  // namespace

EpochTensor sample_trials(const SyntheticSpec& spec, const GroundTruth& truth, std::span<const std::uint32_t> ids,
                          std::size_t trials, Rng& rng) {
  EpochTensor e = empty_epochs(spec);
  for (auto id : ids) {
    const auto it = truth.system_features.find(id);
    if (it == truth.system_features.end()) throw DataError("sample_trials: unknown image id " + std::to_string(id));
    append_trials(e, id, it->second, trials, truth.mixing, spec, rng);
  }
  return e;
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec, Rng rng) {
  spec.validate();
  SyntheticDataset ds;
  auto& truth = ds.truth;

  const std::size_t n_test = static_cast<std::size_t>(std::llround(static_cast<double>(spec.n_concepts) * spec.test_fraction));
  std::vector<std::uint32_t> concepts(spec.n_concepts);
  for (std::size_t i = 0; i < concepts.size(); ++i) concepts[i] = static_cast<std::uint32_t>(i);
  // Stimuli and the concept split depend on the mixing seed only, so every
  // subject generated from the same spec shares them; `rng` drives trials.
  const Rng stim_rng = Rng(spec.mix_matrix_seed).derive("stimuli");
  Rng split_rng = stim_rng.derive("concept-split");
  split_rng.shuffle(concepts.begin(), concepts.end());
  truth.test_concepts.assign(concepts.begin(), concepts.begin() + static_cast<std::ptrdiff_t>(n_test));
  truth.train_concepts.assign(concepts.begin() + static_cast<std::ptrdiff_t>(n_test), concepts.end());
  std::sort(truth.test_concepts.begin(), truth.test_concepts.end());
  std::sort(truth.train_concepts.begin(), truth.train_concepts.end());

  Rng mix_rng = Rng(spec.mix_matrix_seed).derive("mixing");
  truth.mixing = MatrixD(spec.channels * spec.timepoints, spec.feature_dim);
  for (double& v : truth.mixing.data()) v = mix_rng.normal();

  const ToyVisionEncoder encoder(spec.feature_dim, spec.image_channels, spec.encoder_seed);
  ds.train = empty_epochs(spec);
  ds.test = empty_epochs(spec);
  Rng trial_rng = rng.derive("trials");

  std::uint32_t next_id = 0;
  auto emit = [&](std::uint32_t concept_id, std::size_t n_images, std::size_t trials, EpochTensor& dest) {
    for (std::size_t i = 0; i < n_images; ++i) {
      const std::uint32_t id = next_id++;
      Image img = render_texture(stim_rng.derive("concept", concept_id), stim_rng.derive("image", id),
                                 spec.image_size, spec.image_channels);
      auto feature = encoder.encode(system_view(img, spec));
      append_trials(dest, id, feature, trials, truth.mixing, spec, trial_rng);
      truth.system_features.emplace(id, std::move(feature));
      truth.concept_of.emplace(id, concept_id);
      ds.images.push_back({id, std::move(img)});
    }
  };
  // ids are assigned in concept order so they are stable across seeds
  const std::unordered_set<std::uint32_t> test_set(truth.test_concepts.begin(), truth.test_concepts.end());
  for (std::uint32_t concept_id = 0; concept_id < spec.n_concepts; ++concept_id) {
    if (test_set.contains(concept_id)) {
      emit(concept_id, 1, spec.test_trials_per_image, ds.test);
    } else {
      emit(concept_id, spec.images_per_concept, spec.trials_per_image, ds.train);
    }
  }
  return ds;
}

MatrixD oracle_decode(const GroundTruth& truth, const EpochTensor& e) {
  const auto& a = truth.mixing;
  require(e.sample_size() == a.rows(), "oracle_decode: sample size does not match the mixing map");
  Eigen::MatrixXd mix(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) mix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  const auto qr = mix.colPivHouseholderQr();
  MatrixD out(e.n_samples, a.cols());
  Eigen::VectorXd x(a.rows());
  for (std::size_t s = 0; s < e.n_samples; ++s) {
    auto src = e.sample(s);
    for (std::size_t p = 0; p < a.rows(); ++p) x(static_cast<Eigen::Index>(p)) = src[p];
    const Eigen::VectorXd latent = qr.solve(x);
    for (std::size_t k = 0; k < a.cols(); ++k) out(s, k) = latent(static_cast<Eigen::Index>(k));
  }
  return out;
}

}  // namespace ubp
