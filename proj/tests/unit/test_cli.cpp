#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <string>

#include "support.hpp"
#include "ubp/binary_io.hpp"
#include "ubp/epoch.hpp"
#include "ubp/rng.hpp"

using namespace ubp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

// Runs the CLI with stdout and stderr merged.
RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" UBP_CLI_PATH "' " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

json small_spec_json() {
  return {{"n_concepts", 16},  {"images_per_concept", 2}, {"trials_per_image", 2}, {"test_trials_per_image", 3},
          {"test_fraction", 0.25}, {"channels", 4},       {"timepoints", 8},       {"image_size", 24},
          {"feature_dim", 16}};
}

fs::path write_json(const fs::path& path, const json& j) {
  io::write_text(path, j.dump(2));
  return path;
}

json read_json(const fs::path& path) { return json::parse(io::read_text(path)); }

EpochTensor patterned_epochs(std::size_t samples, std::size_t channels, std::size_t timepoints, std::uint32_t rate,
                             std::size_t ids, std::uint64_t seed) {
  EpochTensor e;
  e.n_samples = samples;
  e.n_channels = channels;
  e.n_timepoints = timepoints;
  e.sample_rate_hz = rate;
  e.subject_id = "sub-01";
  Rng rng(seed);
  e.data.resize(samples * channels * timepoints);
  for (auto& v : e.data) v = static_cast<float>(rng.normal());
  for (std::size_t s = 0; s < samples; ++s) e.image_ids.push_back(static_cast<std::uint32_t>(s % ids));
  return e;
}

}  // namespace

TEST_CASE("synth is deterministic per seed") {
  const auto dir = testing::temp_dir("cli-synth");
  const auto spec = write_json(dir / "spec.json", small_spec_json());
  REQUIRE(run("synth --spec " + q(spec) + " --seed 5 --out " + q(dir / "a")).code == 0);
  REQUIRE(run("synth --spec " + q(spec) + " --seed 5 --out " + q(dir / "b")).code == 0);
  REQUIRE(run("synth --spec " + q(spec) + " --seed 6 --out " + q(dir / "c")).code == 0);
  const auto a = read_json(dir / "a" / "manifest.json");
  const auto b = read_json(dir / "b" / "manifest.json");
  const auto c = read_json(dir / "c" / "manifest.json");
  CHECK(a["artifacts"] == b["artifacts"]);
  CHECK(a["config_hash"] == b["config_hash"]);
  CHECK(a["seed"] == 5);
  CHECK(a["artifacts"] != c["artifacts"]);
  // Each listed hash matches the file on disk.
  REQUIRE(a["artifacts"].size() > 3);
  for (const auto& art : a["artifacts"]) CHECK(fs::exists(dir / "a" / art["path"].get<std::string>()));
}

TEST_CASE("synth gallery size follows the concept split") {
  const auto dir = testing::temp_dir("cli-synth-split");
  json spec = small_spec_json();
  spec["n_concepts"] = 50;
  spec["images_per_concept"] = 1;
  spec["test_fraction"] = 0.2;
  REQUIRE(run("synth --spec " + q(write_json(dir / "spec.json", spec)) + " --out " + q(dir / "out")).code == 0);
  const auto test = load_epochs(dir / "out" / "test.ubpe");
  CHECK(std::set<std::uint32_t>(test.image_ids.begin(), test.image_ids.end()).size() == 10);
  CHECK(read_json(dir / "out" / "manifest.json")["split"]["test_concepts"].size() == 10);
}

TEST_CASE("invalid synth specs exit with a config error") {
  const auto dir = testing::temp_dir("cli-synth-bad");
  json zero = small_spec_json();
  zero["channels"] = 0;
  auto r = run("synth --spec " + q(write_json(dir / "zero.json", zero)) + " --out " + q(dir / "o1"));
  CHECK(r.code == 2);
  CHECK(r.output.find("channels") != std::string::npos);

  json unknown = small_spec_json();
  unknown["chanels"] = 4;
  r = run("synth --spec " + q(write_json(dir / "unknown.json", unknown)) + " --out " + q(dir / "o2"));
  CHECK(r.code == 2);
  CHECK(r.output.find("chanels") != std::string::npos);
}

TEST_CASE("preprocess without operations keeps the payload byte-identical") {
  const auto dir = testing::temp_dir("cli-pre-noop");
  const auto e = patterned_epochs(6, 3, 10, 250, 3, 1);
  save_epochs(dir / "in.ubpe", e);
  const auto r = run("preprocess --in " + q(dir / "in.ubpe") + " --out " + q(dir / "out.ubpe"));
  CHECK(r.code == 0);
  CHECK(r.output.find("baseline correction skipped") != std::string::npos);
  CHECK(io::read_file(dir / "in.ubpe") == io::read_file(dir / "out.ubpe"));
}

TEST_CASE("preprocess reduces a 63-channel 1000 Hz recording to 17 channels at 250 Hz") {
  const auto dir = testing::temp_dir("cli-pre-default");
  const auto e = patterned_epochs(4, 63, 1000, 1000, 2, 2);
  save_epochs(dir / "raw.ubpe", e);
  const auto r = run("preprocess --in " + q(dir / "raw.ubpe") + " --out " + q(dir / "out.ubpe") +
                     " --channels visual17 --window 0:1000 --factor 4");
  REQUIRE(r.code == 0);
  const auto out = load_epochs(dir / "out.ubpe");
  CHECK(out.n_channels == 17);
  CHECK(out.sample_rate_hz == 250);
  CHECK(out.n_timepoints == 250);
  CHECK(out.n_samples == 4);
  // The first visual channel is the first name of the subset.
  const auto idx = resolve_channels(std::vector<std::string>{std::string(visual_channels17()[0])}, eeg63_montage());
  CHECK(out.at(1, 0, 1) == e.at(1, idx[0], 4));
}

TEST_CASE("preprocess averages repetitions per image") {
  const auto dir = testing::temp_dir("cli-pre-avg");
  save_epochs(dir / "test.ubpe", patterned_epochs(200 * 80, 2, 4, 250, 200, 3));
  REQUIRE(run("preprocess --in " + q(dir / "test.ubpe") + " --out " + q(dir / "avg.ubpe") + " --average").code == 0);
  const auto out = load_epochs(dir / "avg.ubpe");
  CHECK(out.n_samples == 200);
  CHECK(std::set<std::uint32_t>(out.image_ids.begin(), out.image_ids.end()).size() == 200);
}

TEST_CASE("preprocess errors name the failing stage") {
  const auto dir = testing::temp_dir("cli-pre-stage");
  save_epochs(dir / "in.ubpe", patterned_epochs(2, 3, 10, 250, 1, 4));
  auto r = run("preprocess --in " + q(dir / "in.ubpe") + " --out " + q(dir / "o.ubpe") + " --channels 7");
  CHECK(r.code == 1);
  CHECK(r.output.find("preprocess/select") != std::string::npos);
  r = run("preprocess --in " + q(dir / "missing.ubpe") + " --out " + q(dir / "o.ubpe"));
  CHECK(r.code == 1);
  CHECK(r.output.find("preprocess/load") != std::string::npos);
}

TEST_CASE("train then eval on noiseless data retrieves every test image") {
  const auto dir = testing::temp_dir("cli-train-eval");
  json spec = small_spec_json();
  spec["noise_sigma"] = 0.0;
  spec["attention_drift"] = 0.0;
  // Enough training images to pin down the linear map from recordings to features.
  spec["images_per_concept"] = 8;
  REQUIRE(run("synth --spec " + q(write_json(dir / "spec.json", spec)) + " --out " + q(dir / "data")).code == 0);
  const json cfg = {{"batch_size", 16}, {"epochs", 60}, {"lr", 3e-3}, {"patience", 100}, {"validation_fraction", 0.1}};
  auto r = run("train --config " + q(write_json(dir / "cfg.json", cfg)) + " --data " + q(dir / "data" / "train.ubpe") +
               " --features " + q(dir / "data" / "features.ubpf") + " --out " + q(dir / "model") + " --no-blur");
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(fs::exists(dir / "model" / "model.ubpc"));
  CHECK(fs::exists(dir / "model" / "train_log.jsonl"));
  const auto echo = read_json(dir / "model" / "config.json");
  CHECK(echo["config"]["uncertainty_blur"] == false);
  CHECK(echo["config"]["epochs"] == 60);

  r = run("eval --checkpoint " + q(dir / "model" / "model.ubpc") + " --data " + q(dir / "data" / "test.ubpe") +
          " --features " + q(dir / "data" / "features.ubpf") + " --out " + q(dir / "eval"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  const auto report = read_json(dir / "eval" / "report.json");
  CHECK(report["top1"].get<double>() == 100.0);
  CHECK(report["gallery_size"] == 4);
  CHECK(report["config_hash"] == echo["config_hash"]);
  CHECK(fs::exists(dir / "eval" / "ranks.csv"));

  SUBCASE("missing cache entry names the image id") {
    // Drop one test image and rebuild the cache from the remaining rasters.
    const auto test = load_epochs(dir / "data" / "test.ubpe");
    const auto missing = std::to_string(test.image_ids.front());
    fs::create_directories(dir / "partial");
    for (const auto& entry : fs::directory_iterator(dir / "data" / "images"))
      if (entry.path().stem() != missing) fs::copy_file(entry.path(), dir / "partial" / entry.path().filename());
    r = run("extract-features --images " + q(dir / "partial") + " --dim 16 --out " + q(dir / "partial.ubpf"));
    REQUIRE_MESSAGE(r.code == 0, r.output);
    r = run("eval --checkpoint " + q(dir / "model" / "model.ubpc") + " --data " + q(dir / "data" / "test.ubpe") +
            " --features " + q(dir / "partial.ubpf") + " --out " + q(dir / "eval2"));
    CHECK(r.code == 1);
    CHECK(r.output.find(missing) != std::string::npos);
  }

  SUBCASE("seed environment variable overrides the config") {
    r = run("train --config " + q(dir / "cfg.json") + " --epochs 1 --seed 3 --data " + q(dir / "data" / "train.ubpe") +
                " --features " + q(dir / "data" / "features.ubpf") + " --out " + q(dir / "model-env"),
            "UBP_SEED=42");
    REQUIRE_MESSAGE(r.code == 0, r.output);
    CHECK(read_json(dir / "model-env" / "config.json")["seed"] == 42);
  }
}

TEST_CASE("train rejects unknown config keys") {
  const auto dir = testing::temp_dir("cli-train-key");
  const auto cfg = write_json(dir / "cfg.json", json{{"batch_size", 16}, {"learning_rate", 0.1}});
  const auto r = run("train --config " + q(cfg) + " --data x.ubpe --features y.ubpf --out " + q(dir / "m"));
  CHECK(r.code == 2);
  CHECK(r.output.find("learning_rate") != std::string::npos);
}

TEST_CASE("report aggregates subjects into a table with a mean row") {
  const auto dir = testing::temp_dir("cli-report");
  std::string args = "report";
  for (int s = 1; s <= 3; ++s) {
    const json rep = {{"subject", "sub-0" + std::to_string(s)},
                      {"gallery_size", 200},
                      {"top1", 10.0 * s},
                      {"top5", 20.0 * s},
                      {"map", 5.0 * s},
                      {"mean_similarity", 0.1 * s},
                      {"mode", "intra"},
                      {"seed", 0},
                      {"config_hash", "0"}};
    const auto p = dir / ("r" + std::to_string(s) + ".json");
    io::write_text(p, rep.dump());
    args += " " + q(p);
  }
  const auto r = run(args + " --out " + q(dir / "table.csv"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  std::istringstream csv(io::read_text(dir / "table.csv"));
  std::vector<std::string> lines;
  for (std::string line; std::getline(csv, line);) lines.push_back(line);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "subject,gallery_size,top1,top5,map,mean_similarity");
  CHECK(lines[1].rfind("sub-01,200,10.00,20.00,", 0) == 0);
  CHECK(lines[4] == "mean,,20.00,40.00,10.00,0.2000");
}

TEST_CASE("unknown flags are errors and help lists every flag") {
  auto r = run("train --data a --features b --out c --bogus-flag");
  CHECK(r.code == 2);
  CHECK(r.output.find("bogus-flag") != std::string::npos);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);

  r = run("train --help");
  CHECK(r.code == 0);
  for (const char* flag : {"--config", "--data", "--features", "--out", "--epochs", "--batch-size", "--lr", "--seed",
                           "--mode", "--patience", "--held-out", "--flip", "--no-blur"})
    CHECK_MESSAGE(r.output.find(flag) != std::string::npos, flag);
}
