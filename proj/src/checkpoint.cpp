#include "ubp/checkpoint.hpp"

#include <cmath>

#include "ubp/binary_io.hpp"
#include "ubp/error.hpp"

namespace ubp {

namespace {
constexpr std::uint32_t kCheckpointVersion = 1;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  io::ByteWriter w;
  w.magic("UBPC");
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(ckpt.params.input_dim()));
  w.u32(static_cast<std::uint32_t>(ckpt.params.proj_dim()));
  auto params = ckpt.params;
  for_each_tensor(params, [&](std::string_view, std::span<float> t, bool) { w.f32_array(t); });

  w.u8(ckpt.state ? 1 : 0);
  if (ckpt.state) {
    const auto& s = *ckpt.state;
    w.u64(s.optimizer.step);
    for (std::size_t i = 0; i < s.optimizer.m.size(); ++i) {
      w.f32_array(s.optimizer.m[i]);
      w.f32_array(s.optimizer.v[i]);
    }
    w.f64(s.tracker.mu_hat);
    w.f64(s.tracker.var_hat);
    w.f64(s.tracker.momentum);
    w.f64(s.tracker.z);
    w.u64(s.tracker.warmup_batches);
    w.u64(s.tracker.batches_seen);
    w.f64(s.radius.r0());
    w.f64(s.radius.c());
    w.u32(static_cast<std::uint32_t>(s.radius.size()));
    for (auto b : s.radius.branches()) w.u8(static_cast<std::uint8_t>(b));
    w.u32(s.epochs_done);
  }
  w.string(ckpt.config_json);
  return w.bytes();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "UBPC checkpoint");
  r.expect_magic("UBPC");
  const auto version = r.u32();
  if (version != kCheckpointVersion) throw FormatError("UBPC checkpoint: unsupported version " + std::to_string(version));
  const std::size_t in = r.u32(), d = r.u32();
  if (in == 0 || d == 0) throw FormatError("UBPC checkpoint: zero dimension");
  Checkpoint ckpt;
  auto& p = ckpt.params;
  p.w1 = MatrixF(in, d);
  p.b1 = MatrixF(1, d);
  p.w2 = MatrixF(d, d);
  p.b2 = MatrixF(1, d);
  p.ln_gain = MatrixF(1, d);
  p.ln_bias = MatrixF(1, d);
  for_each_tensor(p, [&](std::string_view, std::span<float> t, bool) {
    auto v = r.f32_array(t.size());
    for (float x : v) {
      if (!std::isfinite(x)) throw FormatError("UBPC checkpoint: non-finite parameter");
    }
    std::copy(v.begin(), v.end(), t.begin());
  });
  if (r.u8()) {
    TrainingState s;
    s.optimizer = make_adamw_state(p);
    s.optimizer.step = r.u64();
    for (std::size_t i = 0; i < s.optimizer.m.size(); ++i) {
      s.optimizer.m[i] = r.f32_array(s.optimizer.m[i].size());
      s.optimizer.v[i] = r.f32_array(s.optimizer.v[i].size());
    }
    s.tracker.mu_hat = r.f64();
    s.tracker.var_hat = r.f64();
    s.tracker.momentum = r.f64();
    s.tracker.z = r.f64();
    s.tracker.warmup_batches = r.u64();
    s.tracker.batches_seen = r.u64();
    const double r0 = r.f64(), c = r.f64();
    const auto n = r.u32();
    s.radius = RadiusTable(n, r0, c);
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto b = r.u8();
      if (b > 2) throw FormatError("UBPC checkpoint: bad radius branch byte");
      s.radius.set(i, static_cast<RadiusBranch>(b));
    }
    s.epochs_done = r.u32();
    ckpt.state = std::move(s);
  }
  ckpt.config_json = r.string();
  r.expect_end();
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  io::write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return decode_checkpoint(io::read_file(path));
  } catch (const FormatError& err) {
    throw FormatError(path.string() + ": " + err.what());
  }
}

}  // namespace ubp
