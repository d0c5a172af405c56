#include "ubp/uncertainty.hpp"

#include <cmath>
#include <string>

#include "ubp/error.hpp"

namespace ubp {

BatchStats batch_stats(std::span<const double> scores) {
  require(scores.size() >= 2, "batch_stats: need at least two scores");
  const double n = static_cast<double>(scores.size());
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  return {mean, ss / (n - 1.0)};
}

SimilarityTracker tracker_update(SimilarityTracker t, std::span<const double> scores) {
  const BatchStats b = batch_stats(scores);
  if (t.batches_seen == 0) {
    t.mu_hat = b.mean;
    t.var_hat = b.var;
  } else {
    t.mu_hat = t.momentum * t.mu_hat + (1.0 - t.momentum) * b.mean;
    t.var_hat = t.momentum * t.var_hat + (1.0 - t.momentum) * b.var;
  }
  ++t.batches_seen;
  return t;
}

Interval confidence_interval(const SimilarityTracker& t) {
  if (!t.ready()) {
    throw NotReady("similarity tracker has seen " + std::to_string(t.batches_seen) + " of " +
                   std::to_string(t.warmup_batches) + " warmup batches");
  }
  const double half = t.z * std::sqrt(std::max(t.var_hat, 0.0));
  return {t.mu_hat - half, t.mu_hat + half};
}

RadiusBranch classify_score(double s, Interval ci, bool flip) {
  require(ci.lo <= ci.hi, "classify_score: interval lower bound exceeds upper bound");
  if (s < ci.lo) return flip ? RadiusBranch::high : RadiusBranch::low;
  if (s > ci.hi) return flip ? RadiusBranch::low : RadiusBranch::high;
  return RadiusBranch::base;
}

double branch_radius(RadiusBranch b, double r0, double c) {
  switch (b) {
    case RadiusBranch::low:
      return r0 - c;
    case RadiusBranch::high:
      return r0 + c;
    case RadiusBranch::base:
      break;
  }
  return r0;
}

double assign_radius(double s, double lo, double hi, double r0, double c, bool flip) {
  return branch_radius(classify_score(s, {lo, hi}, flip), r0, c);
}

RadiusTable::RadiusTable(std::size_t n_samples, double r0, double c)
    : r0_(r0), c_(c), branch_(n_samples, RadiusBranch::base) {}

double RadiusTable::radius(std::size_t id) const { return branch_radius(branch(id), r0_, c_); }

RadiusBranch RadiusTable::branch(std::size_t id) const {
  require(id < branch_.size(), "radius table: unknown sample id " + std::to_string(id));
  return branch_[id];
}

void RadiusTable::set(std::size_t id, RadiusBranch b) {
  require(id < branch_.size(), "radius table: unknown sample id " + std::to_string(id));
  branch_[id] = b;
}

std::array<std::size_t, 3> RadiusTable::histogram() const {
  std::array<std::size_t, 3> h{};
  for (auto b : branch_) ++h[static_cast<std::size_t>(b)];
  return h;
}

std::array<std::size_t, 3> update_radius_table(RadiusTable& table, std::span<const std::size_t> ids,
                                               std::span<const double> scores, const SimilarityTracker& t,
                                               bool flip) {
  require(ids.size() == scores.size(), "update_radius_table: ids and scores differ in length");
  std::array<std::size_t, 3> counts{};
  if (ids.empty()) return counts;
  for (auto id : ids) require(id < table.size(), "update_radius_table: unknown sample id " + std::to_string(id));
  const Interval ci = confidence_interval(t);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto b = classify_score(scores[i], ci, flip);
    table.set(ids[i], b);
    ++counts[static_cast<std::size_t>(b)];
  }
  return counts;
}

}  // namespace ubp
