#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace ubp {

struct BatchStats {
  double mean = 0.0;
  double var = 0.0;  // unbiased, divisor n-1
};

BatchStats batch_stats(std::span<const double> scores);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Running Gaussian model of paired similarity scores. The mean and variance
// are smoothed across batches with an exponential moving average.
struct SimilarityTracker {
  double mu_hat = 0.0;
  double var_hat = 0.0;
  double momentum = 0.9;
  double z = 1.96;
  std::size_t warmup_batches = 0;
  std::size_t batches_seen = 0;

  bool ready() const { return batches_seen > 0 && batches_seen >= warmup_batches; }

  friend bool operator==(const SimilarityTracker&, const SimilarityTracker&) = default;
};

// First batch initializes directly; later batches blend with `momentum`.
SimilarityTracker tracker_update(SimilarityTracker t, std::span<const double> scores);

// Throws NotReady before warmup completes.
Interval confidence_interval(const SimilarityTracker& t);

enum class RadiusBranch : std::size_t { low = 0, base = 1, high = 2 };

// s < lo -> r0 - c, s > hi -> r0 + c, lo <= s <= hi -> r0.
// `flip` swaps the two outer branches.
RadiusBranch classify_score(double s, Interval ci, bool flip);
double assign_radius(double s, double lo, double hi, double r0, double c, bool flip);

// Per-training-sample blur radius. Entries only ever take r0 - c, r0, r0 + c.
class RadiusTable {
 public:
  RadiusTable() = default;
  RadiusTable(std::size_t n_samples, double r0, double c);

  std::size_t size() const { return branch_.size(); }
  double r0() const { return r0_; }
  double c() const { return c_; }

  double radius(std::size_t id) const;
  RadiusBranch branch(std::size_t id) const;
  void set(std::size_t id, RadiusBranch b);
  std::array<std::size_t, 3> histogram() const;

  std::span<const RadiusBranch> branches() const { return branch_; }

  friend bool operator==(const RadiusTable&, const RadiusTable&) = default;

 private:
  double r0_ = 0.25;
  double c_ = 10.0;
  std::vector<RadiusBranch> branch_;
};

double branch_radius(RadiusBranch b, double r0, double c);

// Replaces each visited entry with the branch of its current score.
// Returns per-branch counts of the assignments made.
std::array<std::size_t, 3> update_radius_table(RadiusTable& table, std::span<const std::size_t> ids,
                                               std::span<const double> scores, const SimilarityTracker& t,
                                               bool flip = false);

}  // namespace ubp
