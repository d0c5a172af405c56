#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "ubp/error.hpp"
#include "ubp/uncertainty.hpp"

using namespace ubp;

TEST_CASE("batch_stats") {
  const std::vector<double> flat{1, 1, 1};
  CHECK(batch_stats(flat).mean == 1.0);
  CHECK(batch_stats(flat).var == 0.0);
  const std::vector<double> two{0, 2};
  CHECK(batch_stats(two).mean == 1.0);
  CHECK(batch_stats(two).var == 2.0);

  Rng rng(16);
  std::vector<double> draws(1000);
  for (double& v : draws) v = rng.normal(0.16, 0.02);
  const auto s = batch_stats(draws);
  CHECK(std::abs(s.mean - 0.16) < 0.003);
  CHECK(std::abs(std::sqrt(s.var) - 0.02) < 0.003);

  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(batch_stats(one), ContractViolation);
}

TEST_CASE("tracker_update") {
  SimilarityTracker t;
  const std::vector<double> first{0, 2};
  t = tracker_update(t, first);
  CHECK(t.mu_hat == 1.0);
  CHECK(t.var_hat == 2.0);
  CHECK(t.batches_seen == 1);

  SimilarityTracker prior;
  prior.mu_hat = 1.0;
  prior.var_hat = 2.0;
  prior.batches_seen = 3;
  const std::vector<double> batch{2, 2};
  const auto next = tracker_update(prior, batch);
  CHECK(std::abs(next.mu_hat - 1.1) < 1e-12);
  CHECK(std::abs(next.var_hat - 1.8) < 1e-12);

  // Constant stream: geometric convergence with ratio m.
  SimilarityTracker c;
  c = tracker_update(c, first);
  const std::vector<double> constant{0.3, 0.3, 0.3};
  for (int k = 1; k <= 50; ++k) {
    c = tracker_update(c, constant);
    CHECK(std::abs(c.mu_hat - (0.3 + (1.0 - 0.3) * std::pow(0.9, k))) < 1e-12);
    CHECK(std::abs(c.var_hat - 2.0 * std::pow(0.9, k)) < 1e-12);
  }
}

TEST_CASE("confidence_interval") {
  SimilarityTracker t;
  t.mu_hat = 0.16;
  t.var_hat = 0.02 * 0.02;
  t.batches_seen = 1;
  auto ci = confidence_interval(t);
  CHECK(std::abs(ci.lo - 0.1208) < 1e-12);
  CHECK(std::abs(ci.hi - 0.1992) < 1e-12);

  t.var_hat = 0.0;
  ci = confidence_interval(t);
  CHECK(ci.lo == 0.16);
  CHECK(ci.hi == 0.16);

  t.var_hat = 1.0;
  t.z = 0.0;
  ci = confidence_interval(t);
  CHECK(ci.lo == 0.16);
  CHECK(ci.hi == 0.16);

  SimilarityTracker fresh;
  CHECK_THROWS_AS(confidence_interval(fresh), NotReady);
  fresh.warmup_batches = 3;
  fresh.batches_seen = 2;
  CHECK_THROWS_AS(confidence_interval(fresh), NotReady);
  fresh.batches_seen = 3;
  CHECK_NOTHROW(confidence_interval(fresh));
}

TEST_CASE("assign_radius branches") {
  const double lo = 0.1208, hi = 0.1992;
  CHECK(assign_radius(0.10, lo, hi, 0.25, 10, false) == -9.75);
  CHECK(assign_radius(0.25, lo, hi, 0.25, 10, false) == 10.25);
  CHECK(assign_radius(0.16, lo, hi, 0.25, 10, false) == 0.25);
  CHECK(assign_radius(lo, lo, hi, 0.25, 10, false) == 0.25);
  CHECK(assign_radius(hi, lo, hi, 0.25, 10, false) == 0.25);
  CHECK(assign_radius(std::nextafter(lo, 0.0), lo, hi, 0.25, 10, false) == -9.75);
  CHECK(assign_radius(std::nextafter(hi, 1.0), lo, hi, 0.25, 10, false) == 10.25);

  CHECK(assign_radius(0.10, lo, hi, 0.25, 10, true) == 10.25);
  CHECK(assign_radius(0.25, lo, hi, 0.25, 10, true) == -9.75);
  CHECK(assign_radius(lo, lo, hi, 0.25, 10, true) == 0.25);

  CHECK(assign_radius(0.5, 0.5, 0.5, 0.25, 10, false) == 0.25);
  CHECK_THROWS_AS(assign_radius(0.1, 0.3, 0.2, 0.25, 10, false), ContractViolation);
}

TEST_CASE("assign_radius is a non-decreasing step function") {
  double previous = -1e9;
  for (int i = -100; i <= 400; ++i) {
    const double r = assign_radius(i / 1000.0, 0.1208, 0.1992, 0.25, 10, false);
    CHECK(r >= previous);
    previous = r;
  }
}

TEST_CASE("RadiusTable") {
  RadiusTable table(5, 0.25, 10);
  CHECK(table.histogram() == std::array<std::size_t, 3>{0, 5, 0});
  CHECK(table.radius(0) == 0.25);
  table.set(2, RadiusBranch::high);
  CHECK(table.radius(2) == 10.25);
  CHECK_THROWS_AS(table.radius(5), ContractViolation);
  CHECK_THROWS_AS(table.set(9, RadiusBranch::low), ContractViolation);
}

TEST_CASE("update_radius_table") {
  SimilarityTracker t;
  t.mu_hat = 0.16;
  t.var_hat = 0.0004;
  t.batches_seen = 1;

  RadiusTable table(6, 0.25, 10);
  const RadiusTable before = table;
  CHECK(update_radius_table(table, {}, {}, t) == std::array<std::size_t, 3>{0, 0, 0});
  CHECK(table == before);

  // An empty batch is a no-op even before warmup.
  SimilarityTracker cold;
  CHECK_NOTHROW(update_radius_table(table, {}, {}, cold));

  const std::vector<std::size_t> inside_ids{0, 1};
  const std::vector<double> inside{0.15, 0.17};
  update_radius_table(table, inside_ids, inside, t);
  CHECK(table.radius(0) == 0.25);
  CHECK(table.radius(1) == 0.25);

  const std::vector<std::size_t> ids{3, 1, 5, 4};
  const std::vector<double> scores{0.05, 0.3, 0.1208, 0.2};
  const auto counts = update_radius_table(table, ids, scores, t);
  CHECK(counts == std::array<std::size_t, 3>{1, 1, 2});
  const auto ci = confidence_interval(t);
  for (std::size_t k = 0; k < ids.size(); ++k)
    CHECK(table.radius(ids[k]) == assign_radius(scores[k], ci.lo, ci.hi, 0.25, 10, false));
  CHECK(table.radius(2) == 0.25);

  const std::vector<std::size_t> bad_ids{6};
  const std::vector<double> bad_scores{0.1};
  CHECK_THROWS_AS(update_radius_table(table, bad_ids, bad_scores, t), ContractViolation);
  const std::vector<double> short_scores{};
  CHECK_THROWS_AS(update_radius_table(table, bad_ids, short_scores, t), ContractViolation);
}

TEST_CASE("radius support after random updates") {
  Rng rng(21);
  RadiusTable table(200, 0.25, 10);
  SimilarityTracker t;
  for (int step = 0; step < 2000; ++step) {
    std::vector<double> scores(8);
    std::vector<std::size_t> ids(8);
    for (std::size_t k = 0; k < 8; ++k) {
      scores[k] = rng.normal(0.2, 0.1);
      ids[k] = rng.below(200);
    }
    t = tracker_update(t, scores);
    update_radius_table(table, ids, scores, t, step % 2 == 0);
  }
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double r = table.radius(i);
    CHECK((r == -9.75 || r == 0.25 || r == 10.25));
  }
}
