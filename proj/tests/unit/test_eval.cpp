#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ranking_oracle.hpp"
#include "support.hpp"
#include "ubp/error.hpp"
#include "ubp/eval.hpp"

using namespace ubp;
using namespace ubp::testing;

namespace {

RetrievalResult from_ranks(std::vector<std::size_t> ranks, std::size_t g) {
  RetrievalResult r;
  r.true_rank = std::move(ranks);
  r.gallery_size = g;
  r.ranked.assign(r.true_rank.size(), {});
  return r;
}

double definitional_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_CASE("rank_gallery hand cases") {
  Rng rng(1);
  const auto g = l2_normalize_rows(random_matrix<double>(6, 4, rng));
  std::vector<std::size_t> truth(6);
  std::iota(truth.begin(), truth.end(), 0);
  const auto self = rank_gallery(g, g, truth);
  for (auto r : self.true_rank) CHECK(r == 1);

  const auto eye = MatrixD::identity(5);
  const auto q = gather_rows(eye, std::vector<std::size_t>{3});
  const std::vector<std::size_t> t3{3};
  const auto res = rank_gallery(q, eye, t3);
  CHECK(res.true_rank[0] == 1);
  CHECK(res.ranked[0] == std::vector<std::size_t>{3, 0, 1, 2, 4});

  CHECK_THROWS_AS(rank_gallery(MatrixD(1, 3), MatrixD(4, 2), t3), ContractViolation);
  const std::vector<std::size_t> t9{9};
  CHECK_THROWS_AS(rank_gallery(MatrixD(1, 2), MatrixD(4, 2), t9), ContractViolation);
}

TEST_CASE("rank_gallery equals brute force for every gallery size up to 50") {
  Rng rng(2);
  for (std::size_t gsize = 2; gsize <= 50; ++gsize) {
    const std::size_t dim = 1 + rng.below(8);
    auto gallery = random_matrix<double>(gsize, dim, rng);
    // Duplicate a row now and then to exercise tie-breaking.
    if (gsize > 3) {
      const auto src = gallery.row(0);
      std::copy(src.begin(), src.end(), gallery.row(gsize - 1).begin());
    }
    const auto queries = random_matrix<double>(5, dim, rng);
    std::vector<std::size_t> truth(5);
    for (auto& t : truth) t = rng.below(gsize);
    const auto res = rank_gallery(queries, gallery, truth);
    CHECK(res.gallery_size == gsize);
    for (std::size_t qi = 0; qi < 5; ++qi) {
      const auto oracle = brute_ranks(queries, gallery, qi);
      CHECK(res.true_rank[qi] == oracle[truth[qi]]);
      for (std::size_t pos = 0; pos < gsize; ++pos) CHECK(oracle[res.ranked[qi][pos]] == pos + 1);
    }
    const auto ref = reference::rank_gallery(queries, gallery, truth);
    CHECK(ref.ranked == res.ranked);
    CHECK(ref.true_rank == res.true_rank);
  }
}

TEST_CASE("topk_accuracy and map_score") {
  CHECK(topk_accuracy(from_ranks({1, 1, 1}, 5), 1) == 100.0);
  CHECK(std::abs(topk_accuracy(from_ranks({1, 3, 7}, 10), 5) - 200.0 / 3.0) < 1e-12);
  CHECK(std::abs(map_score(from_ranks({1, 2, 4}, 10)) - 100.0 * 1.75 / 3.0) < 1e-12);
  CHECK(map_score(from_ranks({1, 1}, 4)) == 100.0);
  CHECK(map_score(from_ranks({4, 4}, 4)) == 25.0);
  CHECK_THROWS_AS(topk_accuracy(from_ranks({1}, 3), 0), ContractViolation);

  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const std::size_t g = 2 + rng.below(30);
    std::vector<std::size_t> ranks(20);
    for (auto& r : ranks) r = 1 + rng.below(g);
    const auto res = from_ranks(ranks, g);
    double prev = 0.0;
    for (std::size_t k = 1; k <= g; ++k) {
      CHECK(topk_accuracy(res, k) >= prev);
      prev = topk_accuracy(res, k);
    }
    CHECK(topk_accuracy(res, g) == 100.0);
    CHECK(map_score(res) >= topk_accuracy(res, 1));
    CHECK(map_score(res) >= 100.0 / double(g) - 1e-12);
    CHECK(map_score(res) <= 100.0);
  }
}

TEST_CASE("mean_similarity") {
  Rng rng(4);
  const auto a = l2_normalize_rows(random_matrix<double>(10, 6, rng));
  CHECK(std::abs(mean_similarity(a, a) - 1.0) < 1e-12);
  const auto e = MatrixD::identity(4);
  const auto shifted = MatrixD::from_rows({{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}});
  CHECK(mean_similarity(e, shifted) == 0.0);
  const auto x = l2_normalize_rows(random_matrix<double>(200, 1024, rng));
  const auto y = l2_normalize_rows(random_matrix<double>(200, 1024, rng));
  CHECK(std::abs(mean_similarity(x, y)) < 0.05);
  CHECK_THROWS_AS(mean_similarity(MatrixD(2, 3), MatrixD(3, 3)), ContractViolation);
}

TEST_CASE("pearson and spearman") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  std::vector<double> lin, cube;
  for (double v : x) {
    lin.push_back(2 * v + 1);
    cube.push_back(-v * v * v);
  }
  CHECK(std::abs(pearson(x, lin) - 1.0) < 1e-12);
  CHECK(std::abs(spearman(x, lin) - 1.0) < 1e-12);
  CHECK(pearson(x, cube) < 0.0);
  CHECK(pearson(x, cube) > -1.0);
  CHECK(std::abs(spearman(x, cube) + 1.0) < 1e-12);

  const std::vector<double> a{0.3, -1.2, 2.5, 0.8, 0.0, 1.1, -0.4, 3.3, 0.9, -2.0};
  const std::vector<double> b{1.0, -0.5, 2.0, 0.7, 0.2, 0.4, -1.1, 2.8, 1.5, -1.9};
  CHECK(std::abs(pearson(a, b) - definitional_pearson(a, b)) < 1e-12);

  std::vector<double> affine, monotone;
  for (double v : a) {
    affine.push_back(3.5 * v - 7.0);
    monotone.push_back(std::exp(v));
  }
  CHECK(std::abs(pearson(affine, b) - pearson(a, b)) < 1e-12);
  CHECK(std::abs(spearman(affine, b) - spearman(a, b)) < 1e-12);
  CHECK(std::abs(spearman(monotone, b) - spearman(a, b)) < 1e-12);

  const std::vector<double> ties{1, 2, 2, 3};
  CHECK(average_ranks(ties) == std::vector<double>{1, 2.5, 2.5, 4});

  const std::vector<double> flat{1, 1, 1};
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(pearson(flat, three), DegenerateInput);
  CHECK_THROWS_AS(spearman(flat, three), DegenerateInput);
  const std::vector<double> two{1, 2};
  CHECK_THROWS_AS(pearson(two, two), ContractViolation);
}

TEST_CASE("random 200-way gallery sits near chance") {
  Rng rng(5);
  const auto gallery = l2_normalize_rows(random_matrix<double>(200, 32, rng));
  const auto queries = l2_normalize_rows(random_matrix<double>(2000, 32, rng));
  std::vector<std::size_t> truth(2000);
  for (auto& t : truth) t = rng.below(200);
  const double top1 = topk_accuracy(rank_gallery(queries, gallery, truth), 1);
  CHECK(top1 >= 0.0);
  CHECK(top1 <= 1.5);
}

TEST_CASE("gallery_for") {
  const std::vector<std::uint32_t> ids{7, 3, 7, 9, 3};
  const auto g = gallery_for(ids);
  CHECK(g.ids == std::vector<std::uint32_t>{7, 3, 9});
  CHECK(g.truth == std::vector<std::size_t>{0, 1, 0, 2, 1});
}

TEST_CASE("report serialization") {
  EvalReport r;
  r.subject = "sub-01";
  r.mode = "intra";
  r.gallery_size = 3;
  r.top1 = 100.0 / 3.0;
  r.top5 = 100.0;
  r.map = 61.111111;
  r.mean_similarity = 0.1234567;
  r.seed = 42;
  r.config_hash = "00ff";
  r.query_ids = {5, 6, 7};
  r.gallery_ids = {5, 6, 7};
  r.retrieval.true_rank = {1, 2, 3};
  r.retrieval.gallery_size = 3;
  r.retrieval.ranked = {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};

  const auto json = r.to_json();
  CHECK(json.find("\"top1\":33.333333") != std::string::npos);
  CHECK(json.find("\"mean_similarity\":0.123457") != std::string::npos);
  CHECK(json.find("\"config_hash\"") < json.find("\"gallery_size\""));
  CHECK(json == r.to_json());

  const auto back = parse_report_json(json);
  CHECK(back.subject == "sub-01");
  CHECK(back.gallery_size == 3);
  CHECK(back.seed == 42);
  CHECK(std::abs(back.top1 - 33.333333) < 1e-9);
  CHECK(back.to_json() == json);

  const auto csv = r.to_csv();
  CHECK(csv.rfind("query_id,true_rank,top5_ids\n", 0) == 0);
  CHECK(csv.find("6,2,5;6;7\n") != std::string::npos);

  CHECK_THROWS_AS(parse_report_json("{\"top1\": 1}"), FormatError);
  CHECK_THROWS_AS(parse_report_json("not json"), FormatError);
}
