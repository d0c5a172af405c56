#include "ubp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "ubp/error.hpp"

namespace ubp {

namespace {

template <typename T>
void rank_one(const Matrix<T>& queries, const Matrix<T>& gallery, std::span<const std::size_t> truth, std::size_t q,
              RetrievalResult& out) {
  const std::size_t g = gallery.rows();
  std::vector<double> score(g);
  auto qr = queries.row(q);
  for (std::size_t j = 0; j < g; ++j) {
    auto gr = gallery.row(j);
    double acc = 0.0;
    for (std::size_t k = 0; k < qr.size(); ++k) acc += static_cast<double>(qr[k]) * static_cast<double>(gr[k]);
    score[j] = acc;
  }
  auto& order = out.ranked[q];
  order.resize(g);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  const auto pos = std::find(order.begin(), order.end(), truth[q]);
  out.true_rank[q] = static_cast<std::size_t>(pos - order.begin()) + 1;
}

template <typename T>
RetrievalResult prepare(const Matrix<T>& queries, const Matrix<T>& gallery, std::span<const std::size_t> truth) {
  require(queries.cols() == gallery.cols(), "rank_gallery: embedding dimensions differ");
  require(gallery.rows() >= 2, "rank_gallery: gallery needs at least two items");
  require(truth.size() == queries.rows(), "rank_gallery: one truth index per query required");
  for (auto t : truth) require(t < gallery.rows(), "rank_gallery: truth index out of range");
  RetrievalResult out;
  out.gallery_size = gallery.rows();
  out.ranked.resize(queries.rows());
  out.true_rank.resize(queries.rows());
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

template <typename T>
RetrievalResult rank_gallery(const Matrix<T>& queries, const Matrix<T>& gallery, std::span<const std::size_t> truth) {
  RetrievalResult out = prepare(queries, gallery, truth);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t q = 0; q < static_cast<std::ptrdiff_t>(queries.rows()); ++q) {
    rank_one(queries, gallery, truth, static_cast<std::size_t>(q), out);
  }
  return out;
}

namespace reference {
template <typename T>
RetrievalResult rank_gallery(const Matrix<T>& queries, const Matrix<T>& gallery, std::span<const std::size_t> truth) {
  RetrievalResult out = prepare(queries, gallery, truth);
  for (std::size_t q = 0; q < queries.rows(); ++q) rank_one(queries, gallery, truth, q, out);
  return out;
}
template RetrievalResult rank_gallery(const MatrixF&, const MatrixF&, std::span<const std::size_t>);
template RetrievalResult rank_gallery(const MatrixD&, const MatrixD&, std::span<const std::size_t>);
}  // namespace reference

template RetrievalResult rank_gallery(const MatrixF&, const MatrixF&, std::span<const std::size_t>);
template RetrievalResult rank_gallery(const MatrixD&, const MatrixD&, std::span<const std::size_t>);

double topk_accuracy(const RetrievalResult& res, std::size_t k) {
  require(k >= 1, "topk_accuracy: k must be >= 1");
  if (res.true_rank.empty()) return 0.0;
  const auto hits = std::count_if(res.true_rank.begin(), res.true_rank.end(), [k](std::size_t r) { return r <= k; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(res.true_rank.size());
}

double map_score(const RetrievalResult& res) {
  if (res.true_rank.empty()) return 0.0;
  double acc = 0.0;
  for (auto r : res.true_rank) acc += 1.0 / static_cast<double>(r);
  return 100.0 * acc / static_cast<double>(res.true_rank.size());
}

template <typename T>
double mean_similarity(const Matrix<T>& h_b, const Matrix<T>& h_v) {
  require(h_b.rows() == h_v.rows() && h_b.cols() == h_v.cols(), "mean_similarity: shapes differ");
  require(h_b.rows() >= 1, "mean_similarity: no pairs");
  double total = 0.0;
  for (std::size_t i = 0; i < h_b.rows(); ++i) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < h_b.cols(); ++k) {
      const double a = h_b(i, k), b = h_v(i, k);
      dot += a * b;
      na += a * a;
      nb += b * b;
    }
    if (na == 0.0 || nb == 0.0) throw DegenerateInput("mean_similarity: zero embedding");
    total += dot / std::sqrt(na * nb);
  }
  return total / static_cast<double>(h_b.rows());
}
template double mean_similarity(const MatrixF&, const MatrixF&);
template double mean_similarity(const MatrixD&, const MatrixD&);

double pearson(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "pearson: lengths differ");
  require(x.size() >= 3, "pearson: need at least three points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "spearman: lengths differ");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

std::string EvalReport::to_json() const {
  // Keys in sorted order, numbers at fixed precision.
  std::ostringstream out;
  out << "{\"config_hash\":" << nlohmann::json(config_hash).dump() << ",\"gallery_size\":" << gallery_size
      << ",\"map\":" << fmt(map) << ",\"mean_similarity\":" << fmt(mean_similarity)
      << ",\"mode\":" << nlohmann::json(mode).dump() << ",\"seed\":" << seed
      << ",\"subject\":" << nlohmann::json(subject).dump() << ",\"top1\":" << fmt(top1) << ",\"top5\":" << fmt(top5)
      << "}\n";
  return out.str();
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "query_id,true_rank,top5_ids\n";
  for (std::size_t q = 0; q < retrieval.true_rank.size(); ++q) {
    out << query_ids[q] << "," << retrieval.true_rank[q] << ",";
    const auto& order = retrieval.ranked[q];
    for (std::size_t k = 0; k < std::min<std::size_t>(5, order.size()); ++k) {
      if (k) out << ';';
      out << gallery_ids[order[k]];
    }
    out << "\n";
  }
  return out.str();
}

EvalReport parse_report_json(const std::string& text) {
  EvalReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.subject = j.at("subject").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.gallery_size = j.at("gallery_size").get<std::size_t>();
    r.top1 = j.at("top1").get<double>();
    r.top5 = j.at("top5").get<double>();
    r.map = j.at("map").get<double>();
    r.mean_similarity = j.at("mean_similarity").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("report JSON: ") + e.what());
  }
  return r;
}

Gallery gallery_for(std::span<const std::uint32_t> query_ids) {
  Gallery g;
  std::unordered_map<std::uint32_t, std::size_t> slot;
  for (auto id : query_ids) {
    auto [it, inserted] = slot.try_emplace(id, g.ids.size());
    if (inserted) g.ids.push_back(id);
    g.truth.push_back(it->second);
  }
  return g;
}

MatrixF gallery_matrix(const FeatureCache& cache, std::span<const std::uint32_t> ids, RadiusBranch level) {
  MatrixF out(ids.size(), cache.dim());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto v = cache.lookup(ids[i], level);
    std::copy(v.begin(), v.end(), out.row(i).begin());
  }
  return out;
}

EvalReport evaluate(const EncoderParams<float>& params, const EpochTensor& test, const FeatureCache& gallery_cache,
                    const EvalOptions& opts) {
  if (test.n_samples == 0) throw DataError("evaluate: test set is empty");
  if (gallery_cache.dim() != params.proj_dim()) {
    throw FormatError("evaluate: feature dim " + std::to_string(gallery_cache.dim()) + " != encoder output dim " +
                      std::to_string(params.proj_dim()));
  }
  if (opts.gallery_blur == GalleryBlur::none && !opts.low_level_is_identity) {
    throw ConfigError("gallery blur 'none' needs an unblurred level in the cache (r0 - c < 1)");
  }
  const EpochTensor averaged = average_repetitions(test);
  const Gallery g = gallery_for(averaged.image_ids);
  const RadiusBranch level = opts.gallery_blur == GalleryBlur::base ? RadiusBranch::base : RadiusBranch::low;
  const MatrixF gallery = gallery_matrix(gallery_cache, g.ids, level);

  Rng unused(0);
  EncoderOptions enc = opts.encoder;
  enc.normalize_embeddings = true;  // cosine ranking regardless of training setting
  const auto fwd = forward(params, to_matrix(averaged), false, unused, enc);

  EvalReport r;
  r.subject = opts.subject.empty() ? test.subject_id : opts.subject;
  r.mode = opts.mode;
  r.seed = opts.seed;
  r.config_hash = opts.config_hash;
  r.retrieval = rank_gallery(fwd.h, gallery, g.truth);
  r.gallery_size = g.ids.size();
  r.top1 = topk_accuracy(r.retrieval, 1);
  r.top5 = topk_accuracy(r.retrieval, 5);
  r.map = map_score(r.retrieval);
  r.mean_similarity = mean_similarity(fwd.h, gather_rows(gallery, g.truth));
  r.query_ids = averaged.image_ids;
  r.gallery_ids = g.ids;
  return r;
}

}  // namespace ubp
