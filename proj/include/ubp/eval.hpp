#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ubp/encoder.hpp"
#include "ubp/epoch.hpp"
#include "ubp/feature_cache.hpp"
#include "ubp/matrix.hpp"

namespace ubp {

struct RetrievalResult {
  std::vector<std::vector<std::size_t>> ranked;  // per query, gallery indices best first
  std::vector<std::size_t> true_rank;            // 1-based
  std::size_t gallery_size = 0;
};

// Sorts the gallery by descending inner product per query, ties by ascending
// gallery index. truth[q] is the gallery index paired with query q.
template <typename T>
RetrievalResult rank_gallery(const Matrix<T>& queries, const Matrix<T>& gallery, std::span<const std::size_t> truth);

namespace reference {
// Serial version of rank_gallery.
template <typename T>
RetrievalResult rank_gallery(const Matrix<T>& queries, const Matrix<T>& gallery, std::span<const std::size_t> truth);
}  // namespace reference

// Percent of queries whose true item ranks within the first k.
double topk_accuracy(const RetrievalResult& res, std::size_t k);
// With one relevant item per query, average precision is the reciprocal rank.
double map_score(const RetrievalResult& res);
// Mean cosine similarity of paired rows.
template <typename T>
double mean_similarity(const Matrix<T>& h_b, const Matrix<T>& h_v);

double pearson(std::span<const double> x, std::span<const double> y);
// Pearson on average ranks.
double spearman(std::span<const double> x, std::span<const double> y);
std::vector<double> average_ranks(std::span<const double> values);

enum class GalleryBlur { base, none };

struct EvalOptions {
  GalleryBlur gallery_blur = GalleryBlur::base;
  // Whether r0 - c discretizes to the identity; required for GalleryBlur::none.
  bool low_level_is_identity = true;
  EncoderOptions encoder;
  std::string subject;
  std::string mode = "intra";
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct EvalReport {
  std::string subject;
  std::string mode;
  std::size_t gallery_size = 0;
  double top1 = 0.0;
  double top5 = 0.0;
  double map = 0.0;
  double mean_similarity = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;

  RetrievalResult retrieval;
  std::vector<std::uint32_t> query_ids;
  std::vector<std::uint32_t> gallery_ids;

  // Fixed key order and number formatting; identical inputs give identical bytes.
  std::string to_json() const;
  // query_id,true_rank,top5_ids (ids separated by ';')
  std::string to_csv() const;
};

EvalReport parse_report_json(const std::string& text);

// Unique image ids in first-appearance order and the row of each query's id.
struct Gallery {
  std::vector<std::uint32_t> ids;
  std::vector<std::size_t> truth;
};
Gallery gallery_for(std::span<const std::uint32_t> query_ids);

MatrixF gallery_matrix(const FeatureCache& cache, std::span<const std::uint32_t> ids, RadiusBranch level);

// Encodes the brain samples (averaging repeated ids first) without dropout and
// ranks them against the gallery of their own images.
EvalReport evaluate(const EncoderParams<float>& params, const EpochTensor& test, const FeatureCache& gallery_cache,
                    const EvalOptions& opts);

}  // namespace ubp
