#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sitext/corpus.hpp"

namespace sitext {

inline constexpr std::size_t kDefaultDims = 300;

enum class FeatureMode { keyword_hashed, embedding_average };

/// "keyword" or "embedding".
std::string_view to_string(FeatureMode mode);
/// Accepts the short names and the long enum spellings.
FeatureMode parse_feature_mode(std::string_view name);

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n x dims document representation aligned to doc_ids.
struct FeatureMatrix {
  FeatureMode mode = FeatureMode::keyword_hashed;
  RowMatrix rows;
  std::vector<std::string> doc_ids;

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
  std::size_t dims() const { return static_cast<std::size_t>(rows.cols()); }
  std::span<const double> row(std::size_t i) const {
    return {rows.data() + i * dims(), dims()};
  }
};

std::uint64_t fnv1a64(std::string_view bytes);

struct HashedToken {
  std::size_t bucket;
  int sign;  // +1 or -1

  bool operator==(const HashedToken&) const = default;
};

/// bucket = FNV-1a-64(token) mod dims; sign is -1 when bit 63 is set.
HashedToken hash_token(std::string_view token, std::size_t dims);

/// Per-column min-max scaling into [0,1]; zero-spread columns become 0.
RowMatrix minmax_normalize(const RowMatrix& raw);

/// Signed hashed TF-IDF with tf = 1 + ln(count) and
/// idf = ln((1 + N) / (1 + df)) + 1, min-max normalized per dimension.
FeatureMatrix tfidf_hashed(const Corpus& corpus, std::size_t dims = kDefaultDims);

/// Word -> vector table in GloVe text format. Vectors are stored as float to
/// keep full-vocabulary tables within a few hundred megabytes.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dims = kDefaultDims) : dims_(dims) {}

  std::size_t dims() const { return dims_; }
  std::size_t size() const { return index_.size(); }

  /// Returns false (and leaves the table unchanged) if the word exists.
  bool insert(std::string word, std::span<const float> vector);
  std::optional<std::span<const float>> find(const std::string& word) const;

 private:
  std::size_t dims_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> storage_;
};

struct EmbeddingLoadOptions {
  /// When set, only these words are kept (every line is still validated).
  const std::unordered_set<std::string>* vocabulary = nullptr;
};

struct EmbeddingLoadResult {
  EmbeddingTable table;
  std::vector<std::string> warnings;
};

EmbeddingLoadResult load_embedding_table(const std::filesystem::path& path,
                                         std::size_t dims = kDefaultDims,
                                         const EmbeddingLoadOptions& options = {});
EmbeddingLoadResult parse_embedding_table(std::istream& in, std::size_t dims = kDefaultDims,
                                          const EmbeddingLoadOptions& options = {});

struct EmbeddingFeatures {
  FeatureMatrix features;
  /// Ids of documents without a single in-vocabulary token (zero rows).
  std::vector<std::string> oov_documents;
};

/// Occurrence-weighted mean of the in-vocabulary token vectors of each
/// document, min-max normalized per dimension.
EmbeddingFeatures embed_average(const Corpus& corpus, const EmbeddingTable& table,
                                std::size_t dims = kDefaultDims);

/// Distinct tokens of the corpus; handy as an EmbeddingLoadOptions filter.
std::unordered_set<std::string> vocabulary(const Corpus& corpus);

/// CSV with header "doc_id,f0,...,f{d-1}".
void write_feature_csv(const FeatureMatrix& features, std::ostream& out);

}  // namespace sitext
