#include "sitext/featurize.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include "sitext/error.hpp"

namespace sitext {

std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::keyword_hashed ? "keyword" : "embedding";
}

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "keyword" || name == "keyword_hashed") return FeatureMode::keyword_hashed;
  if (name == "embedding" || name == "embedding_average") return FeatureMode::embedding_average;
  throw Error(ErrorCode::invalid_argument,
              "unknown feature mode \"" + std::string(name) + "\" (expected keyword or embedding)");
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

HashedToken hash_token(std::string_view token, std::size_t dims) {
  if (token.empty()) throw Error(ErrorCode::invalid_argument, "cannot hash an empty token");
  if (dims == 0) throw Error(ErrorCode::invalid_argument, "hash dimension must be positive");
  const std::uint64_t h = fnv1a64(token);
  return {static_cast<std::size_t>(h % dims), (h >> 63) == 0 ? 1 : -1};
}

RowMatrix minmax_normalize(const RowMatrix& raw) {
  if (raw.rows() == 0) throw Error(ErrorCode::invalid_argument, "cannot normalize an empty matrix");
  if (!raw.allFinite()) throw Error(ErrorCode::invalid_argument, "matrix has non-finite entries");
  RowMatrix out(raw.rows(), raw.cols());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    const double lo = raw.col(j).minCoeff();
    const double hi = raw.col(j).maxCoeff();
    if (hi > lo) {
      out.col(j) = (raw.col(j).array() - lo) / (hi - lo);
    } else {
      out.col(j).setZero();
    }
  }
  return out;
}

namespace {

void require_tokenized(const Corpus& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::invalid_argument, "corpus is empty");
  if (!corpus.tokenized()) {
    throw Error(ErrorCode::precondition, "corpus must be tokenized before featurization");
  }
}

std::vector<std::string> doc_ids_of(const Corpus& corpus) {
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (const Document& doc : corpus.documents()) ids.push_back(doc.id);
  return ids;
}

// Sorted (token, count) pairs; sorting fixes the floating-point summation
// order inside each hash bucket.
std::vector<std::pair<std::string_view, int>> term_counts(const Document& doc) {
  std::vector<std::string_view> sorted(doc.tokens.begin(), doc.tokens.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<std::string_view, int>> counts;
  for (std::string_view t : sorted) {
    if (!counts.empty() && counts.back().first == t) {
      ++counts.back().second;
    } else {
      counts.emplace_back(t, 1);
    }
  }
  return counts;
}

}  // namespace

FeatureMatrix tfidf_hashed(const Corpus& corpus, std::size_t dims) {
  require_tokenized(corpus);
  if (dims == 0) throw Error(ErrorCode::invalid_argument, "dims must be positive");

  std::vector<std::vector<std::pair<std::string_view, int>>> counts;
  counts.reserve(corpus.size());
  std::unordered_map<std::string_view, int> df;
  for (const Document& doc : corpus.documents()) {
    counts.push_back(term_counts(doc));
    for (const auto& [token, c] : counts.back()) ++df[token];
  }

  const double n_docs = static_cast<double>(corpus.size());
  RowMatrix raw = RowMatrix::Zero(static_cast<Eigen::Index>(corpus.size()),
                                  static_cast<Eigen::Index>(dims));
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (const auto& [token, c] : counts[i]) {
      const double tf = 1.0 + std::log(static_cast<double>(c));
      const double idf = std::log((1.0 + n_docs) / (1.0 + df[token])) + 1.0;
      const HashedToken h = hash_token(token, dims);
      raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(h.bucket)) += h.sign * tf * idf;
    }
  }
  return FeatureMatrix{FeatureMode::keyword_hashed, minmax_normalize(raw), doc_ids_of(corpus)};
}

bool EmbeddingTable::insert(std::string word, std::span<const float> vector) {
  if (vector.size() != dims_) {
    throw Error(ErrorCode::invalid_argument, "embedding for \"" + word + "\" has " +
                                                 std::to_string(vector.size()) + " values, expected " +
                                                 std::to_string(dims_));
  }
  for (float v : vector) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::invalid_argument, "embedding for \"" + word + "\" is not finite");
    }
  }
  auto [it, inserted] = index_.emplace(std::move(word), storage_.size() / std::max<std::size_t>(dims_, 1));
  if (!inserted) return false;
  storage_.insert(storage_.end(), vector.begin(), vector.end());
  return true;
}

std::optional<std::span<const float>> EmbeddingTable::find(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return std::span<const float>(storage_.data() + it->second * dims_, dims_);
}

EmbeddingLoadResult parse_embedding_table(std::istream& in, std::size_t dims,
                                          const EmbeddingLoadOptions& options) {
  if (dims == 0) throw Error(ErrorCode::invalid_argument, "dims must be positive");
  EmbeddingLoadResult result{EmbeddingTable(dims), {}};
  std::vector<std::string_view> fields;
  std::vector<float> values(dims);
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    fields.clear();
    std::string_view rest(line);
    while (!rest.empty()) {
      const auto space = rest.find(' ');
      std::string_view field = rest.substr(0, space);
      if (!field.empty()) fields.push_back(field);
      if (space == std::string_view::npos) break;
      rest.remove_prefix(space + 1);
    }
    if (fields.size() != dims + 1) {
      throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": expected a word and " +
                                        std::to_string(dims) + " numbers, found " +
                                        std::to_string(fields.empty() ? 0 : fields.size() - 1) +
                                        " numbers");
    }

    std::string word(fields[0]);
    if (options.vocabulary && !options.vocabulary->contains(word)) continue;

    for (std::size_t k = 0; k < dims; ++k) {
      const std::string_view f = fields[k + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[k]);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(values[k])) {
        throw Error(ErrorCode::parse, "line " + std::to_string(line_no) + ": invalid number \"" +
                                          std::string(f) + "\"");
      }
    }
    if (!result.table.insert(word, values)) {
      result.warnings.push_back("line " + std::to_string(line_no) + ": duplicate word \"" + word +
                                "\"; keeping the first vector");
    }
  }
  return result;
}

EmbeddingLoadResult load_embedding_table(const std::filesystem::path& path, std::size_t dims,
                                         const EmbeddingLoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open embedding file " + path.string());
  try {
    return parse_embedding_table(in, dims, options);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

EmbeddingFeatures embed_average(const Corpus& corpus, const EmbeddingTable& table,
                                std::size_t dims) {
  require_tokenized(corpus);
  if (table.dims() != dims) {
    throw Error(ErrorCode::invalid_argument, "embedding table has " + std::to_string(table.dims()) +
                                                 " dimensions, expected " + std::to_string(dims));
  }
  EmbeddingFeatures out;
  RowMatrix raw = RowMatrix::Zero(static_cast<Eigen::Index>(corpus.size()),
                                  static_cast<Eigen::Index>(dims));
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Document& doc = corpus[i];
    std::size_t found = 0;
    auto row = raw.row(static_cast<Eigen::Index>(i));
    for (const std::string& token : doc.tokens) {
      if (auto vec = table.find(token)) {
        for (std::size_t k = 0; k < dims; ++k) row(static_cast<Eigen::Index>(k)) += (*vec)[k];
        ++found;
      }
    }
    if (found == 0) {
      out.oov_documents.push_back(doc.id);
    } else {
      row /= static_cast<double>(found);
    }
  }
  out.features = FeatureMatrix{FeatureMode::embedding_average, minmax_normalize(raw),
                               doc_ids_of(corpus)};
  return out;
}

std::unordered_set<std::string> vocabulary(const Corpus& corpus) {
  std::unordered_set<std::string> words;
  for (const Document& doc : corpus.documents()) words.insert(doc.tokens.begin(), doc.tokens.end());
  return words;
}

void write_feature_csv(const FeatureMatrix& features, std::ostream& out) {
  out << "doc_id";
  for (std::size_t k = 0; k < features.dims(); ++k) out << ",f" << k;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < features.size(); ++i) {
    out << features.doc_ids[i];
    for (double v : features.row(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
}

}  // namespace sitext
