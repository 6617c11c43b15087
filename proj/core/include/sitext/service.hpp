#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sitext/corpus.hpp"
#include "sitext/featurize.hpp"
#include "sitext/metric.hpp"
#include "sitext/wmds.hpp"

namespace sitext {

struct ServiceConfig {
  InversionOptions inversion;
  ProjectionOptions projection;
  std::size_t dims = kDefaultDims;
  std::size_t top_weight_count = 10;
  std::size_t tokens_per_bucket = 3;
};

/// One of the highest-weighted dimensions. For keyword features the tokens
/// are the most frequent corpus tokens hashing into the bucket, which is only
/// an approximate reading of a hashed dimension.
struct TopWeight {
  std::size_t dimension = 0;
  double weight = 0;
  std::vector<std::string> tokens;
};

/// Immutable view of a session at one revision.
struct SessionSnapshot {
  std::string session_id;
  std::string corpus;
  FeatureMode feature_mode = FeatureMode::keyword_hashed;
  std::uint64_t revision = 0;
  WeightVector weights = WeightVector::uniform(1);
  Layout2D layout;
  std::vector<Move> pinned;  // in pinning order
  std::vector<TopWeight> top_weights;
};

struct LayoutUpdate {
  std::shared_ptr<const SessionSnapshot> state;
  bool approximate = false;  // top-weight tokens are a heuristic
  bool replayed = false;     // identical retry of the last batch; nothing changed
};

struct WeightsDigest {
  std::size_t dims = 0;
  double min = 0;
  double max = 0;
  double entropy = 0;    // natural log; ln(dims) for uniform weights
  std::string checksum;  // FNV-1a-64 of the shortest decimal forms, hex
};

WeightsDigest digest(const WeightVector& w);

/// Owns the loaded corpora and all live sessions. Each session has a single
/// writer at a time; readers get the latest published snapshot without
/// taking the session's write lock.
class SessionManager {
 public:
  explicit SessionManager(ServiceConfig config = {});
  ~SessionManager();
  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  /// Registers a corpus (tokenized here if needed) under `name`.
  void add_corpus(std::string name, Corpus corpus);
  void set_embeddings(std::shared_ptr<const EmbeddingTable> table);

  std::vector<std::string> corpus_names() const;
  bool has_embeddings() const;

  /// Empty `corpus` selects the only registered corpus.
  std::string create_session(std::string_view corpus, FeatureMode mode);

  LayoutUpdate apply_interaction(std::string_view session_id, const InteractionBatch& batch);
  std::shared_ptr<const SessionSnapshot> get_state(std::string_view session_id) const;

  /// Un-pins documents; weights and layout are kept. Bumps the revision.
  std::shared_ptr<const SessionSnapshot> release(std::string_view session_id,
                                                 std::span<const std::string> doc_ids);
  /// Back to uniform weights, the initial layout and no pins. Bumps the revision.
  std::shared_ptr<const SessionSnapshot> reset(std::string_view session_id);

  /// Looks a document up in `corpus`, or in every corpus (registration order)
  /// when `corpus` is empty.
  const Document& document(std::string_view doc_id, std::string_view corpus = {}) const;
  const Corpus& corpus(std::string_view name) const;

  const ServiceConfig& config() const { return config_; }

 private:
  struct CorpusEntry;
  struct ModelCache;
  struct Session;

  CorpusEntry& corpus_entry(std::string_view name) const;
  std::shared_ptr<const ModelCache> model(CorpusEntry& entry, FeatureMode mode);
  std::shared_ptr<Session> session(std::string_view id) const;

  ServiceConfig config_;
  mutable std::shared_mutex corpora_mutex_;
  std::vector<std::unique_ptr<CorpusEntry>> corpora_;
  std::shared_ptr<const EmbeddingTable> embeddings_;

  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions_;
  std::uint64_t next_session_ = 1;
};

}  // namespace sitext
