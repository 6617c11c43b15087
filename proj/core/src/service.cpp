#include "sitext/service.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "sitext/error.hpp"
#include "sitext/simharness.hpp"

namespace sitext {

struct SessionManager::ModelCache {
  FeatureMatrix features;
  Layout2D initial_layout;
  std::vector<std::vector<std::string>> bucket_tokens;  // keyword mode only
};

struct SessionManager::CorpusEntry {
  std::string name;
  Corpus corpus;
  std::mutex cache_mutex;
  std::map<FeatureMode, std::shared_ptr<const ModelCache>> cache;
};

struct SessionManager::Session {
  std::mutex writer;
  std::shared_ptr<const SessionSnapshot> snapshot;
  std::shared_ptr<const ModelCache> model;
  std::optional<InteractionBatch> last_batch;
  std::uint64_t last_batch_revision = 0;

  std::shared_ptr<const SessionSnapshot> load() const { return std::atomic_load(&snapshot); }
  void publish(std::shared_ptr<const SessionSnapshot> next) { std::atomic_store(&snapshot, std::move(next)); }
};

namespace {

std::vector<std::vector<std::string>> tokens_by_bucket(const Corpus& corpus, std::size_t dims,
                                                       std::size_t per_bucket) {
  std::unordered_map<std::string, std::size_t> freq;
  for (const Document& doc : corpus.documents()) {
    for (const std::string& t : doc.tokens) ++freq[t];
  }
  std::vector<std::vector<std::pair<std::size_t, std::string>>> buckets(dims);
  for (const auto& [token, count] : freq) buckets[hash_token(token, dims).bucket].emplace_back(count, token);

  std::vector<std::vector<std::string>> out(dims);
  for (std::size_t b = 0; b < dims; ++b) {
    auto& entries = buckets[b];
    std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    for (std::size_t i = 0; i < std::min(per_bucket, entries.size()); ++i) out[b].push_back(entries[i].second);
  }
  return out;
}

std::vector<TopWeight> top_weights(const WeightVector& w, std::size_t count,
                                   const std::vector<std::vector<std::string>>& bucket_tokens) {
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min(count, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) { return w[a] != w[b] ? w[a] > w[b] : a < b; });
  std::vector<TopWeight> out;
  for (std::size_t i = 0; i < keep; ++i) {
    TopWeight tw{order[i], w[order[i]], {}};
    if (!bucket_tokens.empty()) tw.tokens = bucket_tokens[order[i]];
    out.push_back(std::move(tw));
  }
  return out;
}

}  // namespace

WeightsDigest digest(const WeightVector& w) {
  WeightsDigest d;
  d.dims = w.size();
  d.min = w.values().minCoeff();
  d.max = w.values().maxCoeff();
  std::string text;
  for (std::size_t k = 0; k < w.size(); ++k) {
    d.entropy -= w[k] * std::log(w[k]);
    text += format_double(w[k]);
    text += ';';
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a64(text);
  d.checksum.assign(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) d.checksum[static_cast<std::size_t>(i)] = kHex[h & 0xF];
  return d;
}

SessionManager::SessionManager(ServiceConfig config) : config_(std::move(config)) {}
SessionManager::~SessionManager() = default;

void SessionManager::add_corpus(std::string name, Corpus corpus) {
  if (name.empty()) throw Error(ErrorCode::invalid_argument, "corpus name must not be empty");
  if (corpus.size() < 2) throw Error(ErrorCode::invalid_argument, "corpus \"" + name + "\" needs at least 2 documents");
  std::unique_lock lock(corpora_mutex_);
  for (const auto& c : corpora_) {
    if (c->name == name) throw Error(ErrorCode::invalid_argument, "corpus \"" + name + "\" already registered");
  }
  auto entry = std::make_unique<CorpusEntry>();
  entry->name = std::move(name);
  entry->corpus = corpus.tokenized() ? std::move(corpus) : tokenize_corpus(corpus);
  corpora_.push_back(std::move(entry));
}

void SessionManager::set_embeddings(std::shared_ptr<const EmbeddingTable> table) {
  std::unique_lock lock(corpora_mutex_);
  embeddings_ = std::move(table);
}

std::vector<std::string> SessionManager::corpus_names() const {
  std::shared_lock lock(corpora_mutex_);
  std::vector<std::string> names;
  for (const auto& c : corpora_) names.push_back(c->name);
  return names;
}

bool SessionManager::has_embeddings() const {
  std::shared_lock lock(corpora_mutex_);
  return embeddings_ != nullptr;
}

SessionManager::CorpusEntry& SessionManager::corpus_entry(std::string_view name) const {
  std::shared_lock lock(corpora_mutex_);
  if (name.empty()) {
    if (corpora_.size() == 1) return *corpora_.front();
    throw Error(ErrorCode::invalid_argument, "several corpora are loaded; name one");
  }
  for (const auto& c : corpora_) {
    if (c->name == name) return *c;
  }
  throw Error(ErrorCode::not_found, "unknown corpus \"" + std::string(name) + "\"");
}

const Corpus& SessionManager::corpus(std::string_view name) const { return corpus_entry(name).corpus; }

std::shared_ptr<const SessionManager::ModelCache> SessionManager::model(CorpusEntry& entry,
                                                                        FeatureMode mode) {
  std::lock_guard lock(entry.cache_mutex);
  if (auto it = entry.cache.find(mode); it != entry.cache.end()) return it->second;

  auto cache = std::make_shared<ModelCache>();
  if (mode == FeatureMode::keyword_hashed) {
    cache->features = tfidf_hashed(entry.corpus, config_.dims);
    cache->bucket_tokens = tokens_by_bucket(entry.corpus, config_.dims, config_.tokens_per_bucket);
  } else {
    std::shared_ptr<const EmbeddingTable> table;
    {
      std::shared_lock guard(corpora_mutex_);
      table = embeddings_;
    }
    if (!table) throw Error(ErrorCode::precondition, "embedding table unavailable");
    cache->features = embed_average(entry.corpus, *table, config_.dims).features;
  }
  cache->initial_layout =
      forward_project(cache->features, WeightVector::uniform(config_.dims), nullptr, config_.projection)
          .layout;
  entry.cache.emplace(mode, cache);
  return cache;
}

std::string SessionManager::create_session(std::string_view corpus_name, FeatureMode mode) {
  CorpusEntry& entry = corpus_entry(corpus_name);
  auto cache = model(entry, mode);

  auto snapshot = std::make_shared<SessionSnapshot>();
  snapshot->corpus = entry.name;
  snapshot->feature_mode = mode;
  snapshot->weights = WeightVector::uniform(config_.dims);
  snapshot->layout = cache->initial_layout;
  snapshot->top_weights = top_weights(snapshot->weights, config_.top_weight_count, cache->bucket_tokens);

  auto session = std::make_shared<Session>();
  session->model = std::move(cache);

  std::unique_lock lock(sessions_mutex_);
  snapshot->session_id = "s" + std::to_string(next_session_++);
  const std::string id = snapshot->session_id;
  session->snapshot = std::move(snapshot);
  sessions_.emplace(id, std::move(session));
  return id;
}

std::shared_ptr<SessionManager::Session> SessionManager::session(std::string_view id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::not_found, "unknown session \"" + std::string(id) + "\"");
  return it->second;
}

std::shared_ptr<const SessionSnapshot> SessionManager::get_state(std::string_view session_id) const {
  return session(session_id)->load();
}

LayoutUpdate SessionManager::apply_interaction(std::string_view session_id, const InteractionBatch& batch) {
  auto s = session(session_id);
  std::lock_guard lock(s->writer);
  const auto current = s->load();
  const ModelCache& model = *s->model;
  const bool keyword = current->feature_mode == FeatureMode::keyword_hashed;

  batch.validate();
  if (batch.moves.empty()) throw Error(ErrorCode::invalid_argument, "interaction has no moves");
  const Corpus& docs = corpus(current->corpus);
  for (const Move& m : batch.moves) {
    if (!docs.index_of(m.doc_id)) throw Error(ErrorCode::not_found, "unknown document \"" + m.doc_id + "\"");
  }

  if (s->last_batch && *s->last_batch == batch && s->last_batch_revision == current->revision) {
    return {current, keyword, true};
  }

  std::vector<Move> pinned = current->pinned;
  for (const Move& m : batch.moves) {
    auto it = std::find_if(pinned.begin(), pinned.end(), [&](const Move& p) { return p.doc_id == m.doc_id; });
    if (it != pinned.end()) {
      it->target = m.target;
    } else {
      pinned.push_back(m);
    }
  }
  if (pinned.size() < 2) {
    throw Error(ErrorCode::precondition, "at least 2 documents must be pinned to learn weights");
  }

  InversionResult inv = invert_weights(model.features, pinned, current->weights, config_.inversion);

  // The analyst's drags are part of the starting layout.
  Layout2D init = current->layout;
  for (const Move& p : pinned) {
    init.positions.row(static_cast<Eigen::Index>(*docs.index_of(p.doc_id))) = p.target.transpose();
  }
  ProjectionResult proj = forward_project(model.features, inv.weights, &init, config_.projection);

  auto next = std::make_shared<SessionSnapshot>(*current);
  next->revision = current->revision + 1;
  next->weights = std::move(inv.weights);
  next->layout = std::move(proj.layout);
  next->pinned = std::move(pinned);
  next->top_weights = top_weights(next->weights, config_.top_weight_count, model.bucket_tokens);

  s->last_batch = batch;
  s->last_batch_revision = next->revision;
  s->publish(next);
  return {std::move(next), keyword, false};
}

std::shared_ptr<const SessionSnapshot> SessionManager::release(std::string_view session_id,
                                                               std::span<const std::string> doc_ids) {
  auto s = session(session_id);
  std::lock_guard lock(s->writer);
  const auto current = s->load();
  const Corpus& docs = corpus(current->corpus);
  for (const std::string& id : doc_ids) {
    if (!docs.index_of(id)) throw Error(ErrorCode::not_found, "unknown document \"" + id + "\"");
  }
  auto next = std::make_shared<SessionSnapshot>(*current);
  std::erase_if(next->pinned, [&](const Move& p) {
    return std::find(doc_ids.begin(), doc_ids.end(), p.doc_id) != doc_ids.end();
  });
  next->revision = current->revision + 1;
  s->last_batch.reset();
  s->publish(next);
  return next;
}

std::shared_ptr<const SessionSnapshot> SessionManager::reset(std::string_view session_id) {
  auto s = session(session_id);
  std::lock_guard lock(s->writer);
  const auto current = s->load();
  auto next = std::make_shared<SessionSnapshot>(*current);
  next->revision = current->revision + 1;
  next->weights = WeightVector::uniform(config_.dims);
  next->layout = s->model->initial_layout;
  next->pinned.clear();
  next->top_weights = top_weights(next->weights, config_.top_weight_count, s->model->bucket_tokens);
  s->last_batch.reset();
  s->publish(next);
  return next;
}

const Document& SessionManager::document(std::string_view doc_id, std::string_view corpus_name) const {
  if (!corpus_name.empty()) {
    if (const Document* d = corpus_entry(corpus_name).corpus.find(doc_id)) return *d;
  } else {
    std::shared_lock lock(corpora_mutex_);
    for (const auto& c : corpora_) {
      if (const Document* d = c->corpus.find(doc_id)) return *d;
    }
  }
  throw Error(ErrorCode::not_found, "unknown document \"" + std::string(doc_id) + "\"");
}

}  // namespace sitext
