#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sitext {

struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> label;
  std::vector<std::string> tokens;
};

/// Ordered, immutable document collection. Construction rejects empty or
/// duplicate ids; the label set is derived from the documents.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Document> documents, bool tokenized = false);

  std::span<const Document> documents() const { return documents_; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

  const std::set<std::string>& label_set() const { return labels_; }

  /// True once tokens have been filled by tokenize_corpus().
  bool tokenized() const { return tokenized_; }

  std::optional<std::size_t> index_of(std::string_view id) const;
  const Document* find(std::string_view id) const;

 private:
  std::vector<Document> documents_;
  std::set<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
  bool tokenized_ = false;
};

/// Reads one JSON object per line with keys "id", "text" and optional
/// "label". Blank lines are ignored; errors name the 1-based line number.
Corpus load_jsonl(const std::filesystem::path& path);
Corpus parse_jsonl(std::istream& in);

/// Lowercased maximal runs of Unicode letters and digits, at least two code
/// points long, with the bundled stopwords removed.
std::vector<std::string> tokenize(std::string_view text);

Corpus tokenize_corpus(const Corpus& corpus);

/// Documents labelled class_a or class_b, in corpus order.
Corpus task_subset(const Corpus& corpus, std::string_view class_a,
                   std::string_view class_b);

const std::unordered_set<std::string>& stopwords();

}  // namespace sitext
