#include "sitext/corpus.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sitext/error.hpp"

namespace sitext {

namespace detail {
extern const std::string_view kStopwordsText;
}

Corpus::Corpus(std::vector<Document> documents, bool tokenized)
    : documents_(std::move(documents)), tokenized_(tokenized) {
  index_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const Document& doc = documents_[i];
    if (doc.id.empty()) {
      throw Error(ErrorCode::invalid_argument,
                  "document at position " + std::to_string(i) + " has an empty id");
    }
    if (!index_.emplace(doc.id, i).second) {
      throw Error(ErrorCode::invalid_argument, "duplicate document id \"" + doc.id + "\"");
    }
    if (doc.label) labels_.insert(*doc.label);
  }
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Document* Corpus::find(std::string_view id) const {
  auto i = index_of(id);
  return i ? &documents_[*i] : nullptr;
}

Corpus parse_jsonl(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::parse, where + ": malformed JSON (" + e.what() + ")");
    }
    if (!obj.is_object()) throw Error(ErrorCode::parse, where + ": expected a JSON object");

    auto id = obj.find("id");
    auto text = obj.find("text");
    if (id == obj.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
      throw Error(ErrorCode::parse, where + ": missing or empty string field \"id\"");
    }
    if (text == obj.end() || !text->is_string()) {
      throw Error(ErrorCode::parse, where + ": missing string field \"text\"");
    }

    Document doc;
    doc.id = id->get<std::string>();
    doc.text = text->get<std::string>();
    if (auto label = obj.find("label"); label != obj.end() && !label->is_null()) {
      if (!label->is_string()) throw Error(ErrorCode::parse, where + ": \"label\" must be a string");
      doc.label = label->get<std::string>();
    }

    if (auto [it, inserted] = seen.emplace(doc.id, line_no); !inserted) {
      throw Error(ErrorCode::parse, where + ": duplicate id \"" + doc.id +
                                        "\" (first seen on line " + std::to_string(it->second) + ")");
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs));
}

Corpus load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open corpus file " + path.string());
  try {
    return parse_jsonl(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words = [] {
    std::unordered_set<std::string> out;
    std::istringstream in{std::string(detail::kStopwordsText)};
    std::string word;
    while (in >> word) out.insert(word);
    return out;
  }();
  return words;
}

std::vector<std::string> tokenize(std::string_view text) {
  const auto& stop = stopwords();
  std::vector<std::string> tokens;
  std::string current;
  std::size_t code_points = 0;

  auto flush = [&] {
    if (code_points >= 2 && !stop.contains(current)) tokens.push_back(current);
    current.clear();
    code_points = 0;
  };

  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const int32_t length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    // Invalid sequences come back negative and act as separators.
    if (c >= 0 && (u_isalpha(c) || u_isdigit(c))) {
      const UChar32 lower = u_tolower(c);
      uint8_t buf[U8_MAX_LENGTH];
      int32_t n = 0;
      U8_APPEND_UNSAFE(buf, n, lower);
      current.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
      ++code_points;
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Corpus tokenize_corpus(const Corpus& corpus) {
  std::vector<Document> docs(corpus.documents().begin(), corpus.documents().end());
  for (Document& doc : docs) doc.tokens = tokenize(doc.text);
  return Corpus(std::move(docs), /*tokenized=*/true);
}

Corpus task_subset(const Corpus& corpus, std::string_view class_a, std::string_view class_b) {
  if (class_a == class_b) {
    throw Error(ErrorCode::invalid_argument,
                "task classes must differ (both are \"" + std::string(class_a) + "\")");
  }
  for (std::string_view label : {class_a, class_b}) {
    if (!corpus.label_set().contains(std::string(label))) {
      std::string available;
      for (const auto& l : corpus.label_set()) available += (available.empty() ? "" : ", ") + l;
      throw Error(ErrorCode::not_found, "unknown label \"" + std::string(label) +
                                            "\"; available labels: [" + available + "]");
    }
  }
  std::vector<Document> docs;
  for (const Document& doc : corpus.documents()) {
    if (doc.label && (*doc.label == class_a || *doc.label == class_b)) docs.push_back(doc);
  }
  return Corpus(std::move(docs), corpus.tokenized());
}

}  // namespace sitext
