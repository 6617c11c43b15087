// Exports a corpus' feature matrix as CSV (doc_id, f0, f1, ...).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "sitext/error.hpp"
#include "sitext/featurize.hpp"

int main(int argc, char** argv) {
  std::string corpus_path, mode = "keyword", glove, out, classes;
  std::size_t dims = sitext::kDefaultDims;
  CLI::App app{"Write keyword or embedding features of a corpus as CSV"};
  app.add_option("--corpus", corpus_path, "JSONL corpus")->required();
  app.add_option("--features", mode, "keyword or embedding")->check(CLI::IsMember({"keyword", "embedding"}));
  app.add_option("--glove", glove, "GloVe text file (embedding features)");
  app.add_option("--dims", dims, "feature dimensionality")->check(CLI::PositiveNumber);
  app.add_option("--task", classes, "restrict to two labels \"a,b\"");
  app.add_option("--out", out, "output CSV (stdout when omitted)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    sitext::Corpus corpus = sitext::load_jsonl(corpus_path);
    if (!classes.empty()) {
      const auto comma = classes.find(',');
      if (comma == std::string::npos) throw sitext::Error(sitext::ErrorCode::invalid_argument, "--task needs \"a,b\"");
      corpus = sitext::task_subset(corpus, classes.substr(0, comma), classes.substr(comma + 1));
    }
    corpus = sitext::tokenize_corpus(corpus);

    sitext::FeatureMatrix features;
    if (sitext::parse_feature_mode(mode) == sitext::FeatureMode::keyword_hashed) {
      features = sitext::tfidf_hashed(corpus, dims);
    } else {
      if (glove.empty()) throw sitext::Error(sitext::ErrorCode::invalid_argument, "embedding features need --glove");
      const auto vocab = sitext::vocabulary(corpus);
      auto loaded = sitext::load_embedding_table(glove, dims, {&vocab});
      for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
      auto ef = sitext::embed_average(corpus, loaded.table, dims);
      if (!ef.oov_documents.empty()) {
        std::cerr << "warning: " << ef.oov_documents.size() << " documents have no embedded tokens\n";
      }
      features = std::move(ef.features);
    }

    if (out.empty()) {
      sitext::write_feature_csv(features, std::cout);
    } else {
      std::ofstream file(out);
      if (!file) throw sitext::Error(sitext::ErrorCode::io, "cannot write " + out);
      sitext::write_feature_csv(features, file);
    }
  } catch (const sitext::Error& e) {
    std::cerr << "si-features: " << e.what() << '\n';
    return e.code() == sitext::ErrorCode::io ? 1 : 2;
  }
  return 0;
}
