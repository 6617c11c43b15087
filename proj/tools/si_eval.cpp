// Simulated-interaction evaluation: drags documents of two classes to
// opposite corners, re-learns the weights after every batch and records
// k-NN accuracy per iteration.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <iostream>

#include "sitext/error.hpp"
#include "sitext/simharness.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 1;

struct Args {
  std::string corpus;
  std::string task;
  std::vector<std::string> features{"embedding"};
  std::string glove;
  int iters = 10;
  int per_class = 5;
  int runs = 10;
  std::uint64_t seed = 42;
  double lambda = 0.5;
  int folds = 5;
  int k = 3;
  std::size_t dims = sitext::kDefaultDims;
  std::string out = "results";
  bool newest_only = false;
  bool no_layouts = false;
  bool quiet = false;
};

sitext::TaskSpec make_spec(const Args& a) {
  sitext::TaskSpec spec;
  if (auto preset = sitext::task_preset(a.task)) {
    spec = *preset;
  } else {
    const auto comma = a.task.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == a.task.size()) {
      throw sitext::Error(sitext::ErrorCode::invalid_argument,
                          "--task must be a preset (rec, religion, sys, vis) or two labels \"a,b\"");
    }
    spec.class_a = a.task.substr(0, comma);
    spec.class_b = a.task.substr(comma + 1);
    spec.name = spec.class_a + "_vs_" + spec.class_b;
  }
  spec.iterations = a.iters;
  spec.docs_per_class_per_iter = a.per_class;
  spec.runs = a.runs;
  spec.base_seed = a.seed;
  spec.lambda = a.lambda;
  spec.cv_folds = a.folds;
  spec.knn_k = a.k;
  spec.dims = a.dims;
  spec.pinning = a.newest_only ? sitext::PinningPolicy::newest_only : sitext::PinningPolicy::cumulative;
  spec.project_layouts = !a.no_layouts;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  Args a;
  CLI::App app{"Simulate drag interactions and report k-NN accuracy per iteration"};
  app.add_option("--corpus", a.corpus, "JSONL corpus with id, text and label fields")->required();
  app.add_option("--task", a.task, "preset name or \"class_a,class_b\"")->required();
  app.add_option("--features", a.features, "keyword, embedding, or both comma-separated")
      ->delimiter(',')
      ->check(CLI::IsMember({"keyword", "embedding"}));
  app.add_option("--glove", a.glove, "GloVe text file (embedding features)");
  app.add_option("--iters", a.iters, "interaction iterations per run")->check(CLI::NonNegativeNumber);
  app.add_option("--per-class", a.per_class, "documents moved per class per iteration")->check(CLI::PositiveNumber);
  app.add_option("--runs", a.runs, "independent runs")->check(CLI::PositiveNumber);
  app.add_option("--seed", a.seed, "base seed; run r uses seed + r");
  app.add_option("--lambda", a.lambda, "proximal regularization weight")->check(CLI::NonNegativeNumber);
  app.add_option("--folds", a.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  app.add_option("--k", a.k, "neighbours for k-NN")->check(CLI::PositiveNumber);
  app.add_option("--dims", a.dims, "feature dimensionality")->check(CLI::PositiveNumber);
  app.add_option("--out", a.out, "output directory for traces.csv and summary.csv");
  app.add_flag("--newest-only", a.newest_only, "pin only the latest batch instead of every moved document");
  app.add_flag("--no-layouts", a.no_layouts, "skip the 2D re-projection after each update");
  app.add_flag("-q,--quiet", a.quiet, "no per-iteration progress");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  sitext::TaskSpec base;
  sitext::Corpus subset;
  std::shared_ptr<sitext::EmbeddingTable> table;
  try {
    base = make_spec(a);
    subset = sitext::tokenize_corpus(sitext::task_subset(sitext::load_jsonl(a.corpus), base.class_a, base.class_b));
    sitext::validate_task(base, subset);
    const bool wants_embedding = std::find(a.features.begin(), a.features.end(), "embedding") != a.features.end();
    if (wants_embedding) {
      if (a.glove.empty()) {
        throw sitext::Error(sitext::ErrorCode::invalid_argument, "embedding features need --glove");
      }
      const auto vocab = sitext::vocabulary(subset);
      auto loaded = sitext::load_embedding_table(a.glove, a.dims, {&vocab});
      for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
      table = std::make_shared<sitext::EmbeddingTable>(std::move(loaded.table));
    }
  } catch (const sitext::Error& e) {
    std::cerr << "si-eval: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    std::vector<sitext::AccuracyTrace> all;
    std::vector<sitext::SummaryRow> rows;
    for (const std::string& mode : a.features) {
      sitext::TaskSpec spec = base;
      spec.feature_mode = sitext::parse_feature_mode(mode);
      sitext::RunTaskOptions opts;
      if (!a.quiet) {
        opts.progress = [&](int run, int it, double acc) {
          std::fprintf(stderr, "%s %s run %d iter %d acc %.4f\n", spec.name.c_str(), mode.c_str(), run + 1,
                       it + 1, acc);
        };
      }
      auto traces = sitext::run_task(spec, subset, table.get(), opts);
      if (spec.iterations > 0) rows.push_back(sitext::summarize(traces));
      all.insert(all.end(), traces.begin(), traces.end());
    }
    sitext::write_results(rows, all, a.out);
    sitext::write_summary_csv(rows, std::cout);
  } catch (const sitext::Error& e) {
    std::cerr << "si-eval: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
