#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sitext/corpus.hpp"
#include "sitext/featurize.hpp"
#include "sitext/random.hpp"
#include "sitext/wmds.hpp"

namespace sitext {

enum class PinningPolicy {
  cumulative,   // every document moved so far stays pinned
  newest_only,  // only the latest batch constrains the inversion
};

/// A simulated analysis: drag documents of class_a to corner_a and documents
/// of class_b to corner_b, a few per class per iteration.
struct TaskSpec {
  std::string name;
  std::string class_a;
  std::string class_b;
  Eigen::Vector2d corner_a{0.0, 0.0};
  Eigen::Vector2d corner_b{1.0, 1.0};
  int docs_per_class_per_iter = 5;
  int iterations = 10;
  int runs = 10;
  std::uint64_t base_seed = 42;
  FeatureMode feature_mode = FeatureMode::embedding_average;
  int knn_k = 3;
  int cv_folds = 5;
  double lambda = 0.5;
  std::size_t dims = kDefaultDims;
  PinningPolicy pinning = PinningPolicy::cumulative;
  /// Refresh the 2D layout after every update (inspection only; accuracy is
  /// measured in the weighted feature space either way).
  bool project_layouts = true;
};

/// Built-in tasks: rec, religion, sys, vis. Returns nullopt for other names.
std::optional<TaskSpec> task_preset(std::string_view name);
std::vector<std::string> task_preset_names();

struct AccuracyTrace {
  std::string task;
  FeatureMode feature_mode = FeatureMode::embedding_average;
  std::uint64_t run_seed = 0;
  std::vector<double> per_iteration;

  bool operator==(const AccuracyTrace&) const = default;
};

struct SummaryRow {
  std::string task;
  FeatureMode feature_mode = FeatureMode::embedding_average;
  double final_acc_mean = 0;
  double final_acc_std = 0;
  double overall_acc_mean = 0;
  double overall_acc_std = 0;
  std::size_t runs = 0;
};

/// Per-run sampling state: the documents of each class not yet moved.
struct RunState {
  std::vector<std::string> unmoved_a;
  std::vector<std::string> unmoved_b;
  Eigen::Vector2d corner_a{0.0, 0.0};
  Eigen::Vector2d corner_b{1.0, 1.0};
  int per_class = 5;
};

/// Draws per_class unmoved documents of each class uniformly without
/// replacement and removes them from the state. Class-a moves come first.
InteractionBatch sample_interaction(RunState& state, Rng& rng);

/// Extra outputs of a simulation that are not part of the accuracy traces.
struct RunDiagnostics {
  std::uint64_t run_seed = 0;
  std::vector<WeightVector> weights;  // after each iteration
  std::vector<Layout2D> layouts;      // after each iteration, when projected
  std::vector<std::string> oov_documents;
};

struct RunTaskOptions {
  /// Called after every iteration with (run index, iteration, accuracy).
  std::function<void(int, int, double)> progress;
  /// When set, filled with one entry per run.
  std::vector<RunDiagnostics>* diagnostics = nullptr;
};

/// Checks the TaskSpec invariants against the task corpus.
void validate_task(const TaskSpec& spec, const Corpus& task_corpus);

/// Runs spec.runs independent simulations (seed = base_seed + r). The corpus
/// may be raw or tokenized; it is reduced to the task's two classes first.
std::vector<AccuracyTrace> run_task(const TaskSpec& spec, const Corpus& corpus,
                                    const EmbeddingTable* embeddings,
                                    const RunTaskOptions& options = {});

/// Same loop over precomputed features (rows aligned to `labels`).
std::vector<AccuracyTrace> run_task_on_features(const TaskSpec& spec,
                                                const FeatureMatrix& features,
                                                std::span<const std::string> labels,
                                                const RunTaskOptions& options = {});

SummaryRow summarize(std::span<const AccuracyTrace> traces);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Mean accuracy per iteration across traces.
std::vector<double> mean_curve(std::span<const AccuracyTrace> traces);

// Result files ---------------------------------------------------------------

void write_traces_csv(std::span<const AccuracyTrace> traces, std::ostream& out);
void write_summary_csv(std::span<const SummaryRow> rows, std::ostream& out);
std::vector<AccuracyTrace> read_traces_csv(std::istream& in);

/// Writes traces.csv and summary.csv into `dir` (created if missing), rows
/// sorted by (task, mode, seed, iteration).
void write_results(std::span<const SummaryRow> summaries, std::span<const AccuracyTrace> traces,
                   const std::filesystem::path& dir);

/// "x,y" rows per document, for inspecting simulated layouts.
void write_layout_csv(const Layout2D& layout, std::ostream& out);

std::string format_double(double value);

}  // namespace sitext
