#include "sitext/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sitext/error.hpp"
#include "sitext/metric.hpp"

namespace sitext {

namespace {

struct Preset {
  const char* name;
  const char* class_a;
  const char* class_b;
};

constexpr Preset kPresets[] = {
    {"rec", "rec.autos", "rec.motorcycles"},
    {"religion", "talk.religion.misc", "soc.religion.christian"},
    {"sys", "comp.sys.mac.hardware", "comp.sys.ibm.pc.hardware"},
    {"vis", "InfoVis", "VAST"},
};

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::vector<std::string> draw(std::vector<std::string>& pool, int count, Rng& rng) {
  // Partial Fisher-Yates: the drawn ids are moved to the back and removed.
  std::vector<std::string> picked;
  picked.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    const std::size_t j = rng.uniform_index(pool.size());
    std::swap(pool[j], pool.back());
    picked.push_back(std::move(pool.back()));
    pool.pop_back();
  }
  return picked;
}

}  // namespace

std::optional<TaskSpec> task_preset(std::string_view name) {
  for (const Preset& p : kPresets) {
    if (name == p.name) {
      TaskSpec spec;
      spec.name = p.name;
      spec.class_a = p.class_a;
      spec.class_b = p.class_b;
      return spec;
    }
  }
  return std::nullopt;
}

std::vector<std::string> task_preset_names() {
  std::vector<std::string> names;
  for (const Preset& p : kPresets) names.emplace_back(p.name);
  return names;
}

InteractionBatch sample_interaction(RunState& state, Rng& rng) {
  if (state.per_class < 1) throw Error(ErrorCode::invalid_argument, "per-class batch size must be positive");
  const auto need = static_cast<std::size_t>(state.per_class);
  if (state.unmoved_a.size() < need || state.unmoved_b.size() < need) {
    throw Error(ErrorCode::precondition, "not enough unmoved documents left to sample a batch");
  }
  InteractionBatch batch;
  for (auto& id : draw(state.unmoved_a, state.per_class, rng)) batch.moves.push_back({std::move(id), state.corner_a});
  for (auto& id : draw(state.unmoved_b, state.per_class, rng)) batch.moves.push_back({std::move(id), state.corner_b});
  return batch;
}

void validate_task(const TaskSpec& spec, const Corpus& task_corpus) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::invalid_argument, "task \"" + spec.name + "\": " + what);
  };
  if (spec.class_a == spec.class_b) fail("classes must differ");
  if (spec.corner_a == spec.corner_b) fail("corners must differ");
  if (spec.docs_per_class_per_iter < 1) fail("documents per class per iteration must be positive");
  if (spec.iterations < 0) fail("iterations must be non-negative");
  if (spec.runs < 1) fail("runs must be positive");
  if (spec.knn_k < 1) fail("k must be positive");
  if (spec.cv_folds < 2) fail("at least 2 folds are required");
  if (!(spec.lambda >= 0)) fail("lambda must be non-negative");

  std::size_t count_a = 0, count_b = 0;
  for (const Document& doc : task_corpus.documents()) {
    if (doc.label == spec.class_a) ++count_a;
    if (doc.label == spec.class_b) ++count_b;
  }
  const std::size_t smaller = std::min(count_a, count_b);
  const auto needed = static_cast<std::size_t>(spec.iterations) *
                      static_cast<std::size_t>(spec.docs_per_class_per_iter);
  if (needed > smaller) {
    fail(std::to_string(spec.iterations) + " iterations x " +
         std::to_string(spec.docs_per_class_per_iter) + " documents exceed the smaller class (" +
         std::to_string(smaller) + " documents)");
  }
}

std::vector<AccuracyTrace> run_task_on_features(const TaskSpec& spec, const FeatureMatrix& features,
                                                std::span<const std::string> labels,
                                                const RunTaskOptions& options) {
  if (labels.size() != features.size()) {
    throw Error(ErrorCode::invalid_argument, "run_task: labels are not aligned to features");
  }
  const CrossValidationOptions cv{spec.knn_k, spec.cv_folds, 0};
  const InversionOptions inversion{spec.lambda};

  std::optional<Layout2D> initial_layout;
  if (spec.project_layouts && spec.iterations > 0) {
    initial_layout = forward_project(features, WeightVector::uniform(features.dims()), nullptr,
                                     {.seed = spec.base_seed})
                         .layout;
  }

  std::vector<AccuracyTrace> traces;
  for (int run = 0; run < spec.runs; ++run) {
    const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(run);
    Rng rng(seed);
    RunState state{{}, {}, spec.corner_a, spec.corner_b, spec.docs_per_class_per_iter};
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == spec.class_a) state.unmoved_a.push_back(features.doc_ids[i]);
      if (labels[i] == spec.class_b) state.unmoved_b.push_back(features.doc_ids[i]);
    }

    AccuracyTrace trace{spec.name, spec.feature_mode, seed, {}};
    RunDiagnostics diag;
    diag.run_seed = seed;
    WeightVector w = WeightVector::uniform(features.dims());
    std::optional<Layout2D> layout = initial_layout;
    std::vector<Move> pinned;

    for (int it = 0; it < spec.iterations; ++it) {
      InteractionBatch batch = sample_interaction(state, rng);
      if (spec.pinning == PinningPolicy::newest_only) pinned.clear();
      pinned.insert(pinned.end(), batch.moves.begin(), batch.moves.end());

      w = invert_weights(features, pinned, w, inversion).weights;
      CrossValidationOptions fold_cv = cv;
      fold_cv.seed = seed;
      const double acc = cv_accuracy(features, labels, w, fold_cv);
      trace.per_iteration.push_back(acc);

      if (layout) {
        layout = forward_project(features, w, &*layout, {.seed = seed}).layout;
        if (options.diagnostics) diag.layouts.push_back(*layout);
      }
      if (options.diagnostics) diag.weights.push_back(w);
      if (options.progress) options.progress(run, it, acc);
    }
    traces.push_back(std::move(trace));
    if (options.diagnostics) options.diagnostics->push_back(std::move(diag));
  }
  return traces;
}

std::vector<AccuracyTrace> run_task(const TaskSpec& spec, const Corpus& corpus,
                                    const EmbeddingTable* embeddings, const RunTaskOptions& options) {
  Corpus subset = task_subset(corpus, spec.class_a, spec.class_b);
  if (!subset.tokenized()) subset = tokenize_corpus(subset);
  validate_task(spec, subset);

  std::vector<std::string> labels;
  labels.reserve(subset.size());
  for (const Document& doc : subset.documents()) labels.push_back(*doc.label);

  FeatureMatrix features;
  std::vector<std::string> oov;
  if (spec.feature_mode == FeatureMode::keyword_hashed) {
    features = tfidf_hashed(subset, spec.dims);
  } else {
    if (!embeddings) {
      throw Error(ErrorCode::precondition, "embedding features need an embedding table");
    }
    EmbeddingFeatures ef = embed_average(subset, *embeddings, spec.dims);
    features = std::move(ef.features);
    oov = std::move(ef.oov_documents);
  }

  const std::size_t first_diag = options.diagnostics ? options.diagnostics->size() : 0;
  auto traces = run_task_on_features(spec, features, labels, options);
  if (options.diagnostics) {
    for (std::size_t i = first_diag; i < options.diagnostics->size(); ++i) {
      (*options.diagnostics)[i].oov_documents = oov;
    }
  }
  return traces;
}

SummaryRow summarize(std::span<const AccuracyTrace> traces) {
  if (traces.empty()) throw Error(ErrorCode::invalid_argument, "summarize: no traces");
  const AccuracyTrace& first = traces.front();
  if (first.per_iteration.empty()) throw Error(ErrorCode::invalid_argument, "summarize: no iterations");
  std::vector<double> finals, run_means;
  for (const AccuracyTrace& t : traces) {
    if (t.task != first.task || t.feature_mode != first.feature_mode) {
      throw Error(ErrorCode::invalid_argument, "summarize: traces mix tasks or feature modes");
    }
    if (t.per_iteration.size() != first.per_iteration.size()) {
      throw Error(ErrorCode::invalid_argument, "summarize: traces differ in length");
    }
    finals.push_back(t.per_iteration.back());
    run_means.push_back(mean_of(t.per_iteration));
  }
  SummaryRow row;
  row.task = first.task;
  row.feature_mode = first.feature_mode;
  row.final_acc_mean = mean_of(finals);
  row.final_acc_std = sample_std(finals);
  // Equal-length traces: the mean of run means is the mean over all entries.
  row.overall_acc_mean = mean_of(run_means);
  row.overall_acc_std = sample_std(run_means);
  row.runs = traces.size();
  return row;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "spearman: need two equal-length series of length >= 2");
  }
  const std::vector<double> rx = average_ranks(x), ry = average_ranks(y);
  const double mx = mean_of(rx), my = mean_of(ry);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> mean_curve(std::span<const AccuracyTrace> traces) {
  if (traces.empty()) return {};
  std::vector<double> curve(traces.front().per_iteration.size(), 0.0);
  for (const AccuracyTrace& t : traces) {
    if (t.per_iteration.size() != curve.size()) {
      throw Error(ErrorCode::invalid_argument, "mean_curve: traces differ in length");
    }
    for (std::size_t i = 0; i < curve.size(); ++i) curve[i] += t.per_iteration[i];
  }
  for (double& v : curve) v /= static_cast<double>(traces.size());
  return curve;
}

}  // namespace sitext
