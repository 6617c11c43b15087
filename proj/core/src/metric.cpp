#include "sitext/metric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "sitext/error.hpp"
#include "sitext/random.hpp"

namespace sitext {

namespace {

// Four interleaved partial sums, combined in a fixed order. Every distance in
// the library goes through this kernel so that matrix and pointwise values
// agree bit for bit.
double weighted_sq_sum(const double* x, const double* y, const double* w, std::size_t d) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t k = 0;
  for (; k + 4 <= d; k += 4) {
    const double d0 = x[k] - y[k], d1 = x[k + 1] - y[k + 1];
    const double d2 = x[k + 2] - y[k + 2], d3 = x[k + 3] - y[k + 3];
    s0 += w[k] * d0 * d0;
    s1 += w[k + 1] * d1 * d1;
    s2 += w[k + 2] * d2 * d2;
    s3 += w[k + 3] * d3 * d3;
  }
  for (; k < d; ++k) {
    const double dk = x[k] - y[k];
    s0 += w[k] * dk * dk;
  }
  return (s0 + s1) + (s2 + s3);
}

struct Neighbor {
  double distance;
  std::size_t index;
  bool operator<(const Neighbor& o) const {
    return distance < o.distance || (distance == o.distance && index < o.index);
  }
};

// Majority vote over neighbours sorted nearest first; ties go to the label
// seen first in that order.
int vote(std::span<const Neighbor> ranked, std::span<const int> labels, int n_labels) {
  std::vector<int> counts(static_cast<std::size_t>(n_labels), 0);
  for (const Neighbor& nb : ranked) ++counts[static_cast<std::size_t>(labels[nb.index])];
  const int best = *std::max_element(counts.begin(), counts.end());
  for (const Neighbor& nb : ranked) {
    const int label = labels[nb.index];
    if (counts[static_cast<std::size_t>(label)] == best) return label;
  }
  return labels[ranked.front().index];
}

void select_nearest(std::vector<Neighbor>& candidates, int k) {
  const auto kth = candidates.begin() + k;
  std::nth_element(candidates.begin(), kth - 1, candidates.end());
  candidates.resize(static_cast<std::size_t>(k));
  std::sort(candidates.begin(), candidates.end());
}

std::vector<int> encode_labels(std::span<const std::string> labels, std::vector<std::string>& names) {
  std::map<std::string, int> ids;
  for (const auto& l : labels) ids.emplace(l, 0);
  names.clear();
  for (auto& [name, id] : ids) {
    id = static_cast<int>(names.size());
    names.push_back(name);
  }
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(ids.at(l));
  return out;
}

}  // namespace

WeightVector WeightVector::uniform(std::size_t dims) {
  if (dims == 0) throw Error(ErrorCode::invalid_argument, "weight vector needs at least one dimension");
  if (kFloor * static_cast<double>(dims) >= 1.0) {
    throw Error(ErrorCode::invalid_argument, "too many dimensions for the weight floor");
  }
  return WeightVector(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dims),
                                                1.0 / static_cast<double>(dims)));
}

WeightVector WeightVector::from_values(Eigen::VectorXd values) {
  if (values.size() == 0) throw Error(ErrorCode::invalid_argument, "empty weight vector");
  if (!values.allFinite()) throw Error(ErrorCode::invalid_argument, "weights must be finite");
  if (values.minCoeff() < kFloor) {
    throw Error(ErrorCode::invalid_argument, "weights must be at least 1e-6");
  }
  if (std::abs(values.sum() - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::invalid_argument, "weights must sum to 1");
  }
  return WeightVector(std::move(values));
}

double weighted_distance(std::span<const double> x, std::span<const double> y,
                         const WeightVector& w) {
  if (x.size() != y.size() || x.size() != w.size()) {
    throw Error(ErrorCode::invalid_argument, "weighted_distance: length mismatch");
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!std::isfinite(x[k]) || !std::isfinite(y[k])) {
      throw Error(ErrorCode::invalid_argument, "weighted_distance: non-finite input");
    }
  }
  return std::sqrt(weighted_sq_sum(x.data(), y.data(), w.values().data(), x.size()));
}

Eigen::MatrixXd weighted_distance_matrix(const RowMatrix& rows, const WeightVector& w) {
  if (static_cast<std::size_t>(rows.cols()) != w.size()) {
    throw Error(ErrorCode::invalid_argument, "weighted_distance_matrix: dimension mismatch");
  }
  if (!rows.allFinite()) {
    throw Error(ErrorCode::invalid_argument, "weighted_distance_matrix: non-finite input");
  }
  const Eigen::Index n = rows.rows();
  const std::size_t d = w.size();
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double* xi = rows.data() + i * rows.cols();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double* xj = rows.data() + j * rows.cols();
      const double v = std::sqrt(weighted_sq_sum(xi, xj, w.values().data(), d));
      dist(i, j) = v;
      dist(j, i) = v;
    }
  }
  return dist;
}

std::string knn_predict(const RowMatrix& train, std::span<const std::string> labels,
                        std::span<const double> query, int k, const WeightVector& w) {
  const std::size_t n = static_cast<std::size_t>(train.rows());
  if (n == 0) throw Error(ErrorCode::invalid_argument, "knn_predict: empty training set");
  if (labels.size() != n) throw Error(ErrorCode::invalid_argument, "knn_predict: labels misaligned");
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::invalid_argument, "knn_predict: k=" + std::to_string(k) +
                                                 " out of range [1, " + std::to_string(n) + "]");
  }
  std::vector<Neighbor> candidates;
  candidates.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> row(train.data() + i * static_cast<std::size_t>(train.cols()),
                                static_cast<std::size_t>(train.cols()));
    candidates.push_back({weighted_distance(row, query, w), i});
  }
  select_nearest(candidates, k);

  std::vector<std::string> names;
  const std::vector<int> ids = encode_labels(labels, names);
  return names[static_cast<std::size_t>(vote(candidates, ids, static_cast<int>(names.size())))];
}

std::vector<int> stratified_folds(std::span<const std::string> labels, int folds,
                                  std::uint64_t seed) {
  if (folds < 2) throw Error(ErrorCode::invalid_argument, "cross-validation needs at least 2 folds");
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  Rng rng(seed);
  std::vector<int> fold_of(labels.size(), 0);
  std::size_t dealt = 0;
  for (auto& [label, members] : by_class) {
    if (members.size() < static_cast<std::size_t>(folds)) {
      throw Error(ErrorCode::precondition, "class \"" + label + "\" has " +
                                               std::to_string(members.size()) +
                                               " documents, fewer than " + std::to_string(folds) +
                                               " folds");
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t idx : members) fold_of[idx] = static_cast<int>(dealt++ % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

double cv_accuracy(const FeatureMatrix& features, std::span<const std::string> labels,
                   const WeightVector& w, const CrossValidationOptions& options) {
  const std::size_t n = features.size();
  if (labels.size() != n) throw Error(ErrorCode::invalid_argument, "cv_accuracy: labels misaligned");
  if (options.k < 1) throw Error(ErrorCode::invalid_argument, "cv_accuracy: k must be positive");
  const std::vector<int> fold_of = stratified_folds(labels, options.folds, options.seed);

  std::vector<std::string> names;
  const std::vector<int> ids = encode_labels(labels, names);
  const Eigen::MatrixXd dist = weighted_distance_matrix(features.rows, w);

  double accuracy_sum = 0.0;
  std::vector<Neighbor> candidates;
  for (int fold = 0; fold < options.folds; ++fold) {
    std::size_t correct = 0, held_out = 0;
    for (std::size_t q = 0; q < n; ++q) {
      if (fold_of[q] != fold) continue;
      candidates.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (fold_of[i] != fold) {
          candidates.push_back({dist(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(i)), i});
        }
      }
      if (candidates.size() < static_cast<std::size_t>(options.k)) {
        throw Error(ErrorCode::precondition, "cv_accuracy: fewer training rows than k");
      }
      select_nearest(candidates, options.k);
      if (vote(candidates, ids, static_cast<int>(names.size())) == ids[q]) ++correct;
      ++held_out;
    }
    accuracy_sum += static_cast<double>(correct) / static_cast<double>(held_out);
  }
  return accuracy_sum / options.folds;
}

}  // namespace sitext
