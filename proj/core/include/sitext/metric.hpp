#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sitext/featurize.hpp"

namespace sitext {

/// Per-dimension weights of the distance metric: every entry is at least
/// kFloor and the entries sum to one.
class WeightVector {
 public:
  static constexpr double kFloor = 1e-6;
  static constexpr double kSumTolerance = 1e-9;

  static WeightVector uniform(std::size_t dims);
  /// Validates the simplex invariants; throws Error otherwise.
  static WeightVector from_values(Eigen::VectorXd values);

  const Eigen::VectorXd& values() const { return w_; }
  std::size_t size() const { return static_cast<std::size_t>(w_.size()); }
  double operator[](std::size_t k) const { return w_[static_cast<Eigen::Index>(k)]; }

 private:
  explicit WeightVector(Eigen::VectorXd w) : w_(std::move(w)) {}
  Eigen::VectorXd w_;
};

/// sqrt(sum_k w_k (x_k - y_k)^2)
double weighted_distance(std::span<const double> x, std::span<const double> y,
                         const WeightVector& w);

/// Symmetric n x n matrix of weighted distances between feature rows.
Eigen::MatrixXd weighted_distance_matrix(const RowMatrix& rows, const WeightVector& w);

/// Majority label among the k nearest rows. Distance ties go to the lower row
/// index; a tie between labels goes to the label that appears first in the
/// neighbour ranking, i.e. the nearest of the tied labels.
std::string knn_predict(const RowMatrix& train, std::span<const std::string> labels,
                        std::span<const double> query, int k, const WeightVector& w);

struct CrossValidationOptions {
  int k = 3;
  int folds = 5;
  std::uint64_t seed = 0;
};

/// Mean per-fold kNN accuracy under stratified k-fold cross-validation.
double cv_accuracy(const FeatureMatrix& features, std::span<const std::string> labels,
                   const WeightVector& w, const CrossValidationOptions& options = {});

/// Stratified fold id per row: each class is shuffled with the seeded
/// generator and dealt round-robin, continuing the deal across classes.
std::vector<int> stratified_folds(std::span<const std::string> labels, int folds,
                                  std::uint64_t seed);

}  // namespace sitext
