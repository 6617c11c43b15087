#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "sitext/error.hpp"
#include "sitext/wmds.hpp"

namespace sitext {

namespace {

// Pairwise data of the pinned set: squared per-dimension feature differences
// (one row per pair) and the target layout distance of each pair.
struct PinnedPairs {
  RowMatrix sq_diff;
  Eigen::VectorXd layout_dist;
};

PinnedPairs pinned_pairs(const FeatureMatrix& features, std::span<const Move> pinned) {
  if (pinned.size() < 2) {
    throw Error(ErrorCode::precondition, "weight inversion needs at least 2 pinned documents");
  }
  std::unordered_map<std::string_view, std::size_t> row_of;
  row_of.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) row_of.emplace(features.doc_ids[i], i);

  std::vector<std::size_t> rows;
  std::unordered_set<std::string_view> seen;
  for (const Move& m : pinned) {
    auto it = row_of.find(m.doc_id);
    if (it == row_of.end()) throw Error(ErrorCode::not_found, "unknown document \"" + m.doc_id + "\"");
    if (!seen.insert(m.doc_id).second) {
      throw Error(ErrorCode::invalid_argument, "document \"" + m.doc_id + "\" pinned twice");
    }
    if (!m.target.allFinite()) throw Error(ErrorCode::invalid_argument, "non-finite pin target");
    rows.push_back(it->second);
  }

  const std::size_t p = pinned.size();
  const std::size_t n_pairs = p * (p - 1) / 2;
  const Eigen::Index d = static_cast<Eigen::Index>(features.dims());
  PinnedPairs out{RowMatrix(static_cast<Eigen::Index>(n_pairs), d),
                  Eigen::VectorXd(static_cast<Eigen::Index>(n_pairs))};
  Eigen::Index pair = 0;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a + 1; b < p; ++b, ++pair) {
      out.sq_diff.row(pair) =
          (features.rows.row(static_cast<Eigen::Index>(rows[a])) -
           features.rows.row(static_cast<Eigen::Index>(rows[b])))
              .array()
              .square();
      out.layout_dist[pair] = (pinned[a].target - pinned[b].target).norm();
    }
  }
  return out;
}

class Objective {
 public:
  Objective(const PinnedPairs& pairs, const Eigen::VectorXd& anchor, double scale, double lambda)
      : pairs_(pairs), anchor_(anchor), target_(scale * pairs.layout_dist), lambda_(lambda) {}

  double value(const Eigen::VectorXd& w) const {
    const Eigen::VectorXd dist = (pairs_.sq_diff * w).cwiseMax(0.0).cwiseSqrt();
    const double fit = (dist - target_).squaredNorm() / static_cast<double>(dist.size());
    return fit + lambda_ * (w - anchor_).squaredNorm();
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& w) const {
    const Eigen::VectorXd dist = (pairs_.sq_diff * w).cwiseMax(0.0).cwiseSqrt();
    Eigen::VectorXd coeff(dist.size());
    for (Eigen::Index p = 0; p < dist.size(); ++p) {
      // d/dw sqrt(q.w) = q / (2 sqrt(q.w)); q = 0 whenever the distance is 0.
      coeff[p] = dist[p] > 0 ? (dist[p] - target_[p]) / dist[p] : 0.0;
    }
    return pairs_.sq_diff.transpose() * coeff / static_cast<double>(dist.size()) +
           2.0 * lambda_ * (w - anchor_);
  }

 private:
  const PinnedPairs& pairs_;
  const Eigen::VectorXd& anchor_;
  Eigen::VectorXd target_;
  double lambda_;
};

}  // namespace

InversionResult invert_weights(const FeatureMatrix& features, std::span<const Move> pinned,
                               const WeightVector& w_prev, const InversionOptions& options) {
  if (features.dims() != w_prev.size()) {
    throw Error(ErrorCode::invalid_argument, "invert_weights: weight length differs from dims");
  }
  if (!(options.lambda >= 0)) throw Error(ErrorCode::invalid_argument, "lambda must be non-negative");
  const PinnedPairs pairs = pinned_pairs(features, pinned);
  const Eigen::VectorXd& anchor = w_prev.values();

  // Least-squares scale from layout units to feature-space units under w_prev.
  const Eigen::VectorXd prev_dist = (pairs.sq_diff * anchor).cwiseMax(0.0).cwiseSqrt();
  const double layout_sq = pairs.layout_dist.squaredNorm();
  const double scale = layout_sq > 0 ? prev_dist.dot(pairs.layout_dist) / layout_sq : 1.0;

  const Objective objective(pairs, anchor, scale, options.lambda);
  Eigen::VectorXd w = anchor;
  double current = objective.value(w);

  InversionResult result{w_prev, current, current, scale, 0};
  double step = options.initial_step;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd grad = objective.gradient(w);
    if (grad.squaredNorm() == 0.0) break;

    bool improved = false;
    Eigen::VectorXd candidate;
    double candidate_value = current;
    for (int halvings = 0; halvings < 60; ++halvings) {
      candidate = simplex_project(w - step * grad).values();
      candidate_value = objective.value(candidate);
      if (candidate_value < current) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;

    const double moved = (candidate - w).norm();
    w = std::move(candidate);
    current = candidate_value;
    result.iterations = it + 1;
    if (moved < options.step_tolerance) break;
  }

  if (result.iterations > 0) result.weights = WeightVector::from_values(w);
  result.objective_after = current;
  return result;
}

}  // namespace sitext
