#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sitext/featurize.hpp"
#include "sitext/metric.hpp"

namespace sitext {

using LayoutMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Document positions aligned to doc_ids; normalized layouts lie in [0,1]^2.
struct Layout2D {
  LayoutMatrix positions;
  std::vector<std::string> doc_ids;

  std::size_t size() const { return doc_ids.size(); }
};

/// A document placed at a target position in the unit square.
struct Move {
  std::string doc_id;
  Eigen::Vector2d target;

  bool operator==(const Move&) const = default;
};

struct InteractionBatch {
  std::vector<Move> moves;

  bool operator==(const InteractionBatch&) const = default;

  /// Distinct ids and finite targets inside [0,1]^2; throws Error otherwise.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Forward projection

struct ProjectionOptions {
  int max_iterations = 300;
  /// Stop once (stress_prev - stress) / stress_prev drops below this.
  double relative_tolerance = 1e-6;
  std::uint64_t seed = 0;
};

struct ProjectionResult {
  Layout2D layout;             // aligned and normalized into [0,1]^2
  LayoutMatrix raw;            // SMACOF configuration in distance units
  LayoutMatrix start;          // starting configuration in distance units
  std::vector<double> stress_history;  // stress of start, then after each step
  int iterations = 0;
  bool degenerate = false;     // all target distances zero
};

/// Classical (Torgerson) scaling of a distance matrix into two dimensions.
/// Coincident points are separated by a seeded jitter far below the data
/// scale so that SMACOF can move them apart.
LayoutMatrix classical_mds(const Eigen::MatrixXd& distances, std::uint64_t seed);

/// sum_{i<j} (||y_i - y_j|| - distances(i, j))^2
double raw_stress(const Eigen::MatrixXd& distances, const LayoutMatrix& layout);

/// SMACOF iterations (Guttman transform) from the given start.
ProjectionResult smacof(const Eigen::MatrixXd& distances, LayoutMatrix start,
                        const ProjectionOptions& options = {});

/// Weighted MDS of the feature rows. With `init`, SMACOF starts from it and
/// the result is Procrustes-aligned to it; otherwise classical scaling seeds
/// the optimization.
ProjectionResult forward_project(const FeatureMatrix& features, const WeightVector& w,
                                 const Layout2D* init = nullptr,
                                 const ProjectionOptions& options = {});

/// Stress of a layout against the weighted feature distances.
double stress(const FeatureMatrix& features, const WeightVector& w, const Layout2D& layout);

/// Rotation/reflection + translation of `layout` best matching `reference`
/// in the least-squares sense; scale is left to the caller.
LayoutMatrix procrustes_align(const LayoutMatrix& layout, const LayoutMatrix& reference);

/// Uniform scaling into [0,1]^2 that keeps the aspect ratio; the shorter
/// axis is centred. Returns false when all points coincide (set to 0.5).
bool normalize_unit_square(LayoutMatrix& layout);

// ---------------------------------------------------------------------------
// Inverse projection

/// Euclidean projection of v onto {w : w_k >= eps, sum w = 1}.
WeightVector simplex_project(const Eigen::VectorXd& v, double eps = WeightVector::kFloor);

struct InversionOptions {
  double lambda = 0.5;
  int max_iterations = 500;
  double step_tolerance = 1e-8;
  double initial_step = 1.0;
};

struct InversionResult {
  WeightVector weights;
  double objective_before = 0;
  double objective_after = 0;
  double scale = 1;   // layout-to-feature distance scale s
  int iterations = 0;
};

/// Learns weights whose distances among the pinned documents match their
/// (scaled) layout distances, anchored to w_prev by a proximal term.
InversionResult invert_weights(const FeatureMatrix& features, std::span<const Move> pinned,
                               const WeightVector& w_prev, const InversionOptions& options = {});

}  // namespace sitext
