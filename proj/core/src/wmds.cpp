#include "sitext/wmds.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "sitext/error.hpp"
#include "sitext/random.hpp"

namespace sitext {

void InteractionBatch::validate() const {
  std::unordered_set<std::string> ids;
  for (const Move& m : moves) {
    if (m.doc_id.empty()) throw Error(ErrorCode::invalid_argument, "move with empty doc_id");
    if (!ids.insert(m.doc_id).second) {
      throw Error(ErrorCode::invalid_argument, "document \"" + m.doc_id + "\" moved twice in one batch");
    }
    if (!m.target.allFinite() || (m.target.array() < 0.0).any() || (m.target.array() > 1.0).any()) {
      throw Error(ErrorCode::invalid_argument,
                  "target for \"" + m.doc_id + "\" must be finite and inside [0,1]^2");
    }
  }
}

namespace {

// Moves every point that exactly coincides with an earlier one by a seeded
// offset of relative size 1e-6, so the Guttman transform can separate them.
void separate_coincident(LayoutMatrix& y, double scale, std::uint64_t seed) {
  const Eigen::Index n = y.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (y(a, 0) != y(b, 0)) return y(a, 0) < y(b, 0);
    if (y(a, 1) != y(b, 1)) return y(a, 1) < y(b, 1);
    return a < b;
  });
  Rng rng(seed);
  const double magnitude = 1e-6 * (scale > 0 ? scale : 1.0);
  Eigen::RowVector2d anchor = y.row(order[0]);
  for (std::size_t t = 1; t < order.size(); ++t) {
    const Eigen::Index i = order[t];
    if (y(i, 0) == anchor(0) && y(i, 1) == anchor(1)) {
      y(i, 0) += magnitude * (2.0 * rng.uniform01() - 1.0);
      y(i, 1) += magnitude * (2.0 * rng.uniform01() - 1.0);
    } else {
      anchor = y.row(i);
    }
  }
}

LayoutMatrix centered(const LayoutMatrix& y) {
  LayoutMatrix out = y;
  out.rowwise() -= y.colwise().mean();
  return out;
}

}  // namespace

LayoutMatrix classical_mds(const Eigen::MatrixXd& distances, std::uint64_t seed) {
  const Eigen::Index n = distances.rows();
  if (n < 2 || distances.cols() != n) {
    throw Error(ErrorCode::invalid_argument, "classical_mds: need a square matrix with n >= 2");
  }
  // B = -1/2 J D^2 J via row/column means instead of forming J.
  Eigen::MatrixXd b = distances.array().square();
  const Eigen::VectorXd row_mean = b.rowwise().mean();
  const double grand_mean = row_mean.mean();
  b.colwise() -= row_mean;
  b.rowwise() -= row_mean.transpose();
  b.array() += grand_mean;
  b *= -0.5;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::precondition, "classical_mds: eigendecomposition failed");
  }
  LayoutMatrix y(n, 2);
  for (int axis = 0; axis < 2; ++axis) {
    const Eigen::Index col = n - 1 - axis;  // eigenvalues ascend
    Eigen::VectorXd v = eig.eigenvectors().col(col);
    Eigen::Index big;
    v.cwiseAbs().maxCoeff(&big);
    if (v[big] < 0) v = -v;
    y.col(axis) = v * std::sqrt(std::max(eig.eigenvalues()[col], 0.0));
  }
  separate_coincident(y, distances.maxCoeff(), seed);
  return y;
}

double raw_stress(const Eigen::MatrixXd& distances, const LayoutMatrix& layout) {
  const Eigen::Index n = layout.rows();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = (layout.row(i) - layout.row(j)).norm() - distances(i, j);
      total += r * r;
    }
  }
  return total;
}

ProjectionResult smacof(const Eigen::MatrixXd& distances, LayoutMatrix start,
                        const ProjectionOptions& options) {
  const Eigen::Index n = distances.rows();
  if (n < 2 || distances.cols() != n || start.rows() != n) {
    throw Error(ErrorCode::invalid_argument, "smacof: distances and start configuration disagree");
  }
  ProjectionResult result;
  result.start = start;

  LayoutMatrix current = std::move(start);
  LayoutMatrix next(n, 2);
  const double inv_n = 1.0 / static_cast<double>(n);

  // One fused pass: stress of `current` and its Guttman transform into `next`.
  auto pass = [&]() {
    next.setZero();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = current(i, 0), yi = current(i, 1);
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double dx = xi - current(j, 0), dy = yi - current(j, 1);
        const double dist = std::sqrt(dx * dx + dy * dy);
        const double target = distances(i, j);
        const double r = dist - target;
        total += r * r;
        if (dist > 0) {
          const double ratio = target / dist;
          next(i, 0) += ratio * dx;
          next(i, 1) += ratio * dy;
          next(j, 0) -= ratio * dx;
          next(j, 1) -= ratio * dy;
        }
      }
    }
    next *= inv_n;
    return total;
  };

  double previous = pass();
  result.stress_history.push_back(previous);
  LayoutMatrix best = current;
  for (int it = 0; it < options.max_iterations; ++it) {
    std::swap(current, next);
    const double s = pass();
    if (s > previous) break;  // rounding noise at convergence; keep `best`
    best = current;
    result.stress_history.push_back(s);
    result.iterations = it + 1;
    if (previous == 0.0 || (previous - s) / previous < options.relative_tolerance) break;
    previous = s;
  }
  result.raw = std::move(best);
  return result;
}

LayoutMatrix procrustes_align(const LayoutMatrix& layout, const LayoutMatrix& reference) {
  if (layout.rows() != reference.rows()) {
    throw Error(ErrorCode::invalid_argument, "procrustes_align: row count mismatch");
  }
  const LayoutMatrix a = centered(layout);
  const LayoutMatrix b = centered(reference);
  const Eigen::Matrix2d m = a.transpose() * b;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix2d rotation = svd.matrixU() * svd.matrixV().transpose();
  LayoutMatrix out = a * rotation;
  out.rowwise() += reference.colwise().mean();
  return out;
}

bool normalize_unit_square(LayoutMatrix& layout) {
  if (layout.rows() == 0) return true;
  const Eigen::RowVector2d lo = layout.colwise().minCoeff();
  const Eigen::RowVector2d hi = layout.colwise().maxCoeff();
  const Eigen::RowVector2d range = hi - lo;
  const double span = range.maxCoeff();
  if (!(span > 0)) {
    layout.setConstant(0.5);
    return false;
  }
  const double scale = 1.0 / span;
  const Eigen::RowVector2d offset = (Eigen::RowVector2d::Ones() - range * scale) * 0.5;
  for (Eigen::Index i = 0; i < layout.rows(); ++i) {
    layout.row(i) = ((layout.row(i) - lo) * scale + offset).cwiseMax(0.0).cwiseMin(1.0);
  }
  return true;
}

ProjectionResult forward_project(const FeatureMatrix& features, const WeightVector& w,
                                 const Layout2D* init, const ProjectionOptions& options) {
  const Eigen::Index n = static_cast<Eigen::Index>(features.size());
  if (n < 2) throw Error(ErrorCode::invalid_argument, "forward_project: need at least 2 documents");
  if (features.dims() != w.size()) {
    throw Error(ErrorCode::invalid_argument, "forward_project: weight length differs from dims");
  }
  if (init && (init->doc_ids != features.doc_ids ||
               init->positions.rows() != n)) {
    throw Error(ErrorCode::invalid_argument, "forward_project: init layout is not aligned to features");
  }

  const Eigen::MatrixXd target = weighted_distance_matrix(features.rows, w);
  const double scale = target.maxCoeff();
  if (!(scale > 0)) {
    ProjectionResult result;
    result.degenerate = true;
    result.raw = LayoutMatrix::Zero(n, 2);
    result.start = result.raw;
    result.layout = {LayoutMatrix::Constant(n, 2, 0.5), features.doc_ids};
    result.stress_history.push_back(0.0);
    return result;
  }

  LayoutMatrix start;
  if (init) {
    // Bring the unit-square layout into distance units before iterating.
    start = centered(init->positions);
    double num = 0, den = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double d = (start.row(i) - start.row(j)).norm();
        num += d * target(i, j);
        den += d * d;
      }
    }
    if (den > 0) start *= num / den;
    separate_coincident(start, scale, options.seed);
  } else {
    start = classical_mds(target, options.seed);
  }

  ProjectionResult result = smacof(target, std::move(start), options);
  LayoutMatrix positions = init ? procrustes_align(result.raw, init->positions) : result.raw;
  normalize_unit_square(positions);
  result.layout = {std::move(positions), features.doc_ids};
  return result;
}

double stress(const FeatureMatrix& features, const WeightVector& w, const Layout2D& layout) {
  if (layout.doc_ids != features.doc_ids ||
      layout.positions.rows() != static_cast<Eigen::Index>(features.size())) {
    throw Error(ErrorCode::invalid_argument, "stress: layout ids do not match feature ids");
  }
  return raw_stress(weighted_distance_matrix(features.rows, w), layout.positions);
}

}  // namespace sitext
