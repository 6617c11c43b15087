#include <algorithm>
#include <functional>
#include <vector>

#include "sitext/error.hpp"
#include "sitext/wmds.hpp"

namespace sitext {

WeightVector simplex_project(const Eigen::VectorXd& v, double eps) {
  const Eigen::Index d = v.size();
  if (d < 1) throw Error(ErrorCode::invalid_argument, "simplex_project: empty vector");
  if (!v.allFinite()) throw Error(ErrorCode::invalid_argument, "simplex_project: non-finite input");
  if (eps < 0 || eps * static_cast<double>(d) >= 1.0) {
    throw Error(ErrorCode::invalid_argument, "simplex_project: eps * d must be below 1");
  }

  // Substituting w = eps + u turns the floored simplex into the simplex of
  // mass 1 - d*eps, solved by the sorted-threshold rule.
  const double mass = 1.0 - eps * static_cast<double>(d);
  const Eigen::VectorXd shifted = v.array() - eps;
  std::vector<double> sorted(shifted.data(), shifted.data() + d);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  double cumulative = 0.0, theta = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - mass) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0) theta = candidate;
  }

  Eigen::VectorXd w = (shifted.array() - theta).max(0.0) + eps;
  // Absorb the rounding residue into the largest entry.
  Eigen::Index top;
  w.maxCoeff(&top);
  w[top] += 1.0 - w.sum();
  return WeightVector::from_values(std::move(w));
}

}  // namespace sitext
