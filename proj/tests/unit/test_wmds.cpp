#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sitext/error.hpp"
#include "sitext/wmds.hpp"
#include "synthetic.hpp"

using namespace sitext;

namespace {

oracle::Mat dense(const Eigen::MatrixXd& m) {
  oracle::Mat out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[i].assign(m.row(i).data(), m.row(i).data() + m.cols());
  return out;
}

oracle::Mat dense(const RowMatrix& m) {
  oracle::Mat out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).data(), m.row(i).data() + m.cols());
  return out;
}

std::vector<std::array<double, 2>> points(const LayoutMatrix& y) {
  std::vector<std::array<double, 2>> out;
  for (Eigen::Index i = 0; i < y.rows(); ++i) out.push_back({y(i, 0), y(i, 1)});
  return out;
}

oracle::Mat oracle_distances(const RowMatrix& rows, const WeightVector& w) {
  const oracle::Mat r = dense(rows);
  const oracle::Vec wv(w.values().data(), w.values().data() + w.size());
  oracle::Mat d(r.size(), oracle::Vec(r.size()));
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) d[i][j] = oracle::weighted(r[i], r[j], wv);
  return d;
}

}  // namespace

TEST(ForwardProject, EqualDistancesGiveEquilateralTriangle) {
  // Rows of the scaled identity are pairwise equidistant.
  const FeatureMatrix fm = synth::features(RowMatrix::Identity(3, 3));
  const ProjectionResult r = forward_project(fm, WeightVector::uniform(3));
  const auto& y = r.layout.positions;
  const double ab = (y.row(0) - y.row(1)).norm(), ac = (y.row(0) - y.row(2)).norm(),
               bc = (y.row(1) - y.row(2)).norm();
  EXPECT_NEAR(ab, ac, 1e-6);
  EXPECT_NEAR(ab, bc, 1e-6);
  EXPECT_GT(ab, 0.5);
}

TEST(ForwardProject, TwoDocumentsSpanOneAxis) {
  RowMatrix rows(2, 3);
  rows << 0, 0, 0, 1, 2, 3;
  const ProjectionResult r = forward_project(synth::features(rows), WeightVector::uniform(3));
  const auto& y = r.layout.positions;
  // Endpoints of the normalized range along the long axis, centred on the other.
  const Eigen::RowVector2d delta = (y.row(0) - y.row(1)).cwiseAbs();
  const int axis = delta(0) > delta(1) ? 0 : 1;
  EXPECT_NEAR(delta(axis), 1.0, 1e-9);
  EXPECT_NEAR(delta(1 - axis), 0.0, 1e-9);
  EXPECT_NEAR(y(0, 1 - axis), 0.5, 1e-9);
  EXPECT_NEAR(std::min(y(0, axis), y(1, axis)), 0.0, 1e-12);
}

TEST(ForwardProject, FinalStressNotAboveClassicalStart) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const FeatureMatrix fm = synth::features(synth::uniform_matrix(rng, 10, 5));
    const WeightVector w = WeightVector::uniform(5);
    const ProjectionResult r = forward_project(fm, w, nullptr, {300, 1e-6, std::uint64_t(trial)});
    const oracle::Mat d = oracle_distances(fm.rows, w);
    EXPECT_LE(oracle::stress(d, points(r.raw)), oracle::stress(d, points(r.start)) + 1e-12);
  }
}

TEST(ForwardProject, NormalizedAndDeterministic) {
  std::mt19937_64 rng(11);
  const FeatureMatrix fm = synth::features(synth::uniform_matrix(rng, 25, 6));
  const WeightVector w = WeightVector::uniform(6);
  const ProjectionResult a = forward_project(fm, w, nullptr, {300, 1e-6, 3});
  const ProjectionResult b = forward_project(fm, w, nullptr, {300, 1e-6, 3});
  EXPECT_EQ(a.layout.positions, b.layout.positions);
  EXPECT_EQ(a.layout.doc_ids, fm.doc_ids);
  EXPECT_GE(a.layout.positions.minCoeff(), 0.0);
  EXPECT_LE(a.layout.positions.maxCoeff(), 1.0);
  // The long axis fills the square.
  const Eigen::RowVector2d range = a.layout.positions.colwise().maxCoeff() - a.layout.positions.colwise().minCoeff();
  EXPECT_NEAR(range.maxCoeff(), 1.0, 1e-12);
}

TEST(ForwardProject, InitLayoutIsAlignedTo) {
  std::mt19937_64 rng(12);
  const FeatureMatrix fm = synth::features(synth::uniform_matrix(rng, 15, 4));
  const WeightVector w = WeightVector::uniform(4);
  const ProjectionResult first = forward_project(fm, w);
  // Re-projecting from a converged layout barely moves it.
  const ProjectionResult again = forward_project(fm, w, &first.layout);
  EXPECT_LT((again.layout.positions - first.layout.positions).cwiseAbs().maxCoeff(), 1e-2);

  Layout2D wrong = first.layout;
  wrong.doc_ids[0] = "elsewhere";
  EXPECT_THROW(forward_project(fm, w, &wrong), Error);
}

TEST(ForwardProject, DegenerateFeatures) {
  const FeatureMatrix fm = synth::features(RowMatrix::Constant(4, 3, 0.25));
  const ProjectionResult r = forward_project(fm, WeightVector::uniform(3));
  EXPECT_TRUE(r.degenerate);
  EXPECT_TRUE((r.layout.positions.array() == 0.5).all());
}

TEST(ForwardProject, CoincidentDocumentsStillSeparateOthers) {
  RowMatrix rows(4, 2);
  rows << 0, 0, 0, 0, 1, 0, 0, 1;
  const ProjectionResult r = forward_project(synth::features(rows), WeightVector::uniform(2));
  EXPECT_FALSE(r.degenerate);
  EXPECT_TRUE(r.layout.positions.allFinite());
  EXPECT_LT((r.layout.positions.row(0) - r.layout.positions.row(1)).norm(), 1e-3);
}

TEST(ForwardProject, Errors) {
  EXPECT_THROW(forward_project(synth::features(RowMatrix::Zero(1, 3)), WeightVector::uniform(3)), Error);
  EXPECT_THROW(forward_project(synth::features(RowMatrix::Zero(3, 3)), WeightVector::uniform(2)), Error);
}

TEST(Smacof, StressNonIncreasingOnRandomInstances) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 30);
    const FeatureMatrix fm = synth::features(synth::uniform_matrix(rng, n, 1 + static_cast<int>(rng() % 12)));
    const Eigen::MatrixXd d = weighted_distance_matrix(fm.rows, WeightVector::uniform(fm.dims()));
    const LayoutMatrix start = synth::uniform_matrix(rng, n, 2);
    const ProjectionResult r = smacof(d, start);
    ASSERT_FALSE(r.stress_history.empty());
    for (std::size_t t = 1; t < r.stress_history.size(); ++t) {
      EXPECT_LE(r.stress_history[t], r.stress_history[t - 1]) << "trial " << trial << " step " << t;
    }
    EXPECT_NEAR(raw_stress(d, r.raw), r.stress_history.back(), 1e-9 * (1 + r.stress_history.back()));
    EXPECT_LE(r.iterations, 300);
  }
}

TEST(Stress, Examples) {
  RowMatrix rows(3, 2);
  rows << 0, 0, 3, 0, 0, 4;
  // Uniform weights scale Euclidean distances by 1/sqrt(2).
  const WeightVector w = WeightVector::uniform(2);
  Layout2D exact{LayoutMatrix(3, 2), synth::ids(3)};
  exact.positions = rows / std::sqrt(2.0);
  EXPECT_NEAR(stress(synth::features(rows), w, exact), 0.0, 1e-24);

  RowMatrix same(2, 1);
  same << 0.4, 0.4;
  Layout2D pair{LayoutMatrix(2, 2), synth::ids(2)};
  pair.positions << 0, 0, 1, 0;
  EXPECT_DOUBLE_EQ(stress(synth::features(same), WeightVector::uniform(1), pair), 1.0);

  pair.doc_ids = {"x", "y"};
  EXPECT_THROW(stress(synth::features(same), WeightVector::uniform(1), pair), Error);
}

TEST(Stress, MatchesDoubleLoopOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const FeatureMatrix fm = synth::features(synth::uniform_matrix(rng, 12, 7));
    Eigen::VectorXd raw = synth::uniform_matrix(rng, 1, 7, 0.1, 1.0).row(0).transpose();
    const WeightVector w = WeightVector::from_values(raw / raw.sum());
    const Layout2D layout{synth::uniform_matrix(rng, 12, 2), fm.doc_ids};
    EXPECT_NEAR(stress(fm, w, layout), oracle::stress(oracle_distances(fm.rows, w), points(layout.positions)), 1e-10);
  }
}

TEST(Procrustes, RecoversRotationAndReflection) {
  std::mt19937_64 rng(22);
  const LayoutMatrix ref = synth::uniform_matrix(rng, 9, 2);
  Eigen::Matrix2d rot;
  const double t = 0.7;
  rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  Eigen::Matrix2d flip = Eigen::Matrix2d::Identity();
  flip(0, 0) = -1;
  LayoutMatrix moved = ref * rot * flip;
  moved.rowwise() += Eigen::RowVector2d(5, -3);
  EXPECT_LT((procrustes_align(moved, ref) - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NormalizeUnitSquare, KeepsAspectRatio) {
  LayoutMatrix y(3, 2);
  y << 0, 0, 4, 0, 2, 1;
  EXPECT_TRUE(normalize_unit_square(y));
  LayoutMatrix expected(3, 2);
  expected << 0, 0.375, 1, 0.375, 0.5, 0.625;
  EXPECT_LT((y - expected).cwiseAbs().maxCoeff(), 1e-15);

  LayoutMatrix same = LayoutMatrix::Constant(2, 2, 3.0);
  EXPECT_FALSE(normalize_unit_square(same));
  EXPECT_TRUE((same.array() == 0.5).all());
}

TEST(InteractionBatch, Validation) {
  InteractionBatch ok{{{"a", {0.1, 0.2}}, {"b", {1.0, 0.0}}}};
  EXPECT_NO_THROW(ok.validate());
  InteractionBatch dup{{{"a", {0.1, 0.2}}, {"a", {0.3, 0.2}}}};
  EXPECT_THROW(dup.validate(), Error);
  InteractionBatch outside{{{"a", {1.1, 0.2}}}};
  EXPECT_THROW(outside.validate(), Error);
  InteractionBatch nan{{{"a", {NAN, 0.2}}}};
  EXPECT_THROW(nan.validate(), Error);
}
