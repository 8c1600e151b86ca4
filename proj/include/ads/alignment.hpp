#pragma once

#include "ads/affine.hpp"
#include "ads/common.hpp"
#include "ads/tps.hpp"

#include <vector>

namespace ads {

// Matched point pairs in normalized coordinates. Weights are optional;
// when empty every pair counts equally.
template <typename Scalar>
struct CorrespondencesT {
  Matrix2X<Scalar> source;
  Matrix2X<Scalar> target;
  VectorX<Scalar> weights;

  Index size() const { return source.cols(); }

  void validate() const {
    if (source.cols() != target.cols())
      throw std::invalid_argument("correspondence point counts differ");
    if (weights.size() != 0 && weights.size() != source.cols())
      throw std::invalid_argument("correspondence weight count differs from point count");
    if (weights.size() != 0 && (weights.array() < Scalar(0)).any())
      throw std::invalid_argument("correspondence weights must be non-negative");
  }

  Scalar weight(Index i) const { return weights.size() ? weights(i) : Scalar(1); }
};

using Correspondences = CorrespondencesT<double>;

// Mean Euclidean distance between matched points.
template <typename Scalar>
Scalar keypoint_distance(const CorrespondencesT<Scalar>& c) {
  c.validate();
  if (c.size() == 0) throw std::invalid_argument("keypoint_distance requires at least one pair");
  return (c.source - c.target).colwise().norm().mean();
}

// Weighted least-squares affine fit: minimizes
// sum_i w_i |L p_i + t - q_i|^2 over the six parameters.
template <typename Scalar>
Affine2<Scalar> estimate_affine(const CorrespondencesT<Scalar>& c) {
  c.validate();
  const Index n = c.size();
  if (n < 3)
    throw DegenerateCorrespondencesError("affine estimation requires at least 3 pairs");

  Eigen::Matrix<Scalar, Eigen::Dynamic, 3> design(n, 3);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> rhs(n, 2);
  for (Index i = 0; i < n; ++i) {
    const Scalar sw = std::sqrt(c.weight(i));
    design(i, 0) = sw * c.source(0, i);
    design(i, 1) = sw * c.source(1, i);
    design(i, 2) = sw;
    rhs(i, 0) = sw * c.target(0, i);
    rhs(i, 1) = sw * c.target(1, i);
  }
  Eigen::ColPivHouseholderQR<Eigen::Matrix<Scalar, Eigen::Dynamic, 3>> qr(design);
  if (qr.rank() < 3)
    throw DegenerateCorrespondencesError("source points are collinear or coincident");
  const Eigen::Matrix<Scalar, 3, 2> sol = qr.solve(rhs);

  Affine2<Scalar> t;
  t.linear << sol(0, 0), sol(1, 0), sol(0, 1), sol(1, 1);
  t.translation << sol(2, 0), sol(2, 1);
  return t;
}

struct RansacConfig {
  double inlier_threshold = 0.05;  // max residual in normalized units
  int iterations = 512;
  Index min_inliers = 0;  // 0 resolves to max(6, pairs / 2)
  std::uint64_t seed = 0;
};

// Robust affine fit: repeated minimal (3-pair) samples score consensus by
// residual threshold; the best consensus set (ties keep the earliest) is
// refit by weighted least squares. Deterministic for a fixed seed.
template <typename Scalar>
Affine2<Scalar> estimate_affine_ransac(const CorrespondencesT<Scalar>& c,
                                       const RansacConfig& config = {}) {
  c.validate();
  const Index n = c.size();
  if (n < 3)
    throw DegenerateCorrespondencesError("affine estimation requires at least 3 pairs");
  const Index min_inliers =
      config.min_inliers > 0 ? config.min_inliers : std::max<Index>(6, n / 2);
  const Scalar threshold2 =
      Scalar(config.inlier_threshold) * Scalar(config.inlier_threshold);

  Rng rng(config.seed);
  Index best_count = 0;
  std::vector<bool> best_inliers;

  for (int iter = 0; iter < config.iterations; ++iter) {
    Index i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    Index j = i, k = i;
    while (j == i) j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    while (k == i || k == j) k = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));

    Eigen::Matrix<Scalar, 3, 3> design;
    design << c.source(0, i), c.source(1, i), Scalar(1),
              c.source(0, j), c.source(1, j), Scalar(1),
              c.source(0, k), c.source(1, k), Scalar(1);
    const Eigen::FullPivLU<Eigen::Matrix<Scalar, 3, 3>> lu(design);
    if (!lu.isInvertible()) continue;
    Eigen::Matrix<Scalar, 3, 2> rhs;
    rhs << c.target(0, i), c.target(1, i),
           c.target(0, j), c.target(1, j),
           c.target(0, k), c.target(1, k);
    const Eigen::Matrix<Scalar, 3, 2> sol = lu.solve(rhs);
    Affine2<Scalar> candidate;
    candidate.linear << sol(0, 0), sol(1, 0), sol(0, 1), sol(1, 1);
    candidate.translation << sol(2, 0), sol(2, 1);

    const Matrix2X<Scalar> residuals = candidate.apply(c.source) - c.target;
    std::vector<bool> inliers(static_cast<std::size_t>(n));
    Index count = 0;
    for (Index p = 0; p < n; ++p) {
      const bool in = residuals.col(p).squaredNorm() <= threshold2;
      inliers[static_cast<std::size_t>(p)] = in;
      count += in;
    }
    if (count > best_count) {
      best_count = count;
      best_inliers = std::move(inliers);
    }
  }

  if (best_count < std::max<Index>(min_inliers, 3))
    throw NoConsensusError("no affine consensus reached the inlier quota");

  CorrespondencesT<Scalar> kept;
  kept.source.resize(2, best_count);
  kept.target.resize(2, best_count);
  if (c.weights.size()) kept.weights.resize(best_count);
  Index out = 0;
  for (Index p = 0; p < n; ++p) {
    if (!best_inliers[static_cast<std::size_t>(p)]) continue;
    kept.source.col(out) = c.source.col(p);
    kept.target.col(out) = c.target.col(p);
    if (c.weights.size()) kept.weights(out) = c.weights(p);
    ++out;
  }
  return estimate_affine(kept);
}

// Regularized least-squares fit of spline control points:
// minimizes sum_i w_i |tps(p_i) - q_i|^2 + lambda |V - lattice|^2.
// lambda = 0 demands the basis have full rank; lambda -> infinity pulls the
// control points to the lattice (the identity warp).
template <typename Scalar>
ThinPlateSpline<Scalar> estimate_tps(const CorrespondencesT<Scalar>& c, Scalar lambda) {
  c.validate();
  if (lambda < Scalar(0)) throw std::invalid_argument("lambda must be non-negative");
  const Index n = c.size();
  if (n < 1) throw DegenerateCorrespondencesError("spline estimation requires at least 1 pair");

  Eigen::Matrix<Scalar, Eigen::Dynamic, 9> basis = tps_cardinal_basis(c.source);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 2> rhs = c.target.transpose();
  if (c.weights.size()) {
    const ArrayX<Scalar> sw = c.weights.array().sqrt();
    basis.array().colwise() *= sw;
    rhs.array().colwise() *= sw;
  }

  const auto& lattice = ThinPlateSpline<Scalar>::canonical_lattice();
  Eigen::Matrix<Scalar, 9, 2> control;
  if (lambda == Scalar(0)) {
    Eigen::ColPivHouseholderQR<Eigen::Matrix<Scalar, Eigen::Dynamic, 9>> qr(basis);
    if (qr.rank() < 9)
      throw IllPosedError("unregularized spline fit needs at least 9 independent pairs");
    control = qr.solve(rhs);
  } else {
    const Eigen::Matrix<Scalar, 9, 9> gram =
        basis.transpose() * basis + lambda * Eigen::Matrix<Scalar, 9, 9>::Identity();
    const Eigen::Matrix<Scalar, 9, 2> moment =
        basis.transpose() * rhs + lambda * lattice.transpose();
    control = gram.ldlt().solve(moment);
  }
  return ThinPlateSpline<Scalar>::from_control_points(control.transpose());
}

}  // namespace ads
