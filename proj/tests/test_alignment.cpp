#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ads/alignment.hpp"
#include "support.hpp"

#include <cmath>

using namespace ads;
using test_support::max_param_diff;
using test_support::random_affine;
using test_support::random_points;

namespace {

Correspondences exact_pairs(const AffineTransform& t, Index n, std::uint64_t seed,
                            double lo = -0.9, double hi = 0.9) {
  Correspondences c;
  c.source = random_points(n, seed, lo, hi);
  c.target = t.apply(c.source);
  return c;
}

}  // namespace

TEST_CASE("keypoint distance is the mean pair separation") {
  Correspondences c;
  c.source.resize(2, 2);
  c.target.resize(2, 2);
  c.source << 0, 0, 0, 0;
  c.target << 0.2, 0, 0, 0.4;
  CHECK(keypoint_distance(c) == doctest::Approx(0.3).epsilon(1e-15));

  c.target = c.source;
  CHECK(keypoint_distance(c) == 0.0);

  Correspondences empty;
  CHECK_THROWS_AS(keypoint_distance(empty), std::invalid_argument);
}

TEST_CASE("correspondence validation") {
  Correspondences c;
  c.source = random_points(4, 1);
  c.target = random_points(3, 2);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  c.target = random_points(4, 2);
  c.weights.resize(2);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  c.weights.resize(4);
  c.weights << 1, 1, -0.5, 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);

  c.weights << 1, 0, 2, 1;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("least squares recovers exact affine correspondences") {
  SUBCASE("identity pairs give the identity") {
    Correspondences c = exact_pairs(AffineTransform::identity(), 8, 3);
    const AffineTransform t = estimate_affine(c);
    CHECK(max_param_diff(t, AffineTransform::identity()) < 1e-12);
  }
  SUBCASE("scale plus translation") {
    AffineTransform truth;
    truth.linear << 1.3, 0, 0, 0.7;
    truth.translation << 0.2, -0.1;
    const AffineTransform t = estimate_affine(exact_pairs(truth, 10, 4));
    CHECK(max_param_diff(t, truth) < 1e-12);
  }
  SUBCASE("random transforms, many trials") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const AffineTransform truth = random_affine(seed);
      const AffineTransform t = estimate_affine(exact_pairs(truth, 12, seed + 500));
      CHECK(max_param_diff(t, truth) < 1e-10);
    }
  }
  SUBCASE("three exact pairs are enough") {
    const AffineTransform truth = random_affine(7);
    const AffineTransform t = estimate_affine(exact_pairs(truth, 3, 8));
    CHECK(max_param_diff(t, truth) < 1e-10);
  }
}

TEST_CASE("least squares is robust to moderate noise") {
  const AffineTransform truth = random_affine(20);
  Correspondences c = exact_pairs(truth, 200, 21);
  Rng rng(22);
  const double sigma = 1e-3;
  for (Index i = 0; i < c.size(); ++i) {
    c.target(0, i) += sigma * (2.0 * rng.uniform() - 1.0);
    c.target(1, i) += sigma * (2.0 * rng.uniform() - 1.0);
  }
  const AffineTransform t = estimate_affine(c);
  CHECK(max_param_diff(t, truth) < 10 * sigma);
}

TEST_CASE("translating all targets shifts only the translation estimate") {
  const AffineTransform truth = random_affine(30);
  Correspondences c = exact_pairs(truth, 15, 31);
  Rng rng(32);
  for (Index i = 0; i < c.size(); ++i) {
    c.target(0, i) += 2e-3 * (2.0 * rng.uniform() - 1.0);
    c.target(1, i) += 2e-3 * (2.0 * rng.uniform() - 1.0);
  }
  const AffineTransform base = estimate_affine(c);
  const Vector2d shift(0.31, -0.12);
  Correspondences moved = c;
  moved.target.colwise() += shift;
  const AffineTransform shifted = estimate_affine(moved);
  CHECK((shifted.linear - base.linear).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((shifted.translation - base.translation - shift).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("degenerate correspondences are rejected") {
  SUBCASE("too few pairs") {
    Correspondences c = exact_pairs(AffineTransform::identity(), 2, 40);
    CHECK_THROWS_AS(estimate_affine(c), DegenerateCorrespondencesError);
  }
  SUBCASE("collinear source points") {
    Correspondences c;
    c.source.resize(2, 5);
    for (Index i = 0; i < 5; ++i) c.source.col(i) << 0.1 * static_cast<double>(i), 0.2 * static_cast<double>(i);
    c.target = c.source;
    CHECK_THROWS_AS(estimate_affine(c), DegenerateCorrespondencesError);
  }
  SUBCASE("coincident source points") {
    Correspondences c;
    c.source = Matrix2Xd::Zero(2, 6);
    c.target = random_points(6, 41);
    CHECK_THROWS_AS(estimate_affine(c), DegenerateCorrespondencesError);
  }
}

TEST_CASE("integer weights act like pair duplication") {
  const AffineTransform truth = random_affine(50);
  Correspondences noisy = exact_pairs(truth, 8, 51);
  Rng rng(52);
  for (Index i = 0; i < noisy.size(); ++i) {
    noisy.target(0, i) += 0.02 * (2.0 * rng.uniform() - 1.0);
    noisy.target(1, i) += 0.02 * (2.0 * rng.uniform() - 1.0);
  }

  Correspondences weighted = noisy;
  weighted.weights = VectorXd::Ones(8);
  weighted.weights(0) = 3.0;

  Correspondences duplicated;
  duplicated.source.resize(2, 10);
  duplicated.target.resize(2, 10);
  duplicated.source << noisy.source, noisy.source.col(0), noisy.source.col(0);
  duplicated.target << noisy.target, noisy.target.col(0), noisy.target.col(0);

  CHECK(max_param_diff(estimate_affine(weighted), estimate_affine(duplicated)) < 1e-12);

  SUBCASE("zero-weight pairs are ignored") {
    Correspondences zeroed = noisy;
    zeroed.weights = VectorXd::Ones(8);
    zeroed.weights(7) = 0.0;
    Correspondences dropped;
    dropped.source = noisy.source.leftCols(7);
    dropped.target = noisy.target.leftCols(7);
    CHECK(max_param_diff(estimate_affine(zeroed), estimate_affine(dropped)) < 1e-12);
  }
}

TEST_CASE("ransac equals least squares on clean data") {
  const AffineTransform truth = random_affine(60);
  const Correspondences c = exact_pairs(truth, 20, 61);
  RansacConfig config;
  config.seed = 7;
  const AffineTransform robust = estimate_affine_ransac(c, config);
  const AffineTransform plain = estimate_affine(c);
  CHECK(max_param_diff(robust, plain) < 1e-12);
}

TEST_CASE("ransac shrugs off gross outliers") {
  const AffineTransform truth = random_affine(70);
  Correspondences c = exact_pairs(truth, 20, 71);
  Rng rng(72);
  // Corrupt 6 of 20 pairs far beyond the inlier threshold.
  for (Index i = 0; i < 6; ++i) {
    c.target(0, 3 * i) += (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 1.5);
    c.target(1, 3 * i) += (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.5, 1.5);
  }
  RansacConfig config;
  config.seed = 73;
  const AffineTransform robust = estimate_affine_ransac(c, config);
  CHECK(max_param_diff(robust, truth) < 1e-9);
  // A plain fit is dragged away from the truth by the same data.
  CHECK(max_param_diff(estimate_affine(c), truth) > 1e-3);
}

TEST_CASE("ransac is deterministic for a fixed seed") {
  const AffineTransform truth = random_affine(80);
  Correspondences c = exact_pairs(truth, 16, 81);
  c.target(0, 2) += 0.8;
  c.target(1, 9) -= 0.6;
  RansacConfig config;
  config.seed = 82;
  const AffineTransform a = estimate_affine_ransac(c, config);
  const AffineTransform b = estimate_affine_ransac(c, config);
  CHECK(a.params() == b.params());
}

TEST_CASE("ransac refuses incoherent data") {
  SUBCASE("structureless targets never reach the quota") {
    Correspondences c;
    c.source = random_points(12, 90);
    c.target = random_points(12, 91);
    RansacConfig config;
    config.inlier_threshold = 1e-6;
    config.seed = 92;
    CHECK_THROWS_AS(estimate_affine_ransac(c, config), NoConsensusError);
  }
  SUBCASE("an explicit quota above the inlier count fails") {
    const AffineTransform truth = random_affine(95);
    Correspondences c = exact_pairs(truth, 14, 96);
    for (Index i = 0; i < 4; ++i) c.target(0, i) += 1.0;
    RansacConfig config;
    config.min_inliers = 11;  // only 10 clean pairs remain
    config.seed = 97;
    CHECK_THROWS_AS(estimate_affine_ransac(c, config), NoConsensusError);
  }
}

TEST_CASE("spline fit on identical pairs returns the lattice") {
  Correspondences c;
  c.source = random_points(16, 100);
  c.target = c.source;
  const Tps tps = estimate_tps(c, 1e-3);
  CHECK((tps.control_points() - Tps::canonical_lattice()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("unregularized fit recovers generating control points") {
  Rng rng(110);
  Eigen::Matrix<double, 2, 9> control = Tps::canonical_lattice();
  for (int k = 0; k < 9; ++k) {
    control(0, k) += rng.uniform(-0.2, 0.2);
    control(1, k) += rng.uniform(-0.2, 0.2);
  }
  const Tps truth = tps_from_control_points(control);
  Correspondences c;
  c.source = random_points(24, 111);
  c.target = truth.apply(c.source);
  const Tps fitted = estimate_tps(c, 0.0);
  CHECK((fitted.control_points() - control).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("heavy regularization pulls the fit to the identity") {
  Rng rng(120);
  Eigen::Matrix<double, 2, 9> control = Tps::canonical_lattice();
  for (int k = 0; k < 9; ++k) {
    control(0, k) += rng.uniform(-0.3, 0.3);
    control(1, k) += rng.uniform(-0.3, 0.3);
  }
  Correspondences c;
  c.source = random_points(20, 121);
  c.target = tps_from_control_points(control).apply(c.source);
  const Tps heavy = estimate_tps(c, 1e12);
  CHECK((heavy.control_points() - Tps::canonical_lattice()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("unregularized fit needs nine independent pairs") {
  Correspondences c;
  c.source = random_points(5, 130);
  c.target = c.source;
  CHECK_THROWS_AS(estimate_tps(c, 0.0), IllPosedError);
  CHECK_NOTHROW(estimate_tps(c, 1e-3));
}

TEST_CASE("negative regularization is rejected") {
  Correspondences c;
  c.source = random_points(10, 140);
  c.target = c.source;
  CHECK_THROWS_AS(estimate_tps(c, -1e-6), std::invalid_argument);
}

TEST_CASE("spline fit matches an independent normal-equations solve") {
  Rng rng(150);
  Correspondences c;
  c.source = random_points(14, 151);
  c.target = c.source;
  for (Index i = 0; i < c.size(); ++i) {
    c.target(0, i) += rng.uniform(-0.1, 0.1);
    c.target(1, i) += rng.uniform(-0.1, 0.1);
  }
  c.weights.resize(14);
  for (Index i = 0; i < 14; ++i) c.weights(i) = rng.uniform(0.2, 2.0);
  const double lambda = 0.05;
  const Tps fitted = estimate_tps(c, lambda);

  const Eigen::Matrix<double, Eigen::Dynamic, 9> basis = tps_cardinal_basis(c.source);
  const Eigen::Matrix<double, 9, 9> gram =
      basis.transpose() * c.weights.asDiagonal() * basis +
      lambda * Eigen::Matrix<double, 9, 9>::Identity();
  const Eigen::Matrix<double, 9, 2> moment =
      basis.transpose() * c.weights.asDiagonal() * c.target.transpose() +
      lambda * Tps::canonical_lattice().transpose();
  const Eigen::Matrix<double, 9, 2> expected = gram.fullPivLu().solve(moment);
  CHECK((fitted.control_points() - expected.transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fitted control points minimize the regularized objective") {
  Rng rng(160);
  Correspondences c;
  c.source = random_points(12, 161);
  c.target = c.source;
  for (Index i = 0; i < c.size(); ++i) {
    c.target(0, i) += rng.uniform(-0.15, 0.15);
    c.target(1, i) += rng.uniform(-0.15, 0.15);
  }
  const double lambda = 0.02;
  const Tps fitted = estimate_tps(c, lambda);

  const auto objective = [&](const Eigen::Matrix<double, 2, 9>& v) {
    const Tps tps = tps_from_control_points(v);
    const double data = (tps.apply(c.source) - c.target).colwise().squaredNorm().sum();
    const double reg = (v - Tps::canonical_lattice()).squaredNorm();
    return data + lambda * reg;
  };
  const double at_fit = objective(fitted.control_points());
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::Matrix<double, 2, 9> perturbed = fitted.control_points();
    for (int k = 0; k < 9; ++k) {
      perturbed(0, k) += rng.uniform(-1e-4, 1e-4);
      perturbed(1, k) += rng.uniform(-1e-4, 1e-4);
    }
    CHECK(objective(perturbed) >= at_fit - 1e-12);
  }
}

TEST_CASE("spline fit weights act like pair duplication") {
  Rng rng(170);
  Correspondences base;
  base.source = random_points(10, 171);
  base.target = base.source;
  for (Index i = 0; i < base.size(); ++i) {
    base.target(0, i) += rng.uniform(-0.1, 0.1);
    base.target(1, i) += rng.uniform(-0.1, 0.1);
  }

  Correspondences weighted = base;
  weighted.weights = VectorXd::Ones(10);
  weighted.weights(4) = 2.0;

  Correspondences duplicated;
  duplicated.source.resize(2, 11);
  duplicated.target.resize(2, 11);
  duplicated.source << base.source, base.source.col(4);
  duplicated.target << base.target, base.target.col(4);

  const double lambda = 1e-3;
  CHECK((estimate_tps(weighted, lambda).control_points() -
         estimate_tps(duplicated, lambda).control_points())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}
