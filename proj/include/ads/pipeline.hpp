#pragma once

#include "ads/affine.hpp"
#include "ads/alignment.hpp"
#include "ads/image.hpp"
#include "ads/tps.hpp"

#include <optional>

namespace ads {

struct PipelineConfig {
  double tps_lambda = 1e-3;
  bool use_ransac = false;
  RansacConfig ransac;
  int newton_iterations = 30;
};

// Previously exported transform parameters, replacing in-process estimation.
struct ImportedTransforms {
  AffineTransform affine;
  Eigen::Matrix<double, 2, 9> tps_control;
};

enum class TransformSource { estimated, imported };

struct PairInput {
  Image source;
  Mask source_mask;
  Image target;
  std::optional<Correspondences> correspondences;
  std::optional<ImportedTransforms> transforms;
};

struct DifferenceReport {
  MeasureSet measures;
  double baseline_mse = 0;  // plain whole-frame MSE, no alignment
  std::optional<double> residual_keypoint_distance;
  TransformSource source = TransformSource::estimated;
  AffineTransform affine;
  Eigen::Matrix<double, 2, 9> tps_control;
};

// Optional visual byproducts of explain_pair.
struct PipelineArtifacts {
  Image aligned;       // source after the affine stage only
  Image deformed;      // source after affine and spline stages
  Mask warped_mask;    // source mask carried through both stages
  Heatmap residual;    // masked squared error against the target
};

// Runs the three stages on one pair: fit (or import) an affine from the
// correspondences, fit (or import) a spline on the affine-aligned points,
// then compare the fully warped source to the target under the warped mask.
DifferenceReport explain_pair(const PairInput& input, const PipelineConfig& config = {},
                              PipelineArtifacts* artifacts = nullptr);

// Diagnostics for the claim that each stage removes what it measures:
// re-estimating an affine between already-aligned keypoints should give the
// identity, and the spline stage should absorb most of what remains.
struct RemovalDiagnostics {
  AffineDecomposition<double> residual_pose;
  double keypoint_distance_initial = 0;
  double keypoint_distance_after_align = 0;
  double keypoint_distance_after_deform = 0;
};

RemovalDiagnostics removal_check(const PairInput& input, const DifferenceReport& report);

}  // namespace ads
