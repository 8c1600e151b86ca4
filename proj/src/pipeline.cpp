#include "ads/pipeline.hpp"

#include "ads/imaging.hpp"

namespace ads {

DifferenceReport explain_pair(const PairInput& input, const PipelineConfig& cfg,
                              PipelineArtifacts* artifacts) {
  if (!input.source.same_size(input.target))
    throw std::invalid_argument("source and target dimensions differ");
  if (input.source.width != input.source_mask.width ||
      input.source.height != input.source_mask.height)
    throw std::invalid_argument("source mask dimensions differ from source image");
  if (!input.correspondences && !input.transforms)
    throw std::invalid_argument("need correspondences or imported transforms");

  const Index w = input.source.width;
  const Index h = input.source.height;

  DifferenceReport report;
  Tps tps = Tps::identity();
  if (input.transforms) {
    report.source = TransformSource::imported;
    report.affine = input.transforms->affine;
    tps = Tps::from_control_points(input.transforms->tps_control);
  } else {
    report.source = TransformSource::estimated;
    const Correspondences& c = *input.correspondences;
    c.validate();
    report.affine = cfg.use_ransac ? estimate_affine_ransac(c, cfg.ransac) : estimate_affine(c);
    Correspondences aligned;
    aligned.source = report.affine.apply(c.source);
    aligned.target = c.target;
    aligned.weights = c.weights;
    tps = estimate_tps(aligned, cfg.tps_lambda);
  }
  report.tps_control = tps.control_points();

  report.measures = pose_measures(report.affine);
  report.measures.d = deformation_magnitude(tps, w, h);

  // Single-pass composite warp: output pixel g first walks back through the
  // spline (Newton inversion), then through the affine, and samples the
  // source once. Pixels with no spline preimage fall outside and take fill.
  const Matrix2Xd grid = identity_grid(w, h);
  const Matrix2Xd spline_preimage = tps.invert(grid, cfg.newton_iterations);
  const Matrix2Xd source_coords = report.affine.inverse().apply(spline_preimage);

  const Image warped = warp(input.source, source_coords);
  const Mask warped_mask = warp_mask(input.source_mask, source_coords);
  if (warped_mask.foreground_count() <= 0)
    throw DegenerateMaskError("object warped fully out of frame");

  report.measures.a = masked_mse(warped, input.target, warped_mask);
  report.baseline_mse = mse(input.source, input.target);

  if (input.correspondences) {
    const Correspondences& c = *input.correspondences;
    Correspondences final_kp;
    final_kp.source = tps.apply(report.affine.apply(c.source));
    final_kp.target = c.target;
    report.residual_keypoint_distance = keypoint_distance(final_kp);
  }

  if (artifacts) {
    artifacts->aligned = warp(input.source, affine_grid(report.affine.inverse(), w, h));
    artifacts->deformed = warped;
    artifacts->warped_mask = warped_mask;
    artifacts->residual = error_heatmap(warped, input.target, warped_mask);
  }
  return report;
}

RemovalDiagnostics removal_check(const PairInput& input, const DifferenceReport& report) {
  if (!input.correspondences)
    throw std::invalid_argument("removal_check needs correspondences");
  const Correspondences& c = *input.correspondences;
  c.validate();

  Correspondences aligned;
  aligned.source = report.affine.apply(c.source);
  aligned.target = c.target;
  aligned.weights = c.weights;

  RemovalDiagnostics diag;
  diag.residual_pose = decompose_affine(estimate_affine(aligned));
  diag.keypoint_distance_initial = keypoint_distance(c);
  diag.keypoint_distance_after_align = keypoint_distance(aligned);

  const Tps tps = Tps::from_control_points(report.tps_control);
  Correspondences deformed;
  deformed.source = tps.apply(aligned.source);
  deformed.target = c.target;
  diag.keypoint_distance_after_deform = keypoint_distance(deformed);
  return diag;
}

}  // namespace ads
