#pragma once

#include "ads/common.hpp"
#include "ads/image.hpp"

#include <string>
#include <vector>

namespace ads {

// Generator settings. The blob is a harmonically perturbed disc of base
// radius r0: its boundary sits at r(phi) = r0 * (1 + amplitude * d *
// cos(harmonic * phi)) in object coordinates, posed into the frame by a
// rotation, an isotropic scale and a translation. Appearance blends two
// fixed foreground colors.
struct SceneConfig {
  double base_radius = 0.5;
  double shape_amplitude = 0.05;
  int shape_harmonic = 3;
  int keypoint_count = 12;
  Eigen::Vector3d color_low{0.85, 0.30, 0.10};
  Eigen::Vector3d color_high{0.10, 0.35, 0.85};
  double background_low = 0.1;
  double background_high = 0.9;

  // Per-image sampling ranges; pair differences consequently span up to
  // twice these ranges for shape, rotation and translation.
  double shape_min = -4.0, shape_max = 4.0;
  double scale_min = 0.7, scale_max = 1.3;
  double rotation_min_deg = -18.0, rotation_max_deg = 18.0;
  double translation_min = -0.4, translation_max = 0.4;
  double appearance_min = 0.0, appearance_max = 1.0;
};

// Full description of one rendered scene.
struct SceneDescriptor {
  double d = 0;          // shape coefficient
  double sx = 1, sy = 1; // scale (generation keeps sy == sx)
  double theta_deg = 0;  // rotation
  double tx = 0, ty = 0; // translation
  double a = 0;          // appearance blend in [0, 1]
  std::uint64_t background_seed = 0;
};

// Exact factor-wise difference between two descriptors. Scale differences
// are ratios, shape and appearance are absolute gaps, the rest are signed.
struct GroundTruthDifference {
  double d = 0;
  double sx = 1, sy = 1;
  double theta_deg = 0;
  double tx = 0, ty = 0;
  double a = 0;
};

struct RenderResult {
  Image image;
  Mask mask;
  Matrix2Xd keypoints;  // boundary samples at evenly spaced object angles
};

RenderResult render(const SceneDescriptor& desc, Index width, Index height,
                    const SceneConfig& config = {});

GroundTruthDifference gt_difference(const SceneDescriptor& source, const SceneDescriptor& target);

// One evaluation pair: file paths are relative to the manifest location.
struct ManifestEntry {
  int pair_index = 0;
  SceneDescriptor source;
  SceneDescriptor target;
  std::string source_image;
  std::string source_mask;
  std::string target_image;
  std::string keypoint_file;
  GroundTruthDifference gt;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

struct DatasetResult {
  DatasetManifest manifest;
  std::string manifest_path;
};

// Samples `image_count` scenes i.i.d., renders and writes them all, pairs
// disjoint images at random and writes per-pair keypoint files plus a
// JSON-lines manifest. Fully deterministic for a fixed seed.
DatasetResult sample_dataset(int image_count, int pair_count, std::uint64_t seed, Index width,
                             Index height, const std::string& output_dir,
                             const SceneConfig& config = {});

}  // namespace ads
