#pragma once

#include "ads/alignment.hpp"
#include "ads/image.hpp"
#include "ads/pipeline.hpp"
#include "ads/synthscene.hpp"

#include <cstdint>
#include <string>

namespace ads {

// 8-bit quantization used by every image writer; load(save(img)) is exact
// for values already on the 1/255 lattice.
std::uint8_t quantize8(double v);

// Images: PPM (P6) and PNG, dispatched by file extension.
Image load_image(const std::string& path);
void save_image(const std::string& path, const Image& image);
Image load_ppm(const std::string& path);
void save_ppm(const std::string& path, const Image& image);
Image load_png(const std::string& path);
void save_png(const std::string& path, const Image& image);

// Masks: PGM (P5) or grayscale PNG; loading thresholds at 128.
Mask load_mask(const std::string& path);
void save_mask(const std::string& path, const Mask& mask);

// Heatmap rendering through a fixed monotone color ramp over [0,1].
Image heatmap_to_image(const Heatmap& heatmap);
void save_heatmap_png(const std::string& path, const Heatmap& heatmap);

// Transform parameters:
// {"affine": [r11,r12,r21,r22,tx,ty], "tps_control_points": [[x...],[y...]]}
// The spline control points live in the affine-aligned frame.
std::string transforms_to_json(const AffineTransform& affine,
                               const Eigen::Matrix<double, 2, 9>& tps_control);
ImportedTransforms parse_transforms_json(const std::string& text);
ImportedTransforms load_transforms(const std::string& path);
void save_transforms(const std::string& path, const AffineTransform& affine,
                     const Eigen::Matrix<double, 2, 9>& tps_control);

// Keypoint files: {"pairs": [[[sx,sy],[tx,ty]], ...], "weights": [...]}.
// Coordinates are normalized [-1,1] by default; "units": "pixel" marks
// pixel coordinates, converted on load using the two image sizes.
Correspondences load_keypoints(const std::string& path, Index source_width, Index source_height,
                               Index target_width, Index target_height);
void save_keypoints(const std::string& path, const Correspondences& correspondences);

// Difference report JSON.
std::string report_to_json(const DifferenceReport& report);
void save_report(const std::string& path, const DifferenceReport& report);

// Dataset manifest: JSON lines, one pair per line, paths relative to the
// manifest file.
std::string manifest_entry_to_json(const ManifestEntry& entry);
DatasetManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const DatasetManifest& manifest);

// Generator config: plain-text "key = value" lines, '#' comments.
SceneConfig load_scene_config(const std::string& path);
void save_scene_config(const std::string& path, const SceneConfig& config);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ads
