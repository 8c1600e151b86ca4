#include "ads/synthscene.hpp"

#include "ads/imaging.hpp"
#include "ads/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <vector>

namespace fs = std::filesystem;

namespace ads {

namespace {

void validate_descriptor(const SceneDescriptor& desc, const SceneConfig& cfg) {
  const bool finite = std::isfinite(desc.d) && std::isfinite(desc.sx) && std::isfinite(desc.sy) &&
                      std::isfinite(desc.theta_deg) && std::isfinite(desc.tx) &&
                      std::isfinite(desc.ty) && std::isfinite(desc.a);
  if (!finite) throw InvalidDescriptorError("descriptor fields must be finite");
  if (desc.sx <= 0 || desc.sy <= 0)
    throw InvalidDescriptorError("descriptor scale factors must be positive");
  if (desc.a < 0 || desc.a > 1)
    throw InvalidDescriptorError("descriptor appearance must lie in [0, 1]");
  if (cfg.shape_amplitude * std::abs(desc.d) >= 1.0)
    throw InvalidDescriptorError("shape coefficient collapses the blob boundary");
}

double background_gray(const SceneDescriptor& desc, const SceneConfig& cfg) {
  Rng rng(desc.background_seed);
  return cfg.background_low + (cfg.background_high - cfg.background_low) * rng.uniform();
}

std::string indexed_name(const char* stem, int index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%05d.%s", stem, index, ext);
  return buf;
}

}  // namespace

RenderResult render(const SceneDescriptor& desc, Index width, Index height,
                    const SceneConfig& cfg) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("render dimensions must be positive");
  validate_descriptor(desc, cfg);

  const double theta = desc.theta_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta), s = std::sin(theta);
  Matrix2d linear;
  linear << c * desc.sx, -s * desc.sy, s * desc.sx, c * desc.sy;  // Rot * Scale
  const Vector2d translation(desc.tx, desc.ty);
  const Matrix2d inverse = linear.inverse();

  const Eigen::Vector3d fill = desc.a * cfg.color_high + (1.0 - desc.a) * cfg.color_low;
  const double gray = background_gray(desc, cfg);

  RenderResult out;
  out.image = Image::solid(width, height, Eigen::Vector3d::Constant(gray));
  out.mask = Mask(width, height);

  const Matrix2Xd grid = identity_grid(width, height);
  for (Index p = 0; p < grid.cols(); ++p) {
    const Vector2d obj = inverse * (grid.col(p) - translation);
    const double rho = obj.norm();
    const double phi = std::atan2(obj(1), obj(0));
    const double boundary =
        cfg.base_radius * (1.0 + cfg.shape_amplitude * desc.d * std::cos(cfg.shape_harmonic * phi));
    if (rho <= boundary) {
      out.image.rgb.col(p) = fill;
      out.mask.values(p) = 1.0;
    }
  }

  out.keypoints.resize(2, cfg.keypoint_count);
  for (int k = 0; k < cfg.keypoint_count; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / cfg.keypoint_count;
    const double radius =
        cfg.base_radius * (1.0 + cfg.shape_amplitude * desc.d * std::cos(cfg.shape_harmonic * phi));
    const Vector2d obj(radius * std::cos(phi), radius * std::sin(phi));
    out.keypoints.col(k) = linear * obj + translation;
  }
  return out;
}

GroundTruthDifference gt_difference(const SceneDescriptor& source, const SceneDescriptor& target) {
  GroundTruthDifference gt;
  gt.d = std::abs(target.d - source.d);
  gt.sx = target.sx / source.sx;
  gt.sy = target.sy / source.sy;
  gt.theta_deg = target.theta_deg - source.theta_deg;
  gt.tx = target.tx - source.tx;
  gt.ty = target.ty - source.ty;
  gt.a = std::abs(target.a - source.a);
  return gt;
}

DatasetResult sample_dataset(int image_count, int pair_count, std::uint64_t seed, Index width,
                             Index height, const std::string& output_dir,
                             const SceneConfig& cfg) {
  if (image_count < 2) throw std::invalid_argument("need at least 2 images");
  if (pair_count < 1) throw std::invalid_argument("need at least 1 pair");
  if (2 * pair_count > image_count)
    throw std::invalid_argument("pair count must not exceed half the image count");
  if (width <= 0 || height <= 0) throw std::invalid_argument("image size must be positive");

  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (!fs::is_directory(output_dir)) throw IoError("cannot create output directory: " + output_dir);

  Rng rng(seed);
  std::vector<SceneDescriptor> descriptors(static_cast<std::size_t>(image_count));
  for (auto& d : descriptors) {
    d.d = rng.uniform(cfg.shape_min, cfg.shape_max);
    d.sx = d.sy = rng.uniform(cfg.scale_min, cfg.scale_max);
    d.theta_deg = rng.uniform(cfg.rotation_min_deg, cfg.rotation_max_deg);
    d.tx = rng.uniform(cfg.translation_min, cfg.translation_max);
    d.ty = rng.uniform(cfg.translation_min, cfg.translation_max);
    d.a = rng.uniform(cfg.appearance_min, cfg.appearance_max);
    d.background_seed = rng.raw();
  }

  // Random perfect matching: Fisher-Yates shuffle, consecutive indices pair up.
  std::vector<int> order(static_cast<std::size_t>(image_count));
  std::iota(order.begin(), order.end(), 0);
  for (int i = image_count - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i + 1)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }

  std::vector<RenderResult> renders(static_cast<std::size_t>(image_count));
  for (int i = 0; i < image_count; ++i) {
    renders[static_cast<std::size_t>(i)] = render(descriptors[static_cast<std::size_t>(i)], width, height, cfg);
    const fs::path dir(output_dir);
    save_ppm((dir / indexed_name("img", i, "ppm")).string(), renders[static_cast<std::size_t>(i)].image);
    save_mask((dir / indexed_name("mask", i, "pgm")).string(), renders[static_cast<std::size_t>(i)].mask);
  }

  DatasetResult result;
  for (int pair = 0; pair < pair_count; ++pair) {
    const int src = order[static_cast<std::size_t>(2 * pair)];
    const int tar = order[static_cast<std::size_t>(2 * pair + 1)];

    Correspondences kp;
    kp.source = renders[static_cast<std::size_t>(src)].keypoints;
    kp.target = renders[static_cast<std::size_t>(tar)].keypoints;
    const std::string kp_name = indexed_name("kp", pair, "json");
    save_keypoints((fs::path(output_dir) / kp_name).string(), kp);

    ManifestEntry entry;
    entry.pair_index = pair;
    entry.source = descriptors[static_cast<std::size_t>(src)];
    entry.target = descriptors[static_cast<std::size_t>(tar)];
    entry.source_image = indexed_name("img", src, "ppm");
    entry.source_mask = indexed_name("mask", src, "pgm");
    entry.target_image = indexed_name("img", tar, "ppm");
    entry.keypoint_file = kp_name;
    entry.gt = gt_difference(entry.source, entry.target);
    result.manifest.entries.push_back(std::move(entry));
  }

  result.manifest_path = (fs::path(output_dir) / "manifest.jsonl").string();
  save_manifest(result.manifest_path, result.manifest);
  save_scene_config((fs::path(output_dir) / "generator.cfg").string(), cfg);
  return result;
}

}  // namespace ads
