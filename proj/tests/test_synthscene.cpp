#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ads/alignment.hpp"
#include "ads/imaging.hpp"
#include "ads/io.hpp"
#include "ads/synthscene.hpp"
#include "support.hpp"

#include <cmath>
#include <filesystem>
#include <set>

using namespace ads;
using test_support::TempDir;
using test_support::angle_diff_deg;

TEST_CASE("unit blob covers the disc area") {
  SceneDescriptor desc;  // d = 0: a circle of radius 0.5 at the center
  const RenderResult r = render(desc, 256, 256);
  const double fraction = r.mask.foreground_count() / static_cast<double>(r.mask.pixel_count());
  const double expected = std::numbers::pi / 16.0;
  CHECK(std::abs(fraction - expected) / expected < 0.02);
  CHECK(r.image.width == 256);
  CHECK(r.keypoints.cols() == 12);
}

TEST_CASE("fill color blends the two endpoints") {
  const SceneConfig cfg;
  for (const double a : {0.0, 1.0, 0.35}) {
    SceneDescriptor desc;
    desc.a = a;
    const RenderResult r = render(desc, 64, 64);
    const Eigen::Vector3d expected = a * cfg.color_high + (1.0 - a) * cfg.color_low;
    CHECK(r.image.pixel(32, 32) == expected);
  }
}

TEST_CASE("appearance-only pairs differ exactly by the fill gap") {
  SceneDescriptor lo, hi;
  lo.a = 0.2;
  hi.a = 0.9;
  lo.background_seed = hi.background_seed = 5;
  const RenderResult a = render(lo, 48, 48);
  const RenderResult b = render(hi, 48, 48);
  CHECK((a.mask.values == b.mask.values).all());
  const SceneConfig cfg;
  const Eigen::Vector3d gap = 0.7 * (cfg.color_high - cfg.color_low);
  CHECK(masked_mse(a.image, b.image, a.mask) ==
        doctest::Approx(gap.squaredNorm() / 3.0).epsilon(1e-12));
}

TEST_CASE("background gray is seeded and in range") {
  SceneDescriptor desc;
  desc.background_seed = 99;
  const RenderResult a = render(desc, 32, 32);
  const RenderResult b = render(desc, 32, 32);
  const Eigen::Vector3d corner = a.image.pixel(0, 0);
  CHECK(corner == b.image.pixel(0, 0));
  CHECK(corner(0) == corner(1));
  CHECK(corner(1) == corner(2));
  CHECK(corner(0) >= 0.1);
  CHECK(corner(0) <= 0.9);

  desc.background_seed = 100;
  CHECK(render(desc, 32, 32).image.pixel(0, 0) != corner);
}

TEST_CASE("quarter turn rotates the keypoints in closed form") {
  SceneDescriptor desc;
  desc.theta_deg = 90.0;
  const RenderResult r = render(desc, 32, 32);
  for (int k = 0; k < 12; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / 12.0;
    const Vector2d expected(-0.5 * std::sin(phi), 0.5 * std::cos(phi));
    CHECK((r.keypoints.col(k) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("keypoints sit on the posed blob boundary") {
  SceneDescriptor desc;
  desc.d = 2.5;
  desc.sx = desc.sy = 1.15;
  desc.theta_deg = -11.0;
  desc.tx = 0.2;
  desc.ty = -0.1;
  const RenderResult r = render(desc, 64, 64);
  const double theta = desc.theta_deg * std::numbers::pi / 180.0;
  Matrix2d linear;
  linear << std::cos(theta) * desc.sx, -std::sin(theta) * desc.sy,
      std::sin(theta) * desc.sx, std::cos(theta) * desc.sy;
  const Matrix2d inv = linear.inverse();
  for (int k = 0; k < 12; ++k) {
    const Vector2d obj = inv * (r.keypoints.col(k) - Vector2d(desc.tx, desc.ty));
    const double phi = std::atan2(obj(1), obj(0));
    const double boundary = 0.5 * (1.0 + 0.05 * desc.d * std::cos(3.0 * phi));
    CHECK(std::abs(obj.norm() - boundary) < 1e-9);
  }
}

TEST_CASE("invalid descriptors are rejected") {
  SceneDescriptor desc;
  desc.sx = 0.0;
  CHECK_THROWS_AS(render(desc, 16, 16), InvalidDescriptorError);
  desc = {};
  desc.a = 1.5;
  CHECK_THROWS_AS(render(desc, 16, 16), InvalidDescriptorError);
  desc = {};
  desc.ty = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(render(desc, 16, 16), InvalidDescriptorError);
  desc = {};
  desc.d = 20.0;  // amplitude 0.05 * 20 pinches the boundary radius to zero
  CHECK_THROWS_AS(render(desc, 16, 16), InvalidDescriptorError);
  desc = {};
  CHECK_THROWS_AS(render(desc, 0, 16), std::invalid_argument);
}

TEST_CASE("descriptor differences are factor-wise") {
  SceneDescriptor a, b;
  CHECK(gt_difference(a, a).d == 0.0);
  CHECK(gt_difference(a, a).sx == 1.0);
  CHECK(gt_difference(a, a).theta_deg == 0.0);
  CHECK(gt_difference(a, a).a == 0.0);

  a.sx = a.sy = 0.8;
  b.sx = b.sy = 1.2;
  a.theta_deg = 5.0;
  b.theta_deg = -3.0;
  a.d = -1.0;
  b.d = 3.0;
  a.a = 0.9;
  b.a = 0.2;
  a.tx = 0.1;
  b.tx = -0.2;
  const GroundTruthDifference gt = gt_difference(a, b);
  CHECK(gt.sx == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(gt.sy == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(gt.theta_deg == doctest::Approx(-8.0).epsilon(1e-15));
  CHECK(gt.d == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(gt.a == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(gt.tx == doctest::Approx(-0.3).epsilon(1e-15));
}

TEST_CASE("rendered keypoints encode the relative pose exactly") {
  SceneDescriptor src, tar;
  src.d = tar.d = 1.5;  // matching shape so boundary samples correspond
  src.sx = src.sy = 1.0;
  tar.sx = tar.sy = 1.15;
  src.theta_deg = 4.0;
  tar.theta_deg = -6.0;
  src.tx = 0.1;
  src.ty = -0.05;
  tar.tx = -0.2;
  tar.ty = 0.1;

  Correspondences c;
  c.source = render(src, 64, 64).keypoints;
  c.target = render(tar, 64, 64).keypoints;
  const AffineTransform t = estimate_affine(c);
  const MeasureSet m = pose_measures(t);

  CHECK(std::abs(m.sx - 1.15) < 1e-9);
  CHECK(std::abs(m.sy - 1.15) < 1e-9);
  CHECK(angle_diff_deg(m.theta_deg, -10.0) < 1e-9);
  CHECK(std::abs(m.shear) < 1e-9);
  // Relative translation: t_target - L t_source for the relative linear map.
  const Vector2d expected = Vector2d(tar.tx, tar.ty) - t.linear * Vector2d(src.tx, src.ty);
  CHECK(std::abs(m.tx - expected(0)) < 1e-9);
  CHECK(std::abs(m.ty - expected(1)) < 1e-9);
}

TEST_CASE("dataset generation writes a coherent corpus") {
  TempDir dir("ads_synth");
  const DatasetResult result = sample_dataset(6, 3, 17, 24, 24, dir.path());
  REQUIRE(result.manifest.entries.size() == 3);

  std::set<std::string> used_images;
  for (const ManifestEntry& entry : result.manifest.entries) {
    // Perfect matching: no image appears in two pairs or twice in one.
    CHECK(used_images.insert(entry.source_image).second);
    CHECK(used_images.insert(entry.target_image).second);

    const std::filesystem::path base = std::filesystem::path(result.manifest_path).parent_path();
    CHECK(std::filesystem::exists(base / entry.source_image));
    CHECK(std::filesystem::exists(base / entry.source_mask));
    CHECK(std::filesystem::exists(base / entry.target_image));
    CHECK(std::filesystem::exists(base / entry.keypoint_file));

    const GroundTruthDifference expected = gt_difference(entry.source, entry.target);
    CHECK(entry.gt.d == expected.d);
    CHECK(entry.gt.sx == expected.sx);
    CHECK(entry.gt.theta_deg == expected.theta_deg);
    CHECK(entry.gt.tx == expected.tx);
    CHECK(entry.gt.a == expected.a);

    const Correspondences kp = load_keypoints((base / entry.keypoint_file).string(), 24, 24, 24, 24);
    CHECK(kp.size() == 12);
  }

  SUBCASE("manifest reloads to the same entries") {
    const DatasetManifest loaded = load_manifest(result.manifest_path);
    REQUIRE(loaded.entries.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(loaded.entries[i].pair_index == result.manifest.entries[i].pair_index);
      CHECK(loaded.entries[i].source_image == result.manifest.entries[i].source_image);
      CHECK(loaded.entries[i].keypoint_file == result.manifest.entries[i].keypoint_file);
      CHECK(loaded.entries[i].source.d == result.manifest.entries[i].source.d);
      CHECK(loaded.entries[i].source.background_seed ==
            result.manifest.entries[i].source.background_seed);
      CHECK(loaded.entries[i].gt.theta_deg == result.manifest.entries[i].gt.theta_deg);
    }
  }
}

TEST_CASE("dataset generation is byte-deterministic in the seed") {
  TempDir a("ads_synth");
  TempDir b("ads_synth");
  sample_dataset(4, 2, 123, 16, 16, a.path());
  sample_dataset(4, 2, 123, 16, 16, b.path());
  for (const char* name : {"manifest.jsonl", "img_00000.ppm", "mask_00003.pgm", "kp_00001.json",
                           "generator.cfg"}) {
    CHECK(read_text_file(a.file(name)) == read_text_file(b.file(name)));
  }
  TempDir c("ads_synth");
  sample_dataset(4, 2, 124, 16, 16, c.path());
  CHECK(read_text_file(a.file("manifest.jsonl")) != read_text_file(c.file("manifest.jsonl")));
}

TEST_CASE("sampled differences cover the configured ranges") {
  TempDir dir("ads_synth");
  const DatasetResult result = sample_dataset(300, 150, 32, 8, 8, dir.path());
  double theta_sum = 0.0, theta_lo = 0.0, theta_hi = 0.0;
  for (const ManifestEntry& e : result.manifest.entries) {
    theta_sum += e.gt.theta_deg;
    theta_lo = std::min(theta_lo, e.gt.theta_deg);
    theta_hi = std::max(theta_hi, e.gt.theta_deg);
    CHECK(e.gt.theta_deg >= -36.0);
    CHECK(e.gt.theta_deg <= 36.0);
    CHECK(e.gt.sx >= 0.7 / 1.3);
    CHECK(e.gt.sx <= 1.3 / 0.7);
    CHECK(e.gt.sx == e.gt.sy);
    CHECK(std::abs(e.gt.tx) <= 0.8);
    CHECK(std::abs(e.gt.ty) <= 0.8);
    CHECK(e.gt.d >= 0.0);
    CHECK(e.gt.d <= 8.0);
    CHECK(e.gt.a >= 0.0);
    CHECK(e.gt.a <= 1.0);
  }
  CHECK(std::abs(theta_sum / 150.0) < 5.0);  // signed diffs center near zero
  CHECK(theta_lo < -5.0);                    // and actually spread out
  CHECK(theta_hi > 5.0);
}

TEST_CASE("dataset generation rejects bad arguments") {
  TempDir dir("ads_synth");
  CHECK_THROWS_AS(sample_dataset(1, 1, 0, 8, 8, dir.path()), std::invalid_argument);
  CHECK_THROWS_AS(sample_dataset(4, 3, 0, 8, 8, dir.path()), std::invalid_argument);
  CHECK_THROWS_AS(sample_dataset(4, 0, 0, 8, 8, dir.path()), std::invalid_argument);
  CHECK_THROWS_AS(sample_dataset(4, 2, 0, 0, 8, dir.path()), std::invalid_argument);
}

TEST_CASE("generator config round trips through its file format") {
  TempDir dir("ads_synth");
  SceneConfig cfg;
  cfg.base_radius = 0.45;
  cfg.shape_amplitude = 0.07;
  cfg.shape_harmonic = 5;
  cfg.keypoint_count = 16;
  cfg.scale_min = 0.85;
  cfg.scale_max = 1.25;
  cfg.rotation_min_deg = -30.0;
  cfg.rotation_max_deg = 12.5;
  cfg.background_low = 0.2;
  cfg.color_high = Eigen::Vector3d(0.0, 0.5, 1.0);
  const std::string path = dir.file("gen.cfg");
  save_scene_config(path, cfg);
  const SceneConfig loaded = load_scene_config(path);
  CHECK(loaded.base_radius == cfg.base_radius);
  CHECK(loaded.shape_amplitude == cfg.shape_amplitude);
  CHECK(loaded.shape_harmonic == cfg.shape_harmonic);
  CHECK(loaded.keypoint_count == cfg.keypoint_count);
  CHECK(loaded.scale_min == cfg.scale_min);
  CHECK(loaded.scale_max == cfg.scale_max);
  CHECK(loaded.rotation_min_deg == cfg.rotation_min_deg);
  CHECK(loaded.rotation_max_deg == cfg.rotation_max_deg);
  CHECK(loaded.background_low == cfg.background_low);
  CHECK(loaded.color_high == cfg.color_high);

  SUBCASE("unknown keys and missing files are io errors") {
    write_text_file(dir.file("bad.cfg"), "no_such_key = 1\n");
    CHECK_THROWS_AS(load_scene_config(dir.file("bad.cfg")), IoError);
    CHECK_THROWS_AS(load_scene_config(dir.file("absent.cfg")), IoError);
  }
  SUBCASE("comments and blank lines are tolerated") {
    write_text_file(dir.file("ok.cfg"), "# comment\n\nbase_radius = 0.4\n");
    CHECK(load_scene_config(dir.file("ok.cfg")).base_radius == 0.4);
  }
}
