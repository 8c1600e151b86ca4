#pragma once

#include "ads/affine.hpp"
#include "ads/common.hpp"
#include "ads/image.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

namespace test_support {

// Self-cleaning unique directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix) {
    std::random_device rd;
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto candidate =
          std::filesystem::temp_directory_path() / (prefix + "_" + std::to_string(rd()));
      std::error_code ec;
      if (std::filesystem::create_directories(candidate, ec) && !ec) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("could not create temp directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline ads::Image random_image(ads::Index w, ads::Index h, std::uint64_t seed) {
  ads::Rng rng(seed);
  ads::Image img(w, h);
  for (ads::Index p = 0; p < img.pixel_count(); ++p)
    for (int ch = 0; ch < 3; ++ch) img.rgb(ch, p) = rng.uniform();
  return img;
}

inline ads::Matrix2Xd random_points(ads::Index n, std::uint64_t seed, double lo = -0.9,
                                    double hi = 0.9) {
  ads::Rng rng(seed);
  ads::Matrix2Xd pts(2, n);
  for (ads::Index i = 0; i < n; ++i) {
    pts(0, i) = rng.uniform(lo, hi);
    pts(1, i) = rng.uniform(lo, hi);
  }
  return pts;
}

inline ads::AffineTransform random_affine(std::uint64_t seed) {
  ads::Rng rng(seed);
  ads::AffineDecomposition<double> d;
  d.theta_deg = rng.uniform(-60.0, 60.0);
  d.shear = rng.uniform(-0.3, 0.3);
  d.sx = std::exp(rng.uniform(std::log(0.5), std::log(2.0)));
  d.sy = std::exp(rng.uniform(std::log(0.5), std::log(2.0)));
  d.tx = rng.uniform(-0.5, 0.5);
  d.ty = rng.uniform(-0.5, 0.5);
  return ads::recompose_affine(d);
}

// Smallest angular gap in degrees, wrap-around aware.
inline double angle_diff_deg(double a, double b) {
  double d = std::fmod(a - b, 360.0);
  if (d > 180.0) d -= 360.0;
  if (d <= -180.0) d += 360.0;
  return std::abs(d);
}

inline double max_param_diff(const ads::AffineTransform& a, const ads::AffineTransform& b) {
  const auto pa = a.params();
  const auto pb = b.params();
  double worst = 0;
  for (std::size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, std::abs(pa[i] - pb[i]));
  return worst;
}

}  // namespace test_support
