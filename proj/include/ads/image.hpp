#pragma once

#include "ads/common.hpp"

namespace ads {

// Dense RGB image. Channel values live in [0, 1]. Pixels are stored as
// columns of a 3 x (width*height) matrix in row-major pixel order, i.e.
// column index p = row * width + col.
template <typename Scalar>
struct ImageT {
  Index width = 0;
  Index height = 0;
  Eigen::Matrix<Scalar, 3, Eigen::Dynamic> rgb;

  ImageT() = default;
  ImageT(Index w, Index h) : width(w), height(h), rgb(3, w * h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("image dimensions must be positive");
    rgb.setZero();
  }

  static ImageT solid(Index w, Index h, const Eigen::Matrix<Scalar, 3, 1>& color) {
    ImageT img(w, h);
    img.rgb.colwise() = color;
    return img;
  }

  Index pixel_count() const { return width * height; }

  bool same_size(const ImageT& other) const {
    return width == other.width && height == other.height;
  }

  Eigen::Matrix<Scalar, 3, 1> pixel(Index row, Index col) const {
    return rgb.col(row * width + col);
  }

  void set_pixel(Index row, Index col, const Eigen::Matrix<Scalar, 3, 1>& color) {
    rgb.col(row * width + col) = color;
  }
};

// Binary foreground mask; values are exactly 0 or 1, same layout as ImageT.
template <typename Scalar>
struct MaskT {
  Index width = 0;
  Index height = 0;
  Eigen::Array<Scalar, 1, Eigen::Dynamic> values;

  MaskT() = default;
  MaskT(Index w, Index h) : width(w), height(h), values(1, w * h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("mask dimensions must be positive");
    values.setZero();
  }

  static MaskT ones(Index w, Index h) {
    MaskT m(w, h);
    m.values.setOnes();
    return m;
  }

  Index pixel_count() const { return width * height; }
  Scalar foreground_count() const { return values.sum(); }
};

// Per-pixel non-negative scalar field (e.g. squared-error surface).
template <typename Scalar>
struct HeatmapT {
  Index width = 0;
  Index height = 0;
  Eigen::Array<Scalar, 1, Eigen::Dynamic> values;

  HeatmapT() = default;
  HeatmapT(Index w, Index h) : width(w), height(h), values(1, w * h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("heatmap dimensions must be positive");
    values.setZero();
  }
};

using Image = ImageT<double>;
using Mask = MaskT<double>;
using Heatmap = HeatmapT<double>;

}  // namespace ads
