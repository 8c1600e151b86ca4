#pragma once

#include "ads/common.hpp"
#include "ads/image.hpp"

#include <cmath>

namespace ads {

// Normalized coordinate of the center of pixel i along an axis with n pixels.
template <typename Scalar = double>
Scalar pixel_center(Index i, Index n) {
  return Scalar(-1) + Scalar(2) * (Scalar(i) + Scalar(0.5)) / Scalar(n);
}

// Continuous pixel coordinate for a normalized coordinate (inverse of
// pixel_center); integer values land exactly on pixel centers.
template <typename Scalar>
Scalar to_pixel_coord(Scalar x, Index n) {
  return (x + Scalar(1)) * Scalar(0.5) * Scalar(n) - Scalar(0.5);
}

// 2 x (width*height) matrix of pixel-center coordinates in row-major pixel
// order: row 0 holds x, row 1 holds y.
template <typename Scalar = double>
Matrix2X<Scalar> identity_grid(Index width, Index height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("grid dimensions must be positive");
  Matrix2X<Scalar> grid(2, width * height);
  for (Index row = 0; row < height; ++row) {
    const Scalar y = pixel_center<Scalar>(row, height);
    for (Index col = 0; col < width; ++col) {
      grid(0, row * width + col) = pixel_center<Scalar>(col, width);
      grid(1, row * width + col) = y;
    }
  }
  return grid;
}

namespace detail {

// Bilinear sample location for one output pixel. Coordinates outside [-1,1]
// (or non-finite) report oob; in-range coordinates beyond the outermost
// pixel centers clamp to the border. Coordinates within 1e-9 of an exact
// pixel center snap to it so that sampling an image through its own
// identity grid reproduces it bit for bit.
template <typename Scalar>
struct BilinearTap {
  Index i00, i01, i10, i11;
  Scalar w00, w01, w10, w11;
  bool oob;
};

template <typename Scalar>
BilinearTap<Scalar> bilinear_tap(Scalar x, Scalar y, Index width, Index height) {
  BilinearTap<Scalar> tap{};
  const bool inside = x >= Scalar(-1) && x <= Scalar(1) && y >= Scalar(-1) && y <= Scalar(1);
  if (!inside) {
    tap.oob = true;
    return tap;
  }
  Scalar u = to_pixel_coord(x, width);
  Scalar v = to_pixel_coord(y, height);
  const Scalar ur = std::round(u);
  const Scalar vr = std::round(v);
  if (std::abs(u - ur) < Scalar(1e-9)) u = ur;
  if (std::abs(v - vr) < Scalar(1e-9)) v = vr;

  Scalar uf = std::floor(u);
  Scalar vf = std::floor(v);
  Scalar fu = u - uf;
  Scalar fv = v - vf;
  Index u0 = static_cast<Index>(uf);
  Index v0 = static_cast<Index>(vf);
  if (u0 < 0) {
    u0 = 0;
    fu = Scalar(0);
  }
  if (v0 < 0) {
    v0 = 0;
    fv = Scalar(0);
  }
  Index u1 = u0 + 1;
  Index v1 = v0 + 1;
  if (u1 > width - 1) {
    u1 = width - 1;
    u0 = u1;
    fu = Scalar(0);
  }
  if (v1 > height - 1) {
    v1 = height - 1;
    v0 = v1;
    fv = Scalar(0);
  }
  tap.i00 = v0 * width + u0;
  tap.i01 = v0 * width + u1;
  tap.i10 = v1 * width + u0;
  tap.i11 = v1 * width + u1;
  tap.w00 = (Scalar(1) - fu) * (Scalar(1) - fv);
  tap.w01 = fu * (Scalar(1) - fv);
  tap.w10 = (Scalar(1) - fu) * fv;
  tap.w11 = fu * fv;
  tap.oob = false;
  return tap;
}

}  // namespace detail

// Backward warp: output pixel p takes the bilinear sample of `image` at
// grid.col(p). Grid coordinates outside [-1,1] produce `fill`.
template <typename Scalar>
ImageT<Scalar> warp(const ImageT<Scalar>& image, const Matrix2X<Scalar>& grid,
                    const Eigen::Matrix<Scalar, 3, 1>& fill = Eigen::Matrix<Scalar, 3, 1>::Zero()) {
  if (grid.cols() != image.pixel_count())
    throw std::invalid_argument("warp grid size does not match image");
  ImageT<Scalar> out(image.width, image.height);
  for (Index p = 0; p < grid.cols(); ++p) {
    const auto tap = detail::bilinear_tap<Scalar>(grid(0, p), grid(1, p), image.width, image.height);
    if (tap.oob) {
      out.rgb.col(p) = fill;
    } else {
      out.rgb.col(p) = tap.w00 * image.rgb.col(tap.i00) + tap.w01 * image.rgb.col(tap.i01) +
                       tap.w10 * image.rgb.col(tap.i10) + tap.w11 * image.rgb.col(tap.i11);
    }
  }
  return out;
}

// Mask warp: bilinear interpolation of the binary field followed by a 0.5
// threshold, so the result is binary again. Out-of-range samples become
// background.
template <typename Scalar>
MaskT<Scalar> warp_mask(const MaskT<Scalar>& mask, const Matrix2X<Scalar>& grid) {
  if (grid.cols() != mask.pixel_count())
    throw std::invalid_argument("warp grid size does not match mask");
  MaskT<Scalar> out(mask.width, mask.height);
  for (Index p = 0; p < grid.cols(); ++p) {
    const auto tap = detail::bilinear_tap<Scalar>(grid(0, p), grid(1, p), mask.width, mask.height);
    if (tap.oob) {
      out.values(p) = Scalar(0);
      continue;
    }
    const Scalar v = tap.w00 * mask.values(tap.i00) + tap.w01 * mask.values(tap.i01) +
                     tap.w10 * mask.values(tap.i10) + tap.w11 * mask.values(tap.i11);
    out.values(p) = v >= Scalar(0.5) ? Scalar(1) : Scalar(0);
  }
  return out;
}

// Mean squared channel difference over foreground pixels only.
template <typename Scalar>
Scalar masked_mse(const ImageT<Scalar>& a, const ImageT<Scalar>& b, const MaskT<Scalar>& mask) {
  if (!a.same_size(b) || a.width != mask.width || a.height != mask.height)
    throw std::invalid_argument("masked_mse inputs must share dimensions");
  const Scalar foreground = mask.foreground_count();
  if (foreground <= Scalar(0)) throw DegenerateMaskError("mask has no foreground pixels");
  const auto diff = (a.rgb - b.rgb).array();
  const Scalar total = (diff.square().colwise().sum() * mask.values).sum();
  return total / (Scalar(3) * foreground);
}

// Mean squared channel difference over the whole frame.
template <typename Scalar>
Scalar mse(const ImageT<Scalar>& a, const ImageT<Scalar>& b) {
  if (!a.same_size(b)) throw std::invalid_argument("mse inputs must share dimensions");
  return (a.rgb - b.rgb).squaredNorm() / (Scalar(3) * Scalar(a.pixel_count()));
}

// Per-pixel mean squared channel difference, zeroed outside the mask.
template <typename Scalar>
HeatmapT<Scalar> error_heatmap(const ImageT<Scalar>& a, const ImageT<Scalar>& b,
                               const MaskT<Scalar>& mask) {
  if (!a.same_size(b) || a.width != mask.width || a.height != mask.height)
    throw std::invalid_argument("error_heatmap inputs must share dimensions");
  HeatmapT<Scalar> out(a.width, a.height);
  out.values = (a.rgb - b.rgb).array().square().colwise().sum() / Scalar(3) * mask.values;
  return out;
}

}  // namespace ads
