#pragma once

#include "ads/common.hpp"
#include "ads/imaging.hpp"

#include <array>
#include <cmath>

namespace ads {

// 2-D affine map q = L p + t.
template <typename Scalar>
struct Affine2 {
  Matrix2<Scalar> linear = Matrix2<Scalar>::Identity();
  Vector2<Scalar> translation = Vector2<Scalar>::Zero();

  static Affine2 identity() { return {}; }

  // Parameter order: r11, r12, r21, r22, tx, ty (row-major linear part).
  static Affine2 from_params(const std::array<Scalar, 6>& p) {
    Affine2 t;
    t.linear << p[0], p[1], p[2], p[3];
    t.translation << p[4], p[5];
    return t;
  }

  std::array<Scalar, 6> params() const {
    return {linear(0, 0), linear(0, 1), linear(1, 0), linear(1, 1), translation(0), translation(1)};
  }

  Vector2<Scalar> operator()(const Vector2<Scalar>& p) const { return linear * p + translation; }

  Matrix2X<Scalar> apply(const Matrix2X<Scalar>& points) const {
    return (linear * points).colwise() + translation;
  }

  Scalar det() const { return linear.determinant(); }

  Affine2 inverse() const {
    const Scalar d = det();
    if (d == Scalar(0) || !std::isfinite(d))
      throw SingularTransformError("affine transform is not invertible");
    Affine2 inv;
    inv.linear = linear.inverse();
    inv.translation = -(inv.linear * translation);
    return inv;
  }

  Affine2 compose(const Affine2& first) const {
    // Apply `first`, then this.
    Affine2 out;
    out.linear = linear * first.linear;
    out.translation = linear * first.translation + translation;
    return out;
  }
};

using AffineTransform = Affine2<double>;

// Factorization of the linear part as rotation * shear * scale:
//   L = R(theta) * [1 b; 0 1] * diag(sx, sy)
// sx > 0 always; reflections land in sy < 0. theta is in degrees, (-180, 180].
template <typename Scalar>
struct AffineDecomposition {
  Scalar theta_deg;
  Scalar shear;
  Scalar sx;
  Scalar sy;
  Scalar tx;
  Scalar ty;
};

template <typename Scalar>
AffineDecomposition<Scalar> decompose_affine(const Affine2<Scalar>& t) {
  const Scalar r11 = t.linear(0, 0), r12 = t.linear(0, 1);
  const Scalar r21 = t.linear(1, 0), r22 = t.linear(1, 1);
  const Scalar d = t.det();
  if (d == Scalar(0) || !std::isfinite(d))
    throw SingularTransformError("affine transform is singular");

  const Scalar sx = std::hypot(r11, r21);
  const Scalar theta = std::atan2(r21, r11);
  const Scalar c = std::cos(theta), s = std::sin(theta);
  const Scalar sy = c * r22 - s * r12;
  if (sx == Scalar(0) || sy == Scalar(0))
    throw SingularTransformError("affine transform is singular");
  const Scalar shear = (c * r12 + s * r22) / sy;

  Scalar theta_deg = theta * Scalar(180) / std::numbers::pi_v<Scalar>;
  if (theta_deg <= Scalar(-180)) theta_deg += Scalar(360);

  return {theta_deg, shear, sx, sy, t.translation(0), t.translation(1)};
}

template <typename Scalar>
Affine2<Scalar> recompose_affine(const AffineDecomposition<Scalar>& d) {
  if (!(d.sx > Scalar(0)) || d.sy == Scalar(0))
    throw std::invalid_argument("recompose_affine requires sx > 0 and sy != 0");
  const Scalar theta = d.theta_deg * std::numbers::pi_v<Scalar> / Scalar(180);
  const Scalar c = std::cos(theta), s = std::sin(theta);
  Affine2<Scalar> t;
  t.linear(0, 0) = d.sx * c;
  t.linear(1, 0) = d.sx * s;
  t.linear(0, 1) = d.sy * (d.shear * c - s);
  t.linear(1, 1) = d.sy * (d.shear * s + c);
  t.translation << d.tx, d.ty;
  return t;
}

// Forward coordinate map of an affine transform over the pixel-center grid.
// Warping an image by affine_grid(t.inverse()) applies t to its content.
template <typename Scalar>
Matrix2X<Scalar> affine_grid(const Affine2<Scalar>& t, Index width, Index height) {
  const Scalar d = t.det();
  if (d == Scalar(0) || !std::isfinite(d))
    throw SingularTransformError("affine transform is singular");
  return t.apply(identity_grid<Scalar>(width, height));
}

// Disentangled difference measures for one image pair. Pose terms come from
// the affine stage, d from the deformation stage, a from the subtraction
// stage. t is the translation magnitude normalized by the frame half-extent.
template <typename Scalar>
struct MeasureSetT {
  Scalar sx = 1, sy = 1;      // per-axis scale factors
  Scalar s = 1;               // area scale, sx * sy
  Scalar tx = 0, ty = 0;      // translation components
  Scalar t = 0;               // sqrt(tx^2 + ty^2) / 2
  Scalar theta_deg = 0;       // rotation angle
  Scalar shear = 0;
  Scalar d = 0;               // mean deformation displacement / frame diagonal
  Scalar a = 0;               // masked MSE after alignment and deformation
};

using MeasureSet = MeasureSetT<double>;

template <typename Scalar>
MeasureSetT<Scalar> pose_measures(const Affine2<Scalar>& t) {
  const auto dec = decompose_affine(t);
  MeasureSetT<Scalar> m;
  m.sx = dec.sx;
  m.sy = dec.sy;
  m.s = dec.sx * dec.sy;
  m.tx = dec.tx;
  m.ty = dec.ty;
  m.t = std::hypot(dec.tx, dec.ty) / Scalar(2);
  m.theta_deg = dec.theta_deg;
  m.shear = dec.shear;
  return m;
}

}  // namespace ads
