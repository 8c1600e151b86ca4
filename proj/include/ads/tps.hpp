#pragma once

#include "ads/affine.hpp"
#include "ads/common.hpp"
#include "ads/imaging.hpp"

#include <cmath>
#include <limits>

namespace ads {

// Radial kernel u(r^2) = r^2 log(r^2), continuously extended with u(0) = 0.
template <typename Scalar>
Scalar tps_kernel(Scalar r2) {
  return r2 > Scalar(0) ? r2 * std::log(r2) : Scalar(0);
}

// Thin-plate spline warp anchored on a fixed 3x3 lattice over [-1,1]^2.
// A spline is identified by where it sends the nine lattice points; the
// interpolant is q(p) = A p + t + sum_k w_k u(|p - L_k|^2) with the usual
// side conditions (kernel weights orthogonal to constants and coordinates),
// obtained by solving the symmetric 12x12 interpolation system.
template <typename Scalar>
class ThinPlateSpline {
 public:
  static constexpr int kControlCount = 9;
  using ControlMatrix = Eigen::Matrix<Scalar, 2, kControlCount>;
  using SystemMatrix = Eigen::Matrix<Scalar, 12, 12>;

  // Lattice points in row-major order: y runs over {-1,0,1} outer, x inner.
  static const ControlMatrix& canonical_lattice() {
    static const ControlMatrix lattice = [] {
      ControlMatrix m;
      for (int k = 0; k < kControlCount; ++k) {
        m(0, k) = Scalar(k % 3 - 1);
        m(1, k) = Scalar(k / 3 - 1);
      }
      return m;
    }();
    return lattice;
  }

  static const Eigen::PartialPivLU<SystemMatrix>& system_lu() {
    static const Eigen::PartialPivLU<SystemMatrix> lu = [] {
      const ControlMatrix& lat = canonical_lattice();
      SystemMatrix s = SystemMatrix::Zero();
      for (int i = 0; i < kControlCount; ++i) {
        for (int j = 0; j < kControlCount; ++j)
          s(i, j) = tps_kernel((lat.col(i) - lat.col(j)).squaredNorm());
        s(i, 9) = s(9, i) = Scalar(1);
        s(i, 10) = s(10, i) = lat(0, i);
        s(i, 11) = s(11, i) = lat(1, i);
      }
      return Eigen::PartialPivLU<SystemMatrix>(s);
    }();
    return lu;
  }

  // Spline sending the lattice to `control`. Lattice input (compared
  // bitwise) yields the exact identity map.
  static ThinPlateSpline from_control_points(const ControlMatrix& control) {
    if (!control.allFinite())
      throw DegenerateControlPointsError("control points must be finite");
    ThinPlateSpline tps;
    tps.control_ = control;
    if (control == canonical_lattice()) {
      tps.identity_ = true;
      return tps;
    }
    Eigen::Matrix<Scalar, 12, 2> rhs = Eigen::Matrix<Scalar, 12, 2>::Zero();
    rhs.template topRows<kControlCount>() = control.transpose();
    const Eigen::Matrix<Scalar, 12, 2> sol = system_lu().solve(rhs);
    if (!sol.allFinite())
      throw DegenerateControlPointsError("interpolation system produced non-finite coefficients");
    tps.weights_ = sol.template topRows<kControlCount>().transpose();
    tps.affine_.translation = sol.row(9).transpose();
    tps.affine_.linear = sol.template middleRows<2>(10).transpose();
    return tps;
  }

  static ThinPlateSpline identity() { return from_control_points(canonical_lattice()); }

  const ControlMatrix& control_points() const { return control_; }
  const ControlMatrix& kernel_weights() const { return weights_; }
  const Affine2<Scalar>& affine_part() const { return affine_; }
  bool is_identity() const { return identity_; }

  Vector2<Scalar> operator()(const Vector2<Scalar>& p) const {
    if (identity_) return p;
    Vector2<Scalar> out = affine_(p);
    const ControlMatrix& lat = canonical_lattice();
    for (int k = 0; k < kControlCount; ++k)
      out += weights_.col(k) * tps_kernel((p - lat.col(k)).squaredNorm());
    return out;
  }

  Matrix2X<Scalar> apply(const Matrix2X<Scalar>& points) const {
    if (identity_) return points;
    Matrix2X<Scalar> out = affine_.apply(points);
    const ControlMatrix& lat = canonical_lattice();
    for (int k = 0; k < kControlCount; ++k) {
      const Eigen::Array<Scalar, 1, Eigen::Dynamic> r2 =
          (points.colwise() - lat.col(k)).colwise().squaredNorm().array();
      const Eigen::Array<Scalar, 1, Eigen::Dynamic> u = (r2 > Scalar(0)).select(r2 * r2.log(), Scalar(0));
      out += weights_.col(k) * u.matrix();
    }
    return out;
  }

  Matrix2<Scalar> jacobian(const Vector2<Scalar>& p) const {
    Matrix2<Scalar> j = affine_.linear;
    if (identity_) return j;
    const ControlMatrix& lat = canonical_lattice();
    for (int k = 0; k < kControlCount; ++k) {
      const Vector2<Scalar> diff = p - lat.col(k);
      const Scalar r2 = diff.squaredNorm();
      if (r2 > Scalar(0)) j += weights_.col(k) * (Scalar(2) * (std::log(r2) + Scalar(1)) * diff).transpose();
    }
    return j;
  }

  // Per-point Newton inversion: finds x with tps(x) = target. Points where
  // the iteration fails to converge come back as NaN (treated as
  // out-of-range by the warp samplers).
  Matrix2X<Scalar> invert(const Matrix2X<Scalar>& targets, int max_iterations = 30,
                          Scalar tolerance = Scalar(1e-12)) const {
    if (identity_) return targets;
    Matrix2X<Scalar> out(2, targets.cols());
    const Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
    for (Index c = 0; c < targets.cols(); ++c) {
      const Vector2<Scalar> target = targets.col(c);
      Vector2<Scalar> x = target;
      Vector2<Scalar> residual = (*this)(x)-target;
      bool diverged = false;
      for (int it = 0; it < max_iterations && residual.norm() > tolerance; ++it) {
        const Matrix2<Scalar> j = jacobian(x);
        const Scalar det = j.determinant();
        if (std::abs(det) < Scalar(1e-14) || !std::isfinite(det)) {
          diverged = true;
          break;
        }
        x -= j.inverse() * residual;
        residual = (*this)(x)-target;
      }
      if (diverged || !(residual.norm() <= Scalar(1e-8))) {
        out.col(c) << nan, nan;
      } else {
        out.col(c) = x;
      }
    }
    return out;
  }

 private:
  ThinPlateSpline() = default;

  ControlMatrix control_ = canonical_lattice();
  ControlMatrix weights_ = ControlMatrix::Zero();
  Affine2<Scalar> affine_{};
  bool identity_ = false;
};

using Tps = ThinPlateSpline<double>;

template <typename Scalar>
ThinPlateSpline<Scalar> tps_from_control_points(const Eigen::Matrix<Scalar, 2, 9>& control) {
  return ThinPlateSpline<Scalar>::from_control_points(control);
}

// Forward coordinate map of the spline over the pixel-center grid.
template <typename Scalar>
Matrix2X<Scalar> tps_grid(const ThinPlateSpline<Scalar>& tps, Index width, Index height) {
  return tps.apply(identity_grid<Scalar>(width, height));
}

// Cardinal basis: row i holds the nine interpolation weights so that a
// spline with control points V evaluates at p_i as basis.row(i) * V per
// axis. Used to fit control points by linear least squares.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 9> tps_cardinal_basis(const Matrix2X<Scalar>& points) {
  using TPS = ThinPlateSpline<Scalar>;
  const auto& lat = TPS::canonical_lattice();
  Eigen::Matrix<Scalar, 12, Eigen::Dynamic> phi(12, points.cols());
  for (int k = 0; k < TPS::kControlCount; ++k)
    phi.row(k) = (points.colwise() - lat.col(k))
                     .colwise()
                     .squaredNorm()
                     .array()
                     .unaryExpr([](Scalar r2) { return tps_kernel(r2); });
  phi.row(9).setOnes();
  phi.row(10) = points.row(0);
  phi.row(11) = points.row(1);
  // The system matrix is symmetric, so solving S x = phi gives the cardinal
  // values directly in the first nine rows.
  const Eigen::Matrix<Scalar, 12, Eigen::Dynamic> solved = TPS::system_lu().solve(phi);
  return solved.template topRows<9>().transpose();
}

// Mean displacement magnitude of the spline over a dense pixel grid,
// normalized by the frame diagonal. The identity spline scores exactly 0.
template <typename Scalar>
Scalar deformation_magnitude(const ThinPlateSpline<Scalar>& tps, Index width, Index height) {
  if (tps.is_identity()) return Scalar(0);
  const Matrix2X<Scalar> grid = identity_grid<Scalar>(width, height);
  const Scalar mean = (tps.apply(grid) - grid).colwise().norm().mean();
  return mean / Scalar(kFrameDiagonal);
}

}  // namespace ads
