#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace ads {

using Index = Eigen::Index;

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Matrix2X = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using Vector2d = Vector2<double>;
using Matrix2d = Matrix2<double>;
using Matrix2Xd = Matrix2X<double>;
using VectorXd = VectorX<double>;

// Normalized image coordinates span [-1, 1] on both axes, so the full
// frame diagonal has length 2*sqrt(2).
inline constexpr double kFrameDiagonal = 2.0 * std::numbers::sqrt2;

// Base class for all recoverable pipeline failures. Dimension mismatches
// and out-of-domain arguments use std::invalid_argument instead.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularTransformError : Error {
  using Error::Error;
};
struct DegenerateCorrespondencesError : Error {
  using Error::Error;
};
struct NoConsensusError : Error {
  using Error::Error;
};
struct IllPosedError : Error {
  using Error::Error;
};
struct DegenerateControlPointsError : Error {
  using Error::Error;
};
struct DegenerateMaskError : Error {
  using Error::Error;
};
struct InvalidDescriptorError : Error {
  using Error::Error;
};
struct UndefinedCorrelationError : Error {
  using Error::Error;
};
struct DegenerateRangeError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// splitmix64 step; used to derive independent seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix_seed(master ^ mix_seed(stream));
}

// Deterministic random helpers. std::mt19937_64 is fully specified by the
// standard; the value mappings below avoid std::uniform_*_distribution,
// whose outputs vary across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % n;
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ads
