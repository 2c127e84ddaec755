#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sharpfit {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

constexpr double kPi = 3.14159265358979323846;

/// Error kinds shared across the library. Operations throw Error for
/// contract violations; recoverable conditions are reported via flags
/// on result structs instead.
enum class ErrorKind {
  ParseError,
  DegenerateMesh,
  DegenerateInput,
  InsufficientNeighborhood,
  InsufficientPoints,
  InvalidParam,
  SingularSystem,
  MissingCurvature,
  ShapeMismatch,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Deterministic RNG. mt19937_64 has a fully specified sequence, and the
/// double conversion below avoids std::uniform_real_distribution, whose
/// output is implementation-defined. Same seed => same samples on every
/// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {
    // splitmix64 warmup so nearby seeds decorrelate
    for (int i = 0; i < 4; ++i) next_u64();
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // rejection-free modulo bias is fine at the scales used here, but the
    // multiply-shift trick is both unbiased enough and deterministic
    return std::uint64_t((__uint128_t(next_u64()) * n) >> 64);
  }

  /// Standard normal (Box-Muller, deterministic).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(2.0 * kPi * u2);
    has_cached_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// Fix the sign of a direction-like vector so results are reproducible:
/// first component with magnitude above tol is made positive.
inline Vec3 canonical_sign(const Vec3& v, double tol = 1e-12) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v[i]) > tol) return v[i] > 0 ? v : Vec3(-v);
  }
  return v;
}

/// Any unit vector orthogonal to unit n, chosen deterministically.
inline Vec3 any_orthogonal(const Vec3& n) {
  Vec3 axis = std::abs(n.x()) <= std::abs(n.y())
                  ? (std::abs(n.x()) <= std::abs(n.z()) ? Vec3::UnitX() : Vec3::UnitZ())
                  : (std::abs(n.y()) <= std::abs(n.z()) ? Vec3::UnitY() : Vec3::UnitZ());
  Vec3 e = n.cross(axis);
  return e.normalized();
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace sharpfit
