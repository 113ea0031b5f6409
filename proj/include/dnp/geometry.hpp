#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include "dnp/error.hpp"

namespace dnpgcn {

/// Tolerance for geometric classification (angle degeneracies, coincident points).
inline constexpr double kEpsGeom = 1e-9;
/// Tolerance for algebraic identities (orthogonality, unit norms after construction).
inline constexpr double kEpsAlgebra = 1e-12;

inline constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

/// Throws DegenerateVector when norm(a) <= kEpsAlgebra.
Vec3 normalize(const Vec3& a);

/// Unsigned angle in [0, pi] between two non-zero vectors.
/// Uses atan2(|a x b|, a.b), which stays accurate near 0 and pi where
/// arccos of a clamped cosine loses half the significant digits.
double angle_between(const Vec3& a, const Vec3& b);

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 identity3();
Mat3 multiply(const Mat3& a, const Mat3& b);
Mat3 transpose(const Mat3& m);
Vec3 multiply(const Mat3& m, const Vec3& v);
double determinant(const Mat3& m);

enum class VectorKind { Position, Direction };

/// Rotation (or, for test oracles, an explicit reflection) followed by a translation.
class RigidTransform {
 public:
  RigidTransform();

  /// Validates that `rotation` is orthogonal with determinant +1.
  static RigidTransform proper(const Mat3& rotation, const Vec3& translation = {});
  /// Orthogonal matrix with determinant -1; only mirror-image oracles build these.
  static RigidTransform reflection(const Mat3& matrix, const Vec3& translation = {});
  static RigidTransform translation_only(const Vec3& t);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  bool is_reflection() const { return determinant(rotation_) < 0.0; }

  /// (*this) after `first`: apply `first`, then this transform.
  RigidTransform after(const RigidTransform& first) const;

 private:
  RigidTransform(const Mat3& r, const Vec3& t) : rotation_(r), translation_(t) {}

  Mat3 rotation_;
  Vec3 translation_;
};

/// Positions get rotation + translation; directions get rotation only.
Vec3 apply_transform(const RigidTransform& t, const Vec3& p, VectorKind kind);

/// Uniformly distributed rotation (unit quaternion method), deterministic per seed.
RigidTransform random_rotation(std::uint64_t seed);

/// Random rotation plus a translation with components uniform in [-span, span].
RigidTransform random_rigid_transform(std::uint64_t seed, double span = 10.0);

/// Reflection through the xy-plane (z -> -z).
RigidTransform mirror_xy();

/// Minimal RMSD between two equally sized point sets over proper rotations and
/// translations. Mirror images are not superimposable. Requires >= 3 points.
double kabsch_rmsd(std::span<const Vec3> a, std::span<const Vec3> b);

/// Stable 64-bit sub-seed derivation so that one user seed can feed several
/// independent random streams ("init", "shuffle", "split", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

/// Uniformly distributed unit vector.
Vec3 random_unit_vector(std::mt19937_64& rng);

}  // namespace dnpgcn
