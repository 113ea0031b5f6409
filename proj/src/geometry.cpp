#include "dnp/geometry.hpp"

#include <Eigen/Dense>

namespace dnpgcn {

Vec3 normalize(const Vec3& a) {
  const double n = norm(a);
  if (!(n > kEpsAlgebra)) {
    throw DegenerateVector("cannot normalize a vector of norm " + std::to_string(n));
  }
  return a / n;
}

double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

Mat3 identity3() {
  return Mat3{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

Mat3 transpose(const Mat3& m) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = m[j][i];
  return out;
}

Vec3 multiply(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
          m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
          m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

double determinant(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

namespace {

void require_orthogonal(const Mat3& m, double expected_det) {
  const Mat3 mmt = multiply(m, transpose(m));
  const Mat3 eye = identity3();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(mmt[i][j] - eye[i][j]) > kEpsAlgebra)
        throw Error("transform matrix is not orthogonal");
  if (std::abs(determinant(m) - expected_det) > kEpsAlgebra)
    throw Error("transform matrix has determinant " + std::to_string(determinant(m)) +
                ", expected " + std::to_string(expected_det));
}

}  // namespace

RigidTransform::RigidTransform() : rotation_(identity3()), translation_() {}

RigidTransform RigidTransform::proper(const Mat3& rotation, const Vec3& translation) {
  require_orthogonal(rotation, 1.0);
  if (!translation.is_finite()) throw Error("non-finite translation");
  return RigidTransform(rotation, translation);
}

RigidTransform RigidTransform::reflection(const Mat3& matrix, const Vec3& translation) {
  require_orthogonal(matrix, -1.0);
  if (!translation.is_finite()) throw Error("non-finite translation");
  return RigidTransform(matrix, translation);
}

RigidTransform RigidTransform::translation_only(const Vec3& t) {
  return proper(identity3(), t);
}

RigidTransform RigidTransform::after(const RigidTransform& first) const {
  // x -> R2 (R1 x + t1) + t2
  return RigidTransform(multiply(rotation_, first.rotation_),
                        multiply(rotation_, first.translation_) + translation_);
}

Vec3 apply_transform(const RigidTransform& t, const Vec3& p, VectorKind kind) {
  const Vec3 rotated = multiply(t.rotation(), p);
  return kind == VectorKind::Position ? rotated + t.translation() : rotated;
}

RigidTransform random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u1 = unit(rng);
  const double u2 = unit(rng);
  const double u3 = unit(rng);
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const double qx = a * std::sin(2.0 * kPi * u2);
  const double qy = a * std::cos(2.0 * kPi * u2);
  const double qz = b * std::sin(2.0 * kPi * u3);
  const double qw = b * std::cos(2.0 * kPi * u3);
  const double s = 1.0 / (qx * qx + qy * qy + qz * qz + qw * qw);

  Mat3 r{};
  r[0][0] = 1.0 - 2.0 * s * (qy * qy + qz * qz);
  r[0][1] = 2.0 * s * (qx * qy - qz * qw);
  r[0][2] = 2.0 * s * (qx * qz + qy * qw);
  r[1][0] = 2.0 * s * (qx * qy + qz * qw);
  r[1][1] = 1.0 - 2.0 * s * (qx * qx + qz * qz);
  r[1][2] = 2.0 * s * (qy * qz - qx * qw);
  r[2][0] = 2.0 * s * (qx * qz - qy * qw);
  r[2][1] = 2.0 * s * (qy * qz + qx * qw);
  r[2][2] = 1.0 - 2.0 * s * (qx * qx + qy * qy);
  return RigidTransform::proper(r);
}

RigidTransform random_rigid_transform(std::uint64_t seed, double span) {
  const RigidTransform rot = random_rotation(seed);
  std::mt19937_64 rng(derive_seed(seed, "translation"));
  std::uniform_real_distribution<double> offset(-span, span);
  const Vec3 t{offset(rng), offset(rng), offset(rng)};
  return RigidTransform::proper(rot.rotation(), t);
}

RigidTransform mirror_xy() {
  Mat3 m = identity3();
  m[2][2] = -1.0;
  return RigidTransform::reflection(m);
}

double kabsch_rmsd(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() != b.size())
    throw Error("kabsch_rmsd: point sets differ in length (" + std::to_string(a.size()) +
                " vs " + std::to_string(b.size()) + ")");
  if (a.size() < 3) throw Error("kabsch_rmsd: need at least 3 points");

  const auto n = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixX3d pa(n, 3), pb(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    pa.row(i) << a[i].x, a[i].y, a[i].z;
    pb.row(i) << b[i].x, b[i].y, b[i].z;
  }
  pa.rowwise() -= pa.colwise().mean();
  pb.rowwise() -= pb.colwise().mean();

  const Eigen::Matrix3d h = pa.transpose() * pb;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d correction = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) correction(2, 2) = -1.0;
  const Eigen::Matrix3d r = svd.matrixV() * correction * svd.matrixU().transpose();

  const Eigen::MatrixX3d diff = pa * r.transpose() - pb;
  return std::sqrt(diff.squaredNorm() / static_cast<double>(n));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
  // FNV-1a over the stream name, then a splitmix64 finalizer over (seed ^ hash).
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vec3 random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    const double n = norm(v);
    if (n > 1e-6) return v / n;
  }
}

}  // namespace dnpgcn
