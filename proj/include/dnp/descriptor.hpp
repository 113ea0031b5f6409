#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <utility>

#include "dnp/geometry.hpp"

namespace dnpgcn {

class CoincidentNodes : public Error {
 public:
  using Error::Error;
};

class MissingDirection : public Error {
 public:
  using Error::Error;
};

/// A graph node with a 3D position and, optionally, a unit direction vector.
/// A node without a direction has no defined angle to its neighbours.
class DirectionalNode {
 public:
  DirectionalNode() = default;
  explicit DirectionalNode(const Vec3& position);
  /// `direction` must have unit norm within kEpsGeom.
  DirectionalNode(const Vec3& position, const Vec3& direction);

  /// Normalizes `raw_direction`; throws DegenerateVector on a zero vector.
  static DirectionalNode oriented(const Vec3& position, const Vec3& raw_direction);

  const Vec3& position() const { return position_; }
  const std::optional<Vec3>& direction() const { return direction_; }
  bool has_direction() const { return direction_.has_value(); }

  DirectionalNode transformed(const RigidTransform& t) const;

 private:
  Vec3 position_;
  std::optional<Vec3> direction_;
};

/// Edge descriptor <alpha, beta, gamma, d>. alpha, beta in [0, pi];
/// gamma in (-pi, pi]; d > 0.
struct DnpQuadruplet {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double d = 0.0;

  std::array<double, 4> as_array() const { return {alpha, beta, gamma, d}; }
  friend bool operator==(const DnpQuadruplet&, const DnpQuadruplet&) = default;
};

/// theta_i = angle(u_i, n_j - n_i), theta_j = angle(u_j, n_i - n_j).
struct PairAngles {
  std::optional<double> theta_i;
  std::optional<double> theta_j;
};

enum class DnpCase {
  NoDirections,      // (0, 0, 0)
  SingleDirection,   // (theta_k, 0, 0)
  BothAligned,       // theta_i = theta_j = 0
  BothOpposed,       // theta_i = theta_j = pi
  AlignedOpposed,    // {theta_i, theta_j} = {0, pi}
  General,
};

/// Canonical frame anchored at the source node: u = u_s, v = u x (n_t - n_s)/d
/// normalized, w = u x v.
struct SourceTargetAssignment {
  DirectionalNode source;
  DirectionalNode target;
  Vec3 u, v, w;
  /// True when the second argument became the source.
  bool swapped = false;
};

PairAngles pair_angles(const DirectionalNode& a, const DirectionalNode& b);

DnpCase classify(const DirectionalNode& a, const DirectionalNode& b);

/// Frame used by the general case. Throws if the pair falls in a corner case.
/// When theta_i and theta_j tie, the assignment producing the
/// lexicographically smaller (alpha, beta, gamma) is returned.
SourceTargetAssignment canonical_frame(const DirectionalNode& a, const DirectionalNode& b);

/// The directional node pair descriptor. Invariant under rigid motions and
/// under swapping the arguments.
DnpQuadruplet dnp(const DirectionalNode& a, const DirectionalNode& b);

/// Builds a (source, target) pair whose descriptor equals `q`: the source
/// sits at the origin with direction +z, the target lies in the xz-plane.
/// `q` must come from the general case; throws otherwise.
std::pair<DirectionalNode, DirectionalNode> reconstruct_canonical_pair(const DnpQuadruplet& q);

/// Point pair feature (|d|, angle(n1, d), angle(n2, d), angle(n1, n2)), d = m2 - m1.
std::array<double, 4> ppf(const DirectionalNode& a, const DirectionalNode& b);

struct DistanceTheta {
  double d = 0.0;
  double theta = 0.0;
};

/// Distance plus the unsigned angle between the two directions.
DistanceTheta distance_theta(const DirectionalNode& a, const DirectionalNode& b);

double distance_only(const DirectionalNode& a, const DirectionalNode& b);

}  // namespace dnpgcn
