#include "dnp/descriptor.hpp"

#include <string>
#include <tuple>

namespace dnpgcn {

DirectionalNode::DirectionalNode(const Vec3& position) : position_(position) {
  if (!position.is_finite()) throw Error("directional node position is not finite");
}

DirectionalNode::DirectionalNode(const Vec3& position, const Vec3& direction)
    : DirectionalNode(position) {
  if (!direction.is_finite()) throw Error("directional node direction is not finite");
  const double n = norm(direction);
  if (n <= kEpsAlgebra) throw DegenerateVector("directional node direction has zero norm");
  if (std::abs(n - 1.0) > kEpsGeom)
    throw Error("directional node direction must be a unit vector (norm " + std::to_string(n) +
                ")");
  direction_ = direction;
}

DirectionalNode DirectionalNode::oriented(const Vec3& position, const Vec3& raw_direction) {
  return DirectionalNode(position, normalize(raw_direction));
}

DirectionalNode DirectionalNode::transformed(const RigidTransform& t) const {
  DirectionalNode out(apply_transform(t, position_, VectorKind::Position));
  if (direction_) out.direction_ = apply_transform(t, *direction_, VectorKind::Direction);
  return out;
}

namespace {

bool is_zero_angle(double theta) { return theta <= kEpsGeom; }
bool is_straight_angle(double theta) { return theta >= kPi - kEpsGeom; }
bool can_anchor_frame(double theta) { return !is_zero_angle(theta) && !is_straight_angle(theta); }

Vec3 separation(const DirectionalNode& a, const DirectionalNode& b) {
  const Vec3 ab = b.position() - a.position();
  const double d = norm(ab);
  if (!(d > kEpsGeom)) throw CoincidentNodes("directional nodes coincide (d = " + std::to_string(d) + ")");
  return ab;
}

struct FramedQuadruplet {
  DnpQuadruplet q;
  SourceTargetAssignment frame;
};

FramedQuadruplet frame_at(const DirectionalNode& s, const DirectionalNode& t, bool swapped) {
  const Vec3 st = t.position() - s.position();
  const double d = norm(st);
  const Vec3 dir = st / d;
  const Vec3& u = *s.direction();
  const Vec3& ut = *t.direction();
  const Vec3 v = normalize(cross(u, dir));
  const Vec3 w = cross(u, v);

  DnpQuadruplet q;
  q.d = d;
  q.alpha = angle_between(u, dir);
  q.beta = angle_between(v, ut);
  q.gamma = (is_zero_angle(q.beta) || is_straight_angle(q.beta))
                ? kPi / 2.0
                : std::atan2(dot(w, ut), dot(u, ut));
  return {q, SourceTargetAssignment{s, t, u, v, w, swapped}};
}

bool lex_less(const DnpQuadruplet& x, const DnpQuadruplet& y) {
  return std::tie(x.alpha, x.beta, x.gamma) < std::tie(y.alpha, y.beta, y.gamma);
}

FramedQuadruplet general_case(const DirectionalNode& a, const DirectionalNode& b, double theta_a,
                              double theta_b) {
  const bool a_ok = can_anchor_frame(theta_a);
  const bool b_ok = can_anchor_frame(theta_b);
  // A node whose direction is parallel to the connecting line cannot anchor
  // the frame; the other node takes over.
  if (a_ok && !b_ok) return frame_at(a, b, false);
  if (b_ok && !a_ok) return frame_at(b, a, true);

  if (std::abs(theta_a - theta_b) <= kEpsGeom) {
    FramedQuadruplet via_a = frame_at(a, b, false);
    FramedQuadruplet via_b = frame_at(b, a, true);
    return lex_less(via_b.q, via_a.q) ? via_b : via_a;
  }
  return theta_a < theta_b ? frame_at(a, b, false) : frame_at(b, a, true);
}

}  // namespace

PairAngles pair_angles(const DirectionalNode& a, const DirectionalNode& b) {
  const Vec3 ab = separation(a, b);
  PairAngles out;
  if (a.direction()) out.theta_i = angle_between(*a.direction(), ab);
  if (b.direction()) out.theta_j = angle_between(*b.direction(), -ab);
  return out;
}

DnpCase classify(const DirectionalNode& a, const DirectionalNode& b) {
  const PairAngles th = pair_angles(a, b);
  if (!th.theta_i && !th.theta_j) return DnpCase::NoDirections;
  if (!th.theta_i || !th.theta_j) return DnpCase::SingleDirection;
  const double ti = *th.theta_i;
  const double tj = *th.theta_j;
  if (is_zero_angle(ti) && is_zero_angle(tj)) return DnpCase::BothAligned;
  if (is_straight_angle(ti) && is_straight_angle(tj)) return DnpCase::BothOpposed;
  if ((is_zero_angle(ti) && is_straight_angle(tj)) || (is_straight_angle(ti) && is_zero_angle(tj)))
    return DnpCase::AlignedOpposed;
  return DnpCase::General;
}

SourceTargetAssignment canonical_frame(const DirectionalNode& a, const DirectionalNode& b) {
  if (classify(a, b) != DnpCase::General)
    throw Error("canonical_frame: pair does not fall in the general case");
  const PairAngles th = pair_angles(a, b);
  return general_case(a, b, *th.theta_i, *th.theta_j).frame;
}

DnpQuadruplet dnp(const DirectionalNode& a, const DirectionalNode& b) {
  const PairAngles th = pair_angles(a, b);
  const double d = norm(b.position() - a.position());
  switch (classify(a, b)) {
    case DnpCase::NoDirections:
      return {0.0, 0.0, 0.0, d};
    case DnpCase::SingleDirection:
      return {th.theta_i ? *th.theta_i : *th.theta_j, 0.0, 0.0, d};
    case DnpCase::BothAligned:
      return {0.0, kPi / 2.0, kPi, d};
    case DnpCase::BothOpposed:
      return {kPi, kPi / 2.0, kPi, d};
    case DnpCase::AlignedOpposed:
      return {0.0, kPi / 2.0, 0.0, d};
    case DnpCase::General:
      break;
  }
  return general_case(a, b, *th.theta_i, *th.theta_j).q;
}

std::pair<DirectionalNode, DirectionalNode> reconstruct_canonical_pair(const DnpQuadruplet& q) {
  const auto arr = q.as_array();
  for (double x : arr)
    if (!std::isfinite(x)) throw Error("reconstruct_canonical_pair: non-finite quadruplet");
  if (!(q.d > kEpsGeom)) throw Error("reconstruct_canonical_pair: d must be positive");
  if (!can_anchor_frame(q.alpha))
    throw Error("reconstruct_canonical_pair: alpha must lie strictly inside (0, pi)");
  if (is_zero_angle(q.beta) || is_straight_angle(q.beta) || q.beta > kPi)
    throw Error("reconstruct_canonical_pair: beta must lie strictly inside (0, pi)");
  if (q.gamma < -kPi || q.gamma > kPi)
    throw Error("reconstruct_canonical_pair: gamma must lie in (-pi, pi]");

  // Frame at the source: u = +z, the target in the xz-plane at angle alpha,
  // hence v = +y and w = -x.
  const Vec3 u{0.0, 0.0, 1.0};
  const Vec3 v{0.0, 1.0, 0.0};
  const Vec3 w{-1.0, 0.0, 0.0};
  const Vec3 dir{std::sin(q.alpha), 0.0, std::cos(q.alpha)};
  const Vec3 ut = std::cos(q.beta) * v +
                  std::sin(q.beta) * (std::cos(q.gamma) * u + std::sin(q.gamma) * w);

  DirectionalNode source(Vec3{}, u);
  DirectionalNode target = DirectionalNode::oriented(q.d * dir, ut);

  const DnpQuadruplet back = dnp(source, target);
  const auto got = back.as_array();
  for (std::size_t k = 0; k < got.size(); ++k)
    if (std::abs(got[k] - arr[k]) > kEpsGeom)
      throw Error("reconstruct_canonical_pair: quadruplet is not produced by any general-case pair");
  return {source, target};
}

std::array<double, 4> ppf(const DirectionalNode& a, const DirectionalNode& b) {
  const Vec3 d = separation(a, b);
  if (!a.direction() || !b.direction()) throw MissingDirection("ppf requires both directions");
  const Vec3& n1 = *a.direction();
  const Vec3& n2 = *b.direction();
  return {norm(d), angle_between(n1, d), angle_between(n2, d), angle_between(n1, n2)};
}

DistanceTheta distance_theta(const DirectionalNode& a, const DirectionalNode& b) {
  const Vec3 d = separation(a, b);
  if (!a.direction() || !b.direction())
    throw MissingDirection("distance_theta requires both directions");
  return {norm(d), angle_between(*a.direction(), *b.direction())};
}

double distance_only(const DirectionalNode& a, const DirectionalNode& b) {
  return norm(separation(a, b));
}

}  // namespace dnpgcn
