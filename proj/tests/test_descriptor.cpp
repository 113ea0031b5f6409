#include "doctest.h"

#include <algorithm>
#include <vector>

#include "dnp/descriptor.hpp"

using namespace dnpgcn;

namespace {

constexpr double kHalfPi = kPi / 2.0;

DirectionalNode node(Vec3 p, Vec3 dir) { return DirectionalNode::oriented(p, dir); }

void check_quad(const DnpQuadruplet& got, const DnpQuadruplet& want, double tol) {
  INFO("got (" << got.alpha << ", " << got.beta << ", " << got.gamma << ", " << got.d << ")");
  CHECK(std::abs(got.alpha - want.alpha) <= tol);
  CHECK(std::abs(got.beta - want.beta) <= tol);
  CHECK(std::abs(got.gamma - want.gamma) <= tol);
  CHECK(std::abs(got.d - want.d) <= tol);
}

// Literal transcription of the frame construction with arccos on clamped
// cosines and plain smaller-theta source selection. Valid only away from
// corner cases and ties; used as an independent route for random pairs.
DnpQuadruplet textbook_quadruplet(const DirectionalNode& i, const DirectionalNode& j) {
  auto acos_clamped = [](double c) { return std::acos(std::clamp(c, -1.0, 1.0)); };
  const Vec3 vji = j.position() - i.position();
  const double d = std::sqrt(dot(vji, vji));
  const double ti = acos_clamped(dot(*i.direction(), vji) / d);
  const double tj = acos_clamped(dot(*j.direction(), -vji) / d);
  const DirectionalNode& s = ti <= tj ? i : j;
  const DirectionalNode& t = ti <= tj ? j : i;
  const Vec3 line = (t.position() - s.position()) / d;
  const Vec3 u = *s.direction();
  Vec3 v = cross(u, line);
  v = v / std::sqrt(dot(v, v));
  const Vec3 w = cross(u, v);
  const Vec3 ut = *t.direction();
  DnpQuadruplet q;
  q.alpha = acos_clamped(dot(u, line));
  q.beta = acos_clamped(dot(v, ut));
  q.gamma = std::atan2(dot(w, ut), dot(u, ut));
  q.d = d;
  return q;
}

DirectionalNode random_node(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-5.0, 5.0);
  return DirectionalNode({box(rng), box(rng), box(rng)}, random_unit_vector(rng));
}

}  // namespace

TEST_CASE("DirectionalNode validation") {
  CHECK_THROWS_AS(DirectionalNode({0, 0, 0}, {0, 0, 0}), DegenerateVector);
  CHECK_THROWS(DirectionalNode({0, 0, 0}, {0, 0, 2}));
  CHECK_THROWS_AS(DirectionalNode::oriented({0, 0, 0}, {0, 0, 0}), DegenerateVector);
  CHECK(DirectionalNode::oriented({0, 0, 0}, {0, 0, 2}).direction()->z == 1.0);
  CHECK_FALSE(DirectionalNode({1, 2, 3}).has_direction());
}

TEST_CASE("pair_angles") {
  auto a = pair_angles(node({0, 0, 0}, {1, 0, 0}), node({2, 0, 0}, {1, 0, 0}));
  CHECK(*a.theta_i == 0.0);
  CHECK(std::abs(*a.theta_j - kPi) <= 1e-15);

  auto b = pair_angles(node({0, 0, 0}, {0, 0, 1}), node({2, 0, 0}, {0.3, -0.2, 0.9}));
  CHECK(std::abs(*b.theta_i - kHalfPi) <= 1e-15);

  auto c = pair_angles(DirectionalNode({0, 0, 0}), node({1, 0, 0}, {0, 1, 0}));
  CHECK_FALSE(c.theta_i.has_value());
  CHECK(std::abs(*c.theta_j - kHalfPi) <= 1e-15);

  CHECK_THROWS_AS(pair_angles(DirectionalNode({1, 1, 1}), DirectionalNode({1, 1, 1})),
                  CoincidentNodes);
}

TEST_CASE("dnp corner cases") {
  // theta_i = 0, theta_j = pi: both along +x on the x-axis.
  const auto aligned_opposed = dnp(node({0, 0, 0}, {1, 0, 0}), node({2, 0, 0}, {1, 0, 0}));
  check_quad(aligned_opposed, {0.0, kHalfPi, 0.0, 2.0}, 0.0);

  const auto none = dnp(DirectionalNode({0, 0, 0}), DirectionalNode({3.7, 0, 0}));
  check_quad(none, {0.0, 0.0, 0.0, 3.7}, 0.0);

  const auto single = dnp(DirectionalNode({0, 0, 0}), node({1, 0, 0}, {1, 1, 0}));
  check_quad(single, {3.0 * kPi / 4.0, 0.0, 0.0, 1.0}, 1e-15);

  // Both directions point at the other node.
  const auto both_zero = dnp(node({0, 0, 0}, {1, 0, 0}), node({2, 0, 0}, {-1, 0, 0}));
  check_quad(both_zero, {0.0, kHalfPi, kPi, 2.0}, 0.0);

  // Both point away.
  const auto both_pi = dnp(node({0, 0, 0}, {-1, 0, 0}), node({2, 0, 0}, {1, 0, 0}));
  check_quad(both_pi, {kPi, kHalfPi, kPi, 2.0}, 0.0);

  CHECK(classify(node({0, 0, 0}, {1, 0, 0}), node({2, 0, 0}, {1, 0, 0})) == DnpCase::AlignedOpposed);
  CHECK_THROWS_AS(dnp(node({0, 0, 0}, {1, 0, 0}), node({0, 0, 0}, {1, 0, 0})), CoincidentNodes);
}

TEST_CASE("dnp general case, frozen values") {
  // theta_i = pi/2 < theta_j = 3pi/4, frame u = (0,0,1), v = (0,1,0), w = (-1,0,0).
  const auto a = node({0, 0, 0}, {0, 0, 1});
  const auto b = node({2, 0, 0}, {1, 1, 0});
  check_quad(dnp(a, b), {kHalfPi, kPi / 4.0, -kHalfPi, 2.0}, 1e-12);

  const auto frame = canonical_frame(a, b);
  CHECK_FALSE(frame.swapped);
  CHECK(norm(frame.u - Vec3{0, 0, 1}) <= 1e-12);
  CHECK(norm(frame.v - Vec3{0, 1, 0}) <= 1e-12);
  CHECK(norm(frame.w - Vec3{-1, 0, 0}) <= 1e-12);
  CHECK(canonical_frame(b, a).swapped);
}

TEST_CASE("dnp sets gamma to pi/2 when beta degenerates") {
  // Target direction parallel to v = (0,1,0).
  const auto q = dnp(node({0, 0, 0}, {0, 0, 1}), node({2, 0, 0}, {0, 1, 0}));
  CHECK(q.beta == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(q.gamma == kHalfPi);
  const auto r = dnp(node({0, 0, 0}, {0, 0, 1}), node({2, 0, 0}, {0, -1, 0}));
  CHECK(std::abs(r.beta - kPi) <= 1e-12);
  CHECK(r.gamma == kHalfPi);
}

TEST_CASE("dnp anchors the frame at the other node when the smaller angle is zero") {
  // a points straight at b (theta_i = 0); b is oblique (theta_j = pi/2).
  const auto a = node({0, 0, 0}, {1, 0, 0});
  const auto b = node({2, 0, 0}, {0, 0, 1});
  CHECK(classify(a, b) == DnpCase::General);
  const auto frame = canonical_frame(a, b);
  CHECK(frame.swapped);
  const auto q = dnp(a, b);
  CHECK(std::abs(q.alpha - kHalfPi) <= 1e-12);
  CHECK(std::abs(q.beta - kHalfPi) <= 1e-12);
  CHECK(std::isfinite(q.gamma));
  check_quad(dnp(b, a), q, 0.0);
}

TEST_CASE("dnp matches the textbook evaluation on random general pairs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = random_node(rng);
    const auto b = random_node(rng);
    if (norm(a.position() - b.position()) < 0.5) continue;
    check_quad(dnp(a, b), textbook_quadruplet(a, b), 1e-7);
  }
}

TEST_CASE("dnp invariance and permutation symmetry") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = random_node(rng);
    const auto b = random_node(rng);
    const auto t = random_rigid_transform(static_cast<std::uint64_t>(trial));
    const auto q = dnp(a, b);
    check_quad(dnp(a.transformed(t), b.transformed(t)), q, 1e-9);
    CHECK(dnp(b, a) == q);
  }
}

TEST_CASE("general-case outputs never collide with the single-direction row") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto a = random_node(rng);
    const auto b = random_node(rng);
    const auto q = dnp(a, b);
    const bool single_row_shape = q.beta == 0.0 && q.gamma == 0.0;
    CHECK_FALSE(single_row_shape);
  }
}

TEST_CASE("dnp under reflection: beta -> pi - beta, gamma unchanged") {
  std::mt19937_64 rng(31);
  const auto mirror = mirror_xy();
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = random_node(rng);
    const auto b = random_node(rng);
    const auto q = dnp(a, b);
    if (std::abs(q.beta - kHalfPi) < 1e-3) continue;  // planar configuration
    const auto m = dnp(a.transformed(mirror), b.transformed(mirror));
    CHECK(std::abs(m.alpha - q.alpha) <= 1e-9);
    CHECK(std::abs(m.beta - (kPi - q.beta)) <= 1e-9);
    CHECK(std::abs(m.gamma - q.gamma) <= 1e-9);
    CHECK(std::abs(m.d - q.d) <= 1e-12);
    ++checked;
  }
  CHECK(checked > 1900);
}

TEST_CASE("reconstruct_canonical_pair") {
  const DnpQuadruplet q1{kHalfPi, kPi / 4.0, -kHalfPi, 2.0};
  const auto [s1, t1] = reconstruct_canonical_pair(q1);
  check_quad(dnp(s1, t1), q1, 1e-9);
  CHECK(norm(*t1.direction() - normalize({1, 1, 0})) <= 1e-12);

  const DnpQuadruplet q2{kHalfPi, kHalfPi, 0.0, 1.0};
  const auto [s2, t2] = reconstruct_canonical_pair(q2);
  check_quad(dnp(s2, t2), q2, 1e-9);

  const auto t = random_rigid_transform(123);
  check_quad(dnp(s1.transformed(t), t1.transformed(t)), q1, 1e-9);

  CHECK_THROWS(reconstruct_canonical_pair({0.0, 1.0, 0.0, 1.0}));
  CHECK_THROWS(reconstruct_canonical_pair({1.0, 0.0, kHalfPi, 1.0}));
  CHECK_THROWS(reconstruct_canonical_pair({1.0, 1.0, 0.0, 0.0}));
  CHECK_THROWS(reconstruct_canonical_pair({1.0, 1.0, 4.0, 1.0}));
  // alpha larger than the target's own angle: not the image of any pair.
  CHECK_THROWS(reconstruct_canonical_pair({2.5, kHalfPi, 0.0, 1.0}));
}

TEST_CASE("ppf") {
  const auto a = node({0, 0, 0}, {0, 0, 1});
  const auto b = node({3, 0, 0}, {0, 0, 1});
  const auto f = ppf(a, b);
  CHECK(f[0] == 3.0);
  CHECK(std::abs(f[1] - kHalfPi) <= 1e-15);
  CHECK(std::abs(f[2] - kHalfPi) <= 1e-15);
  CHECK(f[3] == 0.0);

  const auto p = node({0.2, -0.4, 0.7}, {0.3, 0.5, 0.8});
  const auto q = node({1.9, 1.1, -0.6}, {-0.7, 0.1, 0.4});
  const auto mirror = mirror_xy();
  const auto direct = ppf(p, q);
  const auto mirrored = ppf(p.transformed(mirror), q.transformed(mirror));
  for (int k = 0; k < 4; ++k) CHECK(std::abs(direct[k] - mirrored[k]) <= 1e-12);

  // Swapping flips d, so the two direction-to-line angles trade places and
  // become supplementary.
  const auto swapped = ppf(q, p);
  CHECK(swapped[0] == direct[0]);
  CHECK(std::abs(swapped[1] - (kPi - direct[2])) <= 1e-12);
  CHECK(std::abs(swapped[2] - (kPi - direct[1])) <= 1e-12);
  CHECK(swapped[3] == direct[3]);

  CHECK_THROWS_AS(ppf(DirectionalNode({0, 0, 0}), b), MissingDirection);
  CHECK_THROWS_AS(ppf(a, a), CoincidentNodes);
}

TEST_CASE("distance_theta") {
  const auto a = node({0, 0, 0}, {0, 0, 1});
  CHECK(distance_theta(a, node({1, 0, 0}, {0, 0, 1})).theta == 0.0);
  CHECK(std::abs(distance_theta(a, node({1, 0, 0}, {0, 0, -1})).theta - kPi) <= 1e-15);

  // Same d and theta, different torsion: (d, theta) collides, dnp does not.
  const double phi = kPi / 3.0;
  const auto b1 = node({2, 0, 0}, {std::sin(phi), 0.0, std::cos(phi)});
  const auto b2 = node({2, 0, 0}, {0.0, std::sin(phi), std::cos(phi)});
  const auto dt1 = distance_theta(a, b1);
  const auto dt2 = distance_theta(a, b2);
  CHECK(dt1.d == dt2.d);
  CHECK(std::abs(dt1.theta - dt2.theta) <= 1e-15);
  const auto q1 = dnp(a, b1);
  const auto q2 = dnp(a, b2);
  CHECK(std::abs(q1.beta - q2.beta) + std::abs(q1.gamma - q2.gamma) > 0.1);

  CHECK_THROWS_AS(distance_theta(a, DirectionalNode({1, 0, 0})), MissingDirection);
}

TEST_CASE("distance_only") {
  const DirectionalNode a({0, 0, 0});
  const DirectionalNode b({3, 4, 0});
  CHECK(distance_only(a, b) == 5.0);
  CHECK(distance_only(b, a) == 5.0);
  const auto t = random_rigid_transform(8);
  CHECK(std::abs(distance_only(a.transformed(t), b.transformed(t)) - 5.0) <= 1e-12);
  CHECK_THROWS_AS(distance_only(a, a), CoincidentNodes);
}
