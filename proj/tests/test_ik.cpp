#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "quadgait/ik.hpp"
#include "test_support.hpp"

using namespace quadgait;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

// Random unit direction that keeps a safe angle from the forward pole.
Vec3 direction_off_pole(std::mt19937_64& rng) {
  Vec3 d;
  do d = qg_test::random_unit(rng);
  while (std::abs(d.dot(forward_axis())) > 0.95);
  return d;
}

struct LimbFixture {
  Skeleton s = build_quadruped_template();
  double coupling = 2.6;

  // Radial reach of the leg's IK solve (root -> fetlock).
  std::pair<double, double> annulus(LegId leg) const {
    const auto& n = s.leg(leg).joints;
    const double l1 = s.joint(n[1]).rest_offset.norm();
    const double l2 = n.size() == 4 ? s.joint(n[2]).rest_offset.norm()
                                    : coupled_length(s.joint(n[2]).rest_offset.norm(),
                                                     s.joint(n[3]).rest_offset.norm(), coupling);
    return {std::abs(l1 - l2), l1 + l2};
  }
  double pastern(LegId leg) const { return s.joint(s.leg(leg).foot()).rest_offset.norm(); }
};

}  // namespace

TEST_CASE("two-bone examples", "[ik]") {
  const Vec3 pole = forward_axis();
  SECTION("straight reach gives a pi interior angle") {
    const auto sol = solve_two_bone(Vec3::Zero(), Vec3(0, -2, 0), 1, 1, pole);
    REQUIRE(sol.reached);
    CHECK(interior_angle(sol.joint_positions[0], sol.joint_positions[1], sol.joint_positions[2]) ==
          Approx(kPi).margin(1e-6));
  }
  SECTION("target at sqrt(2) gives a right angle") {
    const auto sol = solve_two_bone(Vec3::Zero(), Vec3(0, -std::sqrt(2.0), 0), 1, 1, pole);
    REQUIRE(sol.reached);
    CHECK(sol.residual < 1e-12);
    CHECK(interior_angle(sol.joint_positions[0], sol.joint_positions[1], sol.joint_positions[2]) ==
          Approx(kPi / 2).margin(1e-12));
    CHECK(sol.joint_positions[1].z() > 0.0);
  }
  SECTION("target at distance 3 with reach 2") {
    const auto sol = solve_two_bone(Vec3::Zero(), Vec3(0, -3, 0), 1, 1, pole);
    CHECK_FALSE(sol.reached);
    CHECK(sol.residual == Approx(1.0).margin(1e-12));
    CHECK((sol.joint_positions[2] - Vec3(0, -2, 0)).norm() < 1e-12);
  }
  SECTION("target inside the fold radius clamps to full fold") {
    const auto sol = solve_two_bone(Vec3::Zero(), Vec3(0, -0.1, 0), 1.0, 0.6, pole);
    CHECK_FALSE(sol.reached);
    CHECK(sol.residual == Approx(0.3).margin(1e-12));
  }
  SECTION("errors") {
    CHECK_THROWS_WITH(solve_two_bone(Vec3::Zero(), Vec3::Zero(), 1, 1, pole), ContainsSubstring("coincides"));
    CHECK_THROWS_WITH(solve_two_bone(Vec3::Zero(), Vec3(0, 0, 1), 1, 1, pole), ContainsSubstring("collinear"));
    CHECK_THROWS_AS(solve_two_bone(Vec3::Zero(), Vec3(0, -1, 0), 0, 1, pole), Error);
    CHECK_THROWS_AS(solve_coupled_three_bone(Vec3::Zero(), Vec3(0, -1, 0), {1, 1, 1}, 0.0, pole), Error);
  }
}

TEST_CASE("coupling angle of pi reduces to a straight lower pair", "[ik]") {
  std::mt19937_64 rng(21);
  for (int n = 0; n < 200; ++n) {
    const Vec3 target = direction_off_pole(rng) * qg_test::uniform(rng, 0.2, 1.2);
    const auto three = solve_coupled_three_bone(Vec3::Zero(), target, {0.5, 0.4, 0.3}, kPi, forward_axis());
    const auto two = solve_two_bone(Vec3::Zero(), target, 0.5, 0.7, forward_axis());
    CHECK((three.joint_positions[1] - two.joint_positions[1]).norm() < 1e-12);
    CHECK((three.joint_positions[3] - two.joint_positions[2]).norm() < 1e-12);
    CHECK(three.reached == two.reached);
  }
}

TEST_CASE("coupled solve keeps segment lengths and the locked angle", "[ik][property]") {
  std::mt19937_64 rng(23);
  const std::array<double, 3> len{0.45, 0.45, 0.40};
  const double coupling = 2.6;
  const double virt = coupled_length(len[1], len[2], coupling);
  for (int n = 0; n < 1000; ++n) {
    const double d = qg_test::uniform(rng, std::abs(len[0] - virt) + 1e-3, len[0] + virt - 1e-3);
    const Vec3 root(qg_test::uniform(rng, -1, 1), qg_test::uniform(rng, 0, 2), qg_test::uniform(rng, -1, 1));
    const Vec3 target = root + direction_off_pole(rng) * d;
    const auto sol = solve_coupled_three_bone(root, target, len, coupling, forward_axis());
    REQUIRE(sol.reached);
    const auto& p = sol.joint_positions;
    CHECK(std::abs((p[1] - p[0]).norm() - len[0]) < 1e-12);
    CHECK(std::abs((p[2] - p[1]).norm() - len[1]) < 1e-12);
    CHECK(std::abs((p[3] - p[2]).norm() - len[2]) < 1e-12);
    CHECK((p[3] - target).norm() < 1e-12);
    CHECK(interior_angle(p[1], p[2], p[3]) == Approx(coupling).margin(1e-9));
  }
}

TEST_CASE("FK of the IK solution lands the foot on target", "[ik][property]") {
  LimbFixture fx;
  std::mt19937_64 rng(29);
  for (LegId leg : kAllLegs) {
    const auto [fold, reach] = fx.annulus(leg);
    const LegChain& chain = fx.s.leg(leg);
    double worst = 0.0;
    for (int n = 0; n < 1000; ++n) {
      // Random body pose so the leg root carries an arbitrary parent frame.
      Pose pose = qg_test::random_pose(fx.s, rng);
      for (const auto& j : chain.joints) pose.rotations.erase(j);
      const WorldPose body = local_to_world(fx.s, pose);
      const auto root_idx = *fx.s.find(chain.root());
      const Mat3 parent = body.at(fx.s.joints()[static_cast<std::size_t>(fx.s.parent_index(root_idx))].name).orientation;
      const Vec3 root = body.position(chain.root());

      const double d = qg_test::uniform(rng, fold + 1e-3, reach - 1e-3);
      const Vec3 fetlock = root + direction_off_pole(rng) * d;
      const Vec3 foot = fetlock - fx.pastern(leg) * up_axis();
      const IkSolution sol = solve_leg(fx.s, chain, parent, root, foot, fx.coupling, forward_axis());
      REQUIRE(sol.reached);
      for (const auto& [name, e] : sol.joint_rotations) pose.rotations[name] = e;
      const WorldPose solved = local_to_world(fx.s, pose);
      worst = std::max(worst, (solved.position(chain.foot()) - foot).norm());
      worst = std::max(worst, (qg_test::oracle_position(fx.s, pose, chain.foot()) - foot).norm());
      for (std::size_t k = 0; k < chain.joints.size(); ++k)
        worst = std::max(worst, (solved.position(chain.joints[k]) - sol.joint_positions[k]).norm());
    }
    INFO("leg " << to_string(leg));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("unreachable targets report the distance overshoot", "[ik]") {
  LimbFixture fx;
  std::mt19937_64 rng(31);
  for (LegId leg : kAllLegs) {
    const auto [fold, reach] = fx.annulus(leg);
    const LegChain& chain = fx.s.leg(leg);
    const Vec3 root = local_to_world(fx.s, Pose{}).position(chain.root());
    for (int n = 0; n < 100; ++n) {
      const double d = qg_test::uniform(rng, reach + 1e-3, reach + 2.0);
      const Vec3 fetlock = root + direction_off_pole(rng) * d;
      const IkSolution sol = solve_leg(fx.s, chain, Mat3::Identity(), root, fetlock - fx.pastern(leg) * up_axis(),
                                       fx.coupling, forward_axis());
      CHECK_FALSE(sol.reached);
      CHECK(std::abs(sol.residual - (d - reach)) < 1e-9);
    }
  }
}

TEST_CASE("knee stays in the pole plane on the pole side", "[ik][property]") {
  std::mt19937_64 rng(37);
  for (int n = 0; n < 1000; ++n) {
    const Vec3 pole = qg_test::random_unit(rng);
    Vec3 dir;
    do dir = qg_test::random_unit(rng);
    while (std::abs(dir.dot(pole)) > 0.95);
    const Vec3 target = dir * qg_test::uniform(rng, 0.3, 1.9);
    const auto sol = solve_two_bone(Vec3::Zero(), target, 1.0, 1.0, pole);
    const Vec3 normal = dir.cross(pole).normalized();
    CHECK(std::abs(sol.joint_positions[1].dot(normal)) < 1e-12);
    CHECK(sol.joint_positions[1].dot(pole - pole.dot(dir) * dir) > 0.0);
  }
}

TEST_CASE("small target moves give small joint moves", "[ik][property]") {
  std::mt19937_64 rng(41);
  for (int n = 0; n < 500; ++n) {
    const Vec3 target = direction_off_pole(rng) * qg_test::uniform(rng, 0.5, 1.8);
    const Vec3 nudged = target + qg_test::random_unit(rng) * 1e-6;
    const auto a = solve_two_bone(Vec3::Zero(), target, 1.0, 1.0, forward_axis());
    const auto b = solve_two_bone(Vec3::Zero(), nudged, 1.0, 1.0, forward_axis());
    CHECK((a.joint_positions[1] - b.joint_positions[1]).norm() < 1e-3);
  }
}

TEST_CASE("chain_wave examples", "[ik]") {
  const auto flat = chain_wave(4, 0.0, 1.3, 0.2);
  for (const auto& e : flat) CHECK(e == Euler{});
  const auto w = chain_wave(3, 0.5, kPi / 2, 0.0);
  for (const auto& e : w) CHECK(e.x == Approx(0.5).margin(1e-15));
  const auto lag = chain_wave(3, 1.0, 0.0, 0.25);
  CHECK(lag[2].x == Approx(std::sin(0.5)).margin(1e-15));
  CHECK_THROWS_AS(chain_wave(0, 1.0, 0.0, 0.0), Error);
}
