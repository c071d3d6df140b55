#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "quadgait/gait.hpp"
#include "test_support.hpp"

using namespace quadgait;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

GaitParams with_phases(double fr, double fl, double br, double bl) {
  GaitParams g;
  g.leg(LegId::FR).impact_phase = fr;
  g.leg(LegId::FL).impact_phase = fl;
  g.leg(LegId::BR).impact_phase = br;
  g.leg(LegId::BL).impact_phase = bl;
  return g;
}

}  // namespace

TEST_CASE("cyclic_time examples", "[gait]") {
  CHECK(cyclic_time(0, 24, 1) == 0.0);
  CHECK(cyclic_time(24, 24, 1) == 0.0);
  CHECK(cyclic_time(3, 24, 4) == Approx(0.5).margin(1e-15));
  CHECK_THROWS_AS(cyclic_time(1, 0, 1), Error);
  CHECK_THROWS_AS(cyclic_time(1, 24, -1), Error);
  CHECK_THROWS_AS(cyclic_time(-1, 24, 1), Error);
}

TEST_CASE("cyclic_time is periodic for integer frames per cycle", "[gait][property]") {
  std::mt19937_64 rng(3);
  const double fps_values[] = {24, 30, 60, 120};
  const int frames_per_cycle[] = {1, 2, 3, 5, 6, 8, 12, 24, 48};
  for (int n = 0; n < 1000; ++n) {
    const double fps = fps_values[n % 4];
    const int period = frames_per_cycle[n % 9];
    const double f = fps / period;
    const double tf = qg_test::uniform(rng, 0, 500);
    const double a = cyclic_time(tf, fps, f), b = cyclic_time(tf + period, fps, f);
    const double d = std::abs(a - b);
    CHECK(std::min(d, 1.0 - d) < 1e-9);
  }
}

TEST_CASE("leg_phase examples for amble FR", "[gait]") {
  const LegParams fr = preset("amble").params.leg(LegId::FR);
  auto s = leg_phase(0.25, fr);
  CHECK(s.mode == LegMode::Stance);
  CHECK(s.progress == Approx(1.0 / 3.0).margin(1e-15));
  CHECK(s.absolute_phase == 2.0);

  s = leg_phase(0.125, fr);
  CHECK(s.mode == LegMode::Stance);
  CHECK(s.progress == 0.0);

  s = leg_phase(0.5, fr);
  CHECK(s.mode == LegMode::Swing);
  CHECK(s.progress == 0.0);

  CHECK_THROWS_AS(leg_phase(1.0, fr), Error);
  CHECK_THROWS_AS(leg_phase(-0.1, fr), Error);
}

TEST_CASE("stance measure over a cycle equals the duty factor", "[gait][property]") {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 50; ++n) {
    LegParams l;
    l.impact_phase = qg_test::uniform(rng, 0, 8);
    l.impact_duration = qg_test::uniform(rng, 0.1, 7.9);
    int stance = 0;
    const int samples = 10000;
    for (int i = 0; i < samples; ++i) {
      const auto s = leg_phase(static_cast<double>(i) / samples, l);
      CHECK(s.progress >= 0.0);
      CHECK(s.progress < 1.0);
      stance += s.mode == LegMode::Stance;
    }
    CHECK(std::abs(static_cast<double>(stance) / samples - l.duty_factor()) < 1e-3);
  }
}

TEST_CASE("footfall_order examples", "[gait]") {
  using A = std::array<LegId, 4>;
  CHECK(footfall_order(preset("amble").params) == A{LegId::FR, LegId::BL, LegId::FL, LegId::BR});
  CHECK(footfall_order(with_phases(3, 3, 3, 3)) == A{LegId::FR, LegId::FL, LegId::BR, LegId::BL});
  CHECK(footfall_order(with_phases(0, 2, 4, 6)) == A{LegId::FR, LegId::FL, LegId::BR, LegId::BL});
}

TEST_CASE("footfall_order cyclic sequence survives rotating the cycle", "[gait][property]") {
  std::mt19937_64 rng(8);
  for (int n = 0; n < 1000; ++n) {
    // Distinct phases so the tie-break cannot reorder the rotated list.
    std::array<double, 4> ph;
    do {
      for (double& p : ph) p = qg_test::uniform(rng, 0, 8);
    } while ([&] {
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
          if (std::abs(ph[i] - ph[j]) < 1e-6) return true;
      return false;
    }());
    const double shift = qg_test::uniform(rng, 0, 8);
    const auto a = footfall_order(with_phases(ph[0], ph[1], ph[2], ph[3]));
    const auto b = footfall_order(with_phases(wrap(ph[0] + shift, 8), wrap(ph[1] + shift, 8), wrap(ph[2] + shift, 8),
                                              wrap(ph[3] + shift, 8)));
    const auto start = std::find(b.begin(), b.end(), a[0]) - b.begin();
    for (int k = 0; k < 4; ++k) CHECK(b[static_cast<std::size_t>((start + k) % 4)] == a[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("amble preset carries the published values", "[gait][preset]") {
  const GaitParams g = preset("amble").params;
  CHECK(g.motion_frequency == 4.0);
  for (const auto& l : g.legs) CHECK(l.impact_duration == 3.0);
  CHECK(g.leg(LegId::FR).impact_phase == 1.0);
  CHECK(g.leg(LegId::FL).impact_phase == 5.0);
  CHECK(g.leg(LegId::BR).impact_phase == 7.0);
  CHECK(g.leg(LegId::BL).impact_phase == 3.0);
}

TEST_CASE("walk keeps two feet down and is an even lateral sequence", "[gait][preset]") {
  const GaitParams g = preset("walk").params;
  std::array<double, 4> ph{};
  for (LegId id : kAllLegs) {
    CHECK(g.leg(id).impact_duration > 4.0);
    ph[index(id)] = g.leg(id).impact_phase;
  }
  std::sort(ph.begin(), ph.end());
  for (int k = 0; k < 4; ++k) CHECK(circular_delta(ph[k], ph[(k + 1) % 4]) == Approx(2.0));
  // Lateral sequence: a hind foot is followed by the fore foot on the same side.
  using A = std::array<LegId, 4>;
  CHECK(footfall_order(g) == A{LegId::BL, LegId::FL, LegId::BR, LegId::FR});

  int min_grounded = 4;
  for (int i = 0; i < 10000; ++i) {
    int grounded = 0;
    for (const auto& l : g.legs) grounded += leg_phase(i / 10000.0, l).mode == LegMode::Stance;
    min_grounded = std::min(min_grounded, grounded);
  }
  CHECK(min_grounded == 2);
}

TEST_CASE("preset lookup", "[gait][preset]") {
  CHECK(preset_names() == std::vector<std::string>{"walk", "amble", "trot", "gallop"});
  for (const auto& name : preset_names()) CHECK_NOTHROW(validate(preset(name).params));
  CHECK_THROWS_WITH(preset("nonsense"), ContainsSubstring("walk") && ContainsSubstring("amble") &&
                                            ContainsSubstring("trot") && ContainsSubstring("gallop"));

  GaitPreset copy = preset("amble");
  copy.params.motion_frequency = 99.0;
  copy.params.leg(LegId::FR).impact_phase = 6.0;
  CHECK(preset("amble").params.motion_frequency == 4.0);
  CHECK(preset("amble").params.leg(LegId::FR).impact_phase == 1.0);
}

TEST_CASE("validate names the violated field", "[gait]") {
  GaitParams g;
  g.leg(LegId::FL).impact_duration = 9.0;
  CHECK_THROWS_WITH(validate(g), ContainsSubstring("legs.FL.impact_duration"));
  g = {};
  g.motion_frequency = 0.0;
  CHECK_THROWS_WITH(validate(g), ContainsSubstring("motion_frequency"));
  g = {};
  g.leg(LegId::BR).impact_phase = 8.0;
  CHECK_THROWS_WITH(validate(g), ContainsSubstring("impact_phase"));
}

TEST_CASE("blend_params endpoints are exact", "[gait][blend]") {
  std::mt19937_64 rng(13);
  for (int n = 0; n < 100; ++n) {
    const GaitParams a = qg_test::random_params(rng), b = qg_test::random_params(rng);
    CHECK(blend_params(a, b, 0.0) == a);
    CHECK(blend_params(a, b, 1.0) == b);
  }
}

TEST_CASE("blend of phases 7 and 1 wraps through 0", "[gait][blend]") {
  GaitParams a = with_phases(7, 7, 7, 7), b = with_phases(1, 1, 1, 1);
  const GaitParams m = blend_params(a, b, 0.5);
  const double oracle = qg_test::circular_weighted_mean(7, 1, 0.5);
  CHECK(std::min(oracle, 8.0 - oracle) < 1e-7);  // grid oracle resolves a flat minimum to ~1e-8
  for (const auto& l : m.legs) CHECK(l.impact_phase == 0.0);
}

TEST_CASE("blend_phase agrees with the circular-mean oracle", "[gait][blend][property]") {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 200; ++n) {
    const double a = qg_test::uniform(rng, 0, 8), b = qg_test::uniform(rng, 0, 8);
    if (std::abs(std::abs(circular_delta(a, b)) - 4.0) < 1e-3) continue;  // antipodal: two minimizers
    const double t = qg_test::uniform(rng, 0, 1);
    const double got = blend_phase(a, b, t);
    const double want = qg_test::circular_weighted_mean(a, b, t);
    CHECK(std::abs(circular_delta(got, want)) < 1e-7);
    CHECK(got >= 0.0);
    CHECK(got < 8.0);
  }
}

TEST_CASE("blend_params of a gait with itself is the gait", "[gait][blend][property]") {
  std::mt19937_64 rng(19);
  for (int n = 0; n < 200; ++n) {
    const GaitParams a = qg_test::random_params(rng);
    const double t = qg_test::uniform(rng, 0, 1);
    const GaitParams m = blend_params(a, a, t);
    CHECK(m.motion_frequency == Approx(a.motion_frequency).epsilon(1e-15));
    for (LegId id : kAllLegs) {
      CHECK(std::abs(circular_delta(m.leg(id).impact_phase, a.leg(id).impact_phase)) < 1e-12);
      CHECK(m.leg(id).impact_duration == Approx(a.leg(id).impact_duration).epsilon(1e-15));
    }
  }
}

TEST_CASE("blend_params edge cases", "[gait][blend]") {
  const GaitParams a, b;
  CHECK_THROWS_WITH(blend_params(a, b, 1.5), ContainsSubstring("[0, 1]"));
  CHECK_THROWS_AS(blend_params(a, b, -0.01), Error);

  // Half a cycle apart: the increasing direction wins.
  CHECK(blend_phase(0.0, 4.0, 0.5) == 2.0);
  CHECK(blend_phase(4.0, 0.0, 0.5) == 6.0);
  CHECK(circular_delta(0.0, 4.0) == 4.0);
  CHECK(circular_delta(4.0, 0.0) == 4.0);
}
