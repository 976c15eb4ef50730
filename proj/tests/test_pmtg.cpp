#include <doctest.h>

#include <cmath>

#include "terragym/pmtg.hpp"

using namespace terragym;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_SUITE("pmtg") {

TEST_CASE("phase advance formula") {
  TGParams p;
  p.frequency = 2.0;
  TGState s;

  SUBCASE("single step") {
    const TGState next = advance(s, p, 0.01);
    CHECK(next.phase == doctest::Approx(0.04 * 3.14159265358979323846).epsilon(1e-12));
  }
  SUBCASE("zero frequency freezes the phase") {
    p.frequency = 0.0;
    s.phase = 1.234;
    CHECK(advance(s, p, 0.01).phase == 1.234);
  }
  SUBCASE("one full period returns to the start") {
    p.frequency = 1.0;
    TGState state;
    for (int k = 0; k < 100; ++k) state = advance(state, p, 0.01);
    const double wrapped = std::min(state.phase, kTwoPi - state.phase);
    CHECK(wrapped < 1e-9);
  }
}

TEST_CASE("joint targets repeat with period 1/f") {
  const RobotModel model;
  TGParams p;
  p.frequency = 2.5;
  p.swing_height = 0.1;
  p.stride = 0.2;
  const int steps_per_period = 40;  // 1/(2.5 Hz) / 0.01 s

  TGState state;
  std::vector<Vector12> first_period;
  for (int k = 0; k < steps_per_period; ++k) {
    first_period.push_back(tg_joint_targets(foot_targets(state, p, model), model));
    state = advance(state, p, 0.01);
  }
  for (int k = 0; k < steps_per_period; ++k) {
    const Vector12 q = tg_joint_targets(foot_targets(state, p, model), model);
    CHECK((q - first_period[static_cast<size_t>(k)]).cwiseAbs().maxCoeff() < 1e-9);
    state = advance(state, p, 0.01);
  }
}

TEST_CASE("degenerate gait keeps all feet at the stance point") {
  const RobotModel model;
  TGParams p;
  p.swing_height = 0.0;
  p.stride = 0.0;
  TGState s;
  for (double phase = 0.0; phase < kTwoPi; phase += 0.05) {
    s.phase = phase;
    const auto targets = foot_targets(s, p, model);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      CHECK(targets[static_cast<size_t>(leg)].x() == doctest::Approx(0.0));
      CHECK(targets[static_cast<size_t>(leg)].y() ==
            doctest::Approx(model.lateral_offset(leg)));
      CHECK(targets[static_cast<size_t>(leg)].z() ==
            doctest::Approx(-model.nominal_stance_depth));
    }
  }
}

TEST_CASE("stride sweep covers exactly half a stride each way") {
  const RobotModel model;
  TGParams p;
  p.stride = 0.2;
  p.swing_height = 0.1;
  TGState s;
  double min_x = 1e9, max_x = -1e9;
  const int samples = 10000;
  for (int k = 0; k < samples; ++k) {
    s.phase = kTwoPi * k / samples;
    const double x = foot_targets(s, p, model)[0].x();
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
  }
  CHECK(min_x == doctest::Approx(-0.1).epsilon(1e-9));
  CHECK(max_x == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("trot symmetry of diagonal pairs") {
  const RobotModel model;
  TGParams p;
  p.stride = 0.15;
  p.swing_height = 0.08;
  TGState s;
  for (double phase = 0.0; phase < kTwoPi; phase += 0.01) {
    s.phase = phase;
    const auto t = foot_targets(s, p, model);
    // Diagonal pairs share x and z exactly (y differs by the lateral side).
    CHECK(t[kLeftFront].x() == doctest::Approx(t[kRightHind].x()).epsilon(1e-12));
    CHECK(t[kLeftFront].z() == doctest::Approx(t[kRightHind].z()).epsilon(1e-12));
    CHECK(t[kRightFront].x() == doctest::Approx(t[kLeftHind].x()).epsilon(1e-12));
    // Front pair is half a cycle apart.
    TGState shifted = s;
    shifted.phase = std::fmod(phase + kTwoPi / 2.0, kTwoPi);
    const auto t2 = foot_targets(shifted, p, model);
    CHECK(t[kRightFront].x() == doctest::Approx(t2[kLeftFront].x()).epsilon(1e-9));
    CHECK(t[kRightFront].z() == doctest::Approx(t2[kLeftFront].z()).epsilon(1e-9));
  }
}

TEST_CASE("foot targets are continuous in phase") {
  const RobotModel model;
  TGParams p;
  p.stride = 0.3;
  p.swing_height = 0.25;
  TGState s;
  Eigen::Vector3d prev;
  bool have_prev = false;
  for (double phase = 0.0; phase <= kTwoPi + 1e-9; phase += 1e-4) {
    s.phase = std::fmod(phase, kTwoPi);
    const Eigen::Vector3d t = foot_targets(s, p, model)[0];
    if (have_prev) CHECK((t - prev).norm() < 1e-3);
    prev = t;
    have_prev = true;
  }
}

TEST_CASE("compose_action adds the residual exactly and clamps at limits") {
  const RobotModel model;
  TGParams p;
  TGState s;
  const auto targets = foot_targets(s, p, model);
  const Vector12 base = tg_joint_targets(targets, model);

  SUBCASE("zero residual is the identity") {
    CHECK(compose_action(targets, Vector12::Zero(), model) == base);
  }
  SUBCASE("small residual adds exactly") {
    const Vector12 residual = Vector12::Constant(0.05);
    const Vector12 composed = compose_action(targets, residual, model);
    const Vector12 exact_sum = base + residual;
    CHECK(composed == exact_sum);
  }
  SUBCASE("beyond-limit residual clamps to the limit") {
    const Vector12 residual = Vector12::Constant(10.0);
    const Vector12 composed = compose_action(targets, residual, model);
    CHECK(composed == model.joint_upper);
  }
}

}  // TEST_SUITE
