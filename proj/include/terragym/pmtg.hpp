#pragma once

#include <array>

#include "terragym/kinematics.hpp"
#include "terragym/robot.hpp"

namespace terragym {

// Modulation parameters the policy feeds to the trajectory generator.
struct TGParams {
  double frequency = 1.5;     // Hz, in [0, kMaxFrequency]
  double swing_height = 0.08;  // m, in [0, kMaxSwingHeight]
  double stride = 0.0;        // m, in [-kMaxStride, kMaxStride]; negative walks backward

  static constexpr double kMaxFrequency = 3.0;
  static constexpr double kMaxSwingHeight = 0.25;
  static constexpr double kMaxStride = 0.3;

  TGParams clamped() const;
};

// Phase state of the trot generator. Diagonal pairs (LF, RH) and (RF, LH)
// are half a cycle apart.
struct TGState {
  double phase = 0.0;  // radians in [0, 2*pi)
  std::array<double, kNumLegs> leg_offsets = {0.0, 3.14159265358979323846,
                                              3.14159265358979323846, 0.0};
};

// phase <- (phase + 2*pi*f*dt) mod 2*pi
TGState advance(const TGState& state, const TGParams& params, double dt);

// Cyclic foot targets in each hip frame: linear backward sweep at nominal
// depth during stance, cycloidal lift-and-forward during swing.
std::array<Eigen::Vector3d, kNumLegs> foot_targets(const TGState& state, const TGParams& params,
                                                   const RobotModel& model);

// Joint targets: IK of the generator's foot targets plus the learned
// residual, exact sum clamped to the joint limits.
Vector12 compose_action(const std::array<Eigen::Vector3d, kNumLegs>& tg_targets,
                        const Vector12& residual, const RobotModel& model);

// IK of the generator targets alone (the feed-forward part of the action).
Vector12 tg_joint_targets(const std::array<Eigen::Vector3d, kNumLegs>& tg_targets,
                          const RobotModel& model);

}  // namespace terragym
