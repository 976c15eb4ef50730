#pragma once

#include <array>

#include "terragym/robot.hpp"

namespace terragym {

// Foot position in the hip frame (x forward, y left, z up) for one leg's
// (abduction, hip pitch, knee pitch) angles. Angles are clamped to the joint
// limits plus a 0.2 rad tolerance band.
Eigen::Vector3d leg_forward_kinematics(const RobotModel& model, const Eigen::Vector3d& leg_q);

// 3x3 Jacobian d(foot position)/d(leg angles) in the hip frame.
Eigen::Matrix3d leg_jacobian(const RobotModel& model, const Eigen::Vector3d& leg_q);

// World-frame foot positions for all four legs.
std::array<Eigen::Vector3d, kNumLegs> forward_kinematics(const RobotModel& model,
                                                         const Vector12& q,
                                                         const Eigen::Vector3d& torso_position,
                                                         const Eigen::Quaterniond& torso_orientation);

struct IkResult {
  Eigen::Vector3d angles;
  bool clamped = false;  // target was outside the reachable annulus
};

// Knee-backward analytic solution. Unreachable targets are clamped to the
// nearest reachable point and flagged.
IkResult leg_inverse_kinematics(const RobotModel& model, const Eigen::Vector3d& foot_in_hip);

}  // namespace terragym
