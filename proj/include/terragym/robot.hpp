#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>

namespace terragym {

inline constexpr int kNumLegs = 4;
inline constexpr int kJointsPerLeg = 3;
inline constexpr int kNumJoints = kNumLegs * kJointsPerLeg;

using Vector12 = Eigen::Matrix<double, kNumJoints, 1>;

// Leg order used everywhere: LF, RF, LH, RH.
enum LegIndex { kLeftFront = 0, kRightFront = 1, kLeftHind = 2, kRightHind = 3 };

// Simplified quadruped: one rigid torso, four massless 3-joint legs
// (abduction about x, hip pitch about y, knee pitch about y).
struct RobotModel {
  double torso_mass = 22.0;
  Eigen::Matrix3d torso_inertia =
      (Eigen::Vector3d() << 0.156, 0.596, 0.669).finished().asDiagonal();
  std::array<Eigen::Vector3d, kNumLegs> hip_offsets = {
      Eigen::Vector3d(0.21, 0.12, 0.0), Eigen::Vector3d(0.21, -0.12, 0.0),
      Eigen::Vector3d(-0.21, 0.12, 0.0), Eigen::Vector3d(-0.21, -0.12, 0.0)};
  double upper_leg_length = 0.25;
  double lower_leg_length = 0.25;

  // Per-joint limits, repeated per leg in (abduction, hip, knee) order.
  Vector12 joint_lower = make_limits(-0.7, -1.8, 0.0);
  Vector12 joint_upper = make_limits(0.7, 1.8, 2.9);

  double torque_limit = 30.0;          // N*m
  Vector12 kp = Vector12::Constant(100.0);
  Vector12 kd = Vector12::Constant(2.0);
  double joint_reflected_inertia = 0.03;  // kg*m^2, drives q'' = tau / I

  double nominal_stance_depth = 0.42;   // foot below hip at rest, meters
  double stance_lateral_offset = 0.08;  // feet outboard of the hips, meters
  double gravity = 9.81;

  static Vector12 make_limits(double abd, double hip, double knee) {
    Vector12 v;
    for (int leg = 0; leg < kNumLegs; ++leg) {
      v[3 * leg + 0] = abd;
      v[3 * leg + 1] = hip;
      v[3 * leg + 2] = knee;
    }
    return v;
  }

  double max_leg_reach() const { return upper_leg_length + lower_leg_length; }

  // +1 for left legs, -1 for right legs.
  static double leg_side(int leg) { return (leg == kLeftFront || leg == kLeftHind) ? 1.0 : -1.0; }

  // Per-leg lateral foot offset in the hip frame.
  double lateral_offset(int leg) const { return leg_side(leg) * stance_lateral_offset; }

  // Joint angles that put every foot at the nominal stance point (outboard
  // of the hip, at the stance depth).
  Vector12 nominal_joint_angles() const;

  bool valid() const;
};

struct RobotState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
  Eigen::Vector3d linear_velocity = Eigen::Vector3d::Zero();
  Eigen::Vector3d angular_velocity = Eigen::Vector3d::Zero();  // torso frame
  Vector12 joint_positions = Vector12::Zero();
  Vector12 joint_velocities = Vector12::Zero();
  std::array<bool, kNumLegs> foot_contacts = {false, false, false, false};
  double time = 0.0;
};

bool state_is_finite(const RobotState& s);

// Roll, pitch, yaw (Z-Y-X convention) of a unit quaternion.
Eigen::Vector3d quaternion_to_rpy(const Eigen::Quaterniond& q);

}  // namespace terragym
