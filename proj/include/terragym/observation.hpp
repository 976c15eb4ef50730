#pragma once

#include <Eigen/Core>

#include "terragym/robot.hpp"

namespace terragym {

// Flattened observation layout shared by the environment and the policy.
// Order: previous action, lidar, angular velocity, joint angles, roll/pitch,
// trajectory-generator state, goal distance, goal heading.
struct ObsLayout {
  int action_dim = 15;
  int lidar_dim = 1024;

  int prev_action_offset() const { return 0; }
  int lidar_offset() const { return action_dim; }
  int angular_velocity_offset() const { return lidar_offset() + lidar_dim; }
  int joint_offset() const { return angular_velocity_offset() + 3; }
  int roll_pitch_offset() const { return joint_offset() + kNumJoints; }
  int tg_offset() const { return roll_pitch_offset() + 2; }
  int goal_dist_offset() const { return tg_offset() + 5; }
  int goal_heading_offset() const { return goal_dist_offset() + 1; }
  int total_dim() const { return goal_heading_offset() + 1; }

  int proprio_dim() const { return action_dim + 3 + kNumJoints + 2 + 5; }

  bool operator==(const ObsLayout&) const = default;
};

// Affine map between the policy's normalized action space [-1, 1]^A and
// physical commands. PMTG mode: (frequency, swing height, stride, 12 joint
// residuals); reactive mode: 12 joint targets around the nominal stance.
struct ActionScaling {
  Eigen::VectorXd center;
  Eigen::VectorXd half_range;

  Eigen::VectorXd to_physical(const Eigen::VectorXd& normalized) const;
  Eigen::VectorXd to_normalized(const Eigen::VectorXd& physical) const;

  static ActionScaling pmtg(double residual_bound = 0.4);
  static ActionScaling reactive(const RobotModel& model, double target_bound = 0.6);
};

}  // namespace terragym
