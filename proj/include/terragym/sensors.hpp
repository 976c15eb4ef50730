#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "terragym/heightfield.hpp"
#include "terragym/rng.hpp"
#include "terragym/robot.hpp"

namespace terragym {

struct LidarConfig {
  int channels = 16;
  double vertical_fov_deg = 30.0;  // centered on the horizon
  int azimuth_bins = 64;
  double max_range = 10.0;
  double noise_sigma = 0.02;
  Eigen::Vector3d mount_offset = Eigen::Vector3d(0.0, 0.0, 0.15);  // torso frame

  bool valid() const {
    return channels >= 1 && azimuth_bins >= 4 && max_range > 0.0 && noise_sigma >= 0.0;
  }
  int beam_count() const { return channels * azimuth_bins; }
};

struct LidarScan {
  Eigen::MatrixXd distances;   // channels x azimuth_bins, meters
  Eigen::VectorXd normalized;  // flattened row-major by channel then azimuth, in [0, 1]
};

// Distance along a unit-direction ray to the first pillar surface (top or
// vertical side face); max_range if nothing is hit inside the grid.
double cast_ray(const Heightfield& field, const Eigen::Vector3d& origin,
                const Eigen::Vector3d& direction, double max_range);

// Full scan from a sensor pose. Azimuth bin 0 points along the sensor's +x;
// channel 0 is the lowest elevation. Gaussian range noise is applied before
// clamping to [0, max_range] and normalizing.
LidarScan raycast_scan(const LidarConfig& config, const Eigen::Vector3d& sensor_position,
                       const Eigen::Quaterniond& sensor_orientation, const Heightfield& field,
                       uint64_t seed);

struct ProprioReading {
  Eigen::Vector3d angular_velocity;
  Vector12 joint_positions;
  double roll = 0.0;
  double pitch = 0.0;
};

ProprioReading proprioception(const RobotState& state, double noise_sigma = 0.0,
                              uint64_t seed = 0);

struct GoalReading {
  double distance = 0.0;  // meters
  double heading = 0.0;   // radians in (-pi, pi], left positive
};

GoalReading goal_sensor(const RobotState& state, const Eigen::Vector3d& goal);

// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace terragym
