#include "terragym/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace terragym {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kParallelEps = 1e-12;
}  // namespace

double wrap_angle(double a) {
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w <= 0.0) w += 2.0 * kPi;
  return w - kPi;
}

double cast_ray(const Heightfield& field, const Eigen::Vector3d& origin,
                const Eigen::Vector3d& direction, double max_range) {
  const double ox = origin.x() - field.origin.x();
  const double oy = origin.y() - field.origin.y();
  const double dx = direction.x(), dy = direction.y(), dz = direction.z();
  const double ex = field.extent_x(), ey = field.extent_y();

  // Clip [t0, t1] to the horizontal footprint of the grid.
  double t0 = 0.0, t1 = max_range;
  const auto clip_axis = [&](double o, double d, double hi) {
    if (std::abs(d) < kParallelEps) return o >= 0.0 && o <= hi;
    const double ta = (0.0 - o) / d;
    const double tb = (hi - o) / d;
    t0 = std::max(t0, std::min(ta, tb));
    t1 = std::min(t1, std::max(ta, tb));
    return true;
  };
  if (!clip_axis(ox, dx, ex) || !clip_axis(oy, dy, ey) || t0 > t1) return max_range;

  const double px = ox + t0 * dx;
  const double py = oy + t0 * dy;
  int i = std::min(std::max(static_cast<int>(std::floor(px / field.cell_length)), 0),
                   field.rows - 1);
  int j = std::min(std::max(static_cast<int>(std::floor(py / field.cell_width)), 0),
                   field.cols - 1);

  const int step_i = dx > 0.0 ? 1 : -1;
  const int step_j = dy > 0.0 ? 1 : -1;
  const auto boundary_t = [&](int cell, double o, double d, double size, int step) {
    if (std::abs(d) < kParallelEps) return std::numeric_limits<double>::infinity();
    const double edge = (step > 0 ? cell + 1 : cell) * size;
    return (edge - o) / d;
  };

  double t = t0;
  while (t <= t1) {
    const double top = field.heights(i, j);
    const double z_here = origin.z() + t * dz;
    if (z_here < top) return t;  // entered below the pillar top: side face (or inside)

    double t_exit = std::min(boundary_t(i, ox, dx, field.cell_length, step_i),
                             boundary_t(j, oy, dy, field.cell_width, step_j));
    t_exit = std::min(t_exit, t1);
    if (dz < 0.0) {
      const double t_top = (top - origin.z()) / dz;
      if (t_top >= t && t_top <= t_exit) return t_top;  // crossed down onto the top face
    }
    if (t_exit >= t1) break;

    const double ti = boundary_t(i, ox, dx, field.cell_length, step_i);
    const double tj = boundary_t(j, oy, dy, field.cell_width, step_j);
    if (ti <= tj) {
      i += step_i;
      if (i < 0 || i >= field.rows) break;
    }
    if (tj <= ti) {
      j += step_j;
      if (j < 0 || j >= field.cols) break;
    }
    t = t_exit;
  }
  return max_range;
}

LidarScan raycast_scan(const LidarConfig& config, const Eigen::Vector3d& sensor_position,
                       const Eigen::Quaterniond& sensor_orientation, const Heightfield& field,
                       uint64_t seed) {
  if (!config.valid()) throw std::invalid_argument("invalid lidar config");
  LidarScan scan;
  scan.distances.resize(config.channels, config.azimuth_bins);
  scan.normalized.resize(config.beam_count());

  const Eigen::Matrix3d R = sensor_orientation.toRotationMatrix();
  const double fov = config.vertical_fov_deg * kPi / 180.0;
  Rng rng(seed);
  for (int c = 0; c < config.channels; ++c) {
    const double elev =
        config.channels == 1 ? 0.0 : -0.5 * fov + fov * c / (config.channels - 1);
    const double ce = std::cos(elev), se = std::sin(elev);
    for (int k = 0; k < config.azimuth_bins; ++k) {
      const double az = 2.0 * kPi * k / config.azimuth_bins;
      const Eigen::Vector3d dir_local(ce * std::cos(az), ce * std::sin(az), se);
      double d = cast_ray(field, sensor_position, R * dir_local, config.max_range);
      if (config.noise_sigma > 0.0) d += rng.normal(0.0, config.noise_sigma);
      d = std::min(std::max(d, 0.0), config.max_range);
      scan.distances(c, k) = d;
      scan.normalized[c * config.azimuth_bins + k] = d / config.max_range;
    }
  }
  return scan;
}

ProprioReading proprioception(const RobotState& state, double noise_sigma, uint64_t seed) {
  ProprioReading reading;
  const Eigen::Vector3d rpy = quaternion_to_rpy(state.orientation);
  reading.angular_velocity = state.angular_velocity;
  reading.joint_positions = state.joint_positions;
  reading.roll = rpy.x();
  reading.pitch = rpy.y();
  if (noise_sigma > 0.0) {
    Rng rng(seed);
    for (int k = 0; k < 3; ++k) reading.angular_velocity[k] += rng.normal(0.0, noise_sigma);
    for (int k = 0; k < kNumJoints; ++k) reading.joint_positions[k] += rng.normal(0.0, noise_sigma);
    reading.roll += rng.normal(0.0, noise_sigma);
    reading.pitch += rng.normal(0.0, noise_sigma);
  }
  return reading;
}

GoalReading goal_sensor(const RobotState& state, const Eigen::Vector3d& goal) {
  GoalReading reading;
  const Eigen::Vector3d delta = goal - state.position;
  reading.distance = delta.norm();
  if (reading.distance < 1e-9) {
    reading.heading = 0.0;
    return reading;
  }
  const double yaw = quaternion_to_rpy(state.orientation).z();
  const double bearing = std::atan2(delta.y(), delta.x());
  reading.heading = wrap_angle(bearing - yaw);
  return reading;
}

}  // namespace terragym
