#include "terragym/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace terragym {

namespace {
constexpr double kLimitTolerance = 0.2;

inline double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }
}  // namespace

Vector12 RobotModel::nominal_joint_angles() const {
  Vector12 q;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d target(0.0, lateral_offset(leg), -nominal_stance_depth);
    q.segment<3>(3 * leg) = leg_inverse_kinematics(*this, target).angles;
  }
  return q;
}

bool RobotModel::valid() const {
  if (!(torso_mass > 0.0) || !(upper_leg_length > 0.0) || !(lower_leg_length > 0.0)) return false;
  Eigen::LLT<Eigen::Matrix3d> llt(torso_inertia);
  if (llt.info() != Eigen::Success) return false;
  for (int j = 0; j < kNumJoints; ++j) {
    if (!(joint_lower[j] < joint_upper[j])) return false;
  }
  return torque_limit > 0.0 && joint_reflected_inertia > 0.0;
}

bool state_is_finite(const RobotState& s) {
  return s.position.allFinite() && s.linear_velocity.allFinite() &&
         s.angular_velocity.allFinite() && s.joint_positions.allFinite() &&
         s.joint_velocities.allFinite() && s.orientation.coeffs().allFinite() &&
         std::abs(s.orientation.norm() - 1.0) < 1e-6 && std::isfinite(s.time);
}

Eigen::Vector3d quaternion_to_rpy(const Eigen::Quaterniond& q) {
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  const double roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
  double sp = 2.0 * (w * y - z * x);
  sp = clamp(sp, -1.0, 1.0);
  const double pitch = std::asin(sp);
  const double yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
  return {roll, pitch, yaw};
}

Eigen::Vector3d leg_forward_kinematics(const RobotModel& model, const Eigen::Vector3d& leg_q) {
  const double abd = clamp(leg_q[0], model.joint_lower[0] - kLimitTolerance,
                           model.joint_upper[0] + kLimitTolerance);
  const double hip = clamp(leg_q[1], model.joint_lower[1] - kLimitTolerance,
                           model.joint_upper[1] + kLimitTolerance);
  const double knee = clamp(leg_q[2], model.joint_lower[2] - kLimitTolerance,
                            model.joint_upper[2] + kLimitTolerance);
  const double l1 = model.upper_leg_length, l2 = model.lower_leg_length;
  const double k = hip + knee;
  const double x = -l1 * std::sin(hip) - l2 * std::sin(k);
  const double z0 = -(l1 * std::cos(hip) + l2 * std::cos(k));  // in the leg plane
  const double c1 = std::cos(abd), s1 = std::sin(abd);
  return {x, -s1 * z0, c1 * z0};
}

Eigen::Matrix3d leg_jacobian(const RobotModel& model, const Eigen::Vector3d& leg_q) {
  const double abd = leg_q[0], hip = leg_q[1], knee = leg_q[2];
  const double l1 = model.upper_leg_length, l2 = model.lower_leg_length;
  const double k = hip + knee;
  const double cu = std::cos(hip), su = std::sin(hip);
  const double ck = std::cos(k), sk = std::sin(k);
  const double c1 = std::cos(abd), s1 = std::sin(abd);
  const double z0 = -(l1 * cu + l2 * ck);
  const double dx_dhip = -l1 * cu - l2 * ck;
  const double dz0_dhip = l1 * su + l2 * sk;
  const double dx_dknee = -l2 * ck;
  const double dz0_dknee = l2 * sk;
  Eigen::Matrix3d J;
  J.col(0) << 0.0, -c1 * z0, -s1 * z0;
  J.col(1) << dx_dhip, -s1 * dz0_dhip, c1 * dz0_dhip;
  J.col(2) << dx_dknee, -s1 * dz0_dknee, c1 * dz0_dknee;
  return J;
}

std::array<Eigen::Vector3d, kNumLegs> forward_kinematics(
    const RobotModel& model, const Vector12& q, const Eigen::Vector3d& torso_position,
    const Eigen::Quaterniond& torso_orientation) {
  std::array<Eigen::Vector3d, kNumLegs> feet;
  const Eigen::Matrix3d R = torso_orientation.toRotationMatrix();
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d local =
        model.hip_offsets[static_cast<size_t>(leg)] +
        leg_forward_kinematics(model, q.segment<3>(3 * leg));
    feet[static_cast<size_t>(leg)] = torso_position + R * local;
  }
  return feet;
}

IkResult leg_inverse_kinematics(const RobotModel& model, const Eigen::Vector3d& foot_in_hip) {
  const double l1 = model.upper_leg_length, l2 = model.lower_leg_length;
  const double r_max = l1 + l2;
  const double r_min = std::abs(l1 - l2);

  IkResult result;
  Eigen::Vector3d p = foot_in_hip;
  double r = p.norm();
  if (r < 1e-9) {
    p = Eigen::Vector3d(0.0, 0.0, -std::max(r_min, 1e-9));
    r = p.norm();
    result.clamped = true;
  } else if (r > r_max) {
    p *= r_max / r;
    r = r_max;
    result.clamped = true;
  } else if (r < r_min) {
    p *= r_min / r;
    r = r_min;
    result.clamped = true;
  }

  const double abd = std::atan2(p.y(), -p.z());
  const double plane_z = -std::sqrt(p.y() * p.y() + p.z() * p.z());

  const double c_knee = clamp((r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double knee = std::acos(c_knee);  // knee-backward branch, in [0, pi]

  const double gamma = std::atan2(-p.x(), -plane_z);
  const double c_beta = clamp((l1 * l1 + r * r - l2 * l2) / (2.0 * l1 * r), -1.0, 1.0);
  const double hip = gamma - std::acos(c_beta);

  result.angles = Eigen::Vector3d(abd, hip, knee);
  return result;
}

}  // namespace terragym
