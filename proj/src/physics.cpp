#include "terragym/physics.hpp"

#include <cmath>
#include <stdexcept>

namespace terragym {

namespace {

Eigen::Quaterniond integrate_orientation(const Eigen::Quaterniond& q,
                                         const Eigen::Vector3d& omega_body, double dt) {
  const Eigen::Vector3d theta = omega_body * dt;
  const double angle = theta.norm();
  Eigen::Quaterniond dq;
  if (angle < 1e-12) {
    dq = Eigen::Quaterniond(1.0, 0.5 * theta.x(), 0.5 * theta.y(), 0.5 * theta.z());
  } else {
    const double half = 0.5 * angle;
    const Eigen::Vector3d axis = theta / angle;
    const double s = std::sin(half);
    dq = Eigen::Quaterniond(std::cos(half), s * axis.x(), s * axis.y(), s * axis.z());
  }
  Eigen::Quaterniond out = q * dq;
  out.normalize();
  return out;
}

}  // namespace

RobotState step_lowlevel(const RobotModel& model, const RobotState& state,
                         const Vector12& target_q, const Heightfield& field,
                         const ContactParams& contact, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_lowlevel: dt must be positive");
  if (!state_is_finite(state) || !target_q.allFinite()) {
    throw std::invalid_argument("step_lowlevel: non-finite input state");
  }

  RobotState next = state;

  // PD torques, saturated.
  Vector12 tau = (model.kp.array() * (target_q - state.joint_positions).array() -
                  model.kd.array() * state.joint_velocities.array())
                     .matrix();
  tau = tau.cwiseMax(-model.torque_limit).cwiseMin(model.torque_limit);

  // Joint integration (legs are massless; each joint sees a reflected inertia).
  next.joint_velocities = state.joint_velocities + (dt / model.joint_reflected_inertia) * tau;
  next.joint_positions = state.joint_positions + dt * next.joint_velocities;
  for (int j = 0; j < kNumJoints; ++j) {
    if (next.joint_positions[j] < model.joint_lower[j]) {
      next.joint_positions[j] = model.joint_lower[j];
      if (next.joint_velocities[j] < 0.0) next.joint_velocities[j] = 0.0;
    } else if (next.joint_positions[j] > model.joint_upper[j]) {
      next.joint_positions[j] = model.joint_upper[j];
      if (next.joint_velocities[j] > 0.0) next.joint_velocities[j] = 0.0;
    }
  }

  // Contact forces from the updated leg configuration and current torso state.
  const Eigen::Matrix3d R = state.orientation.toRotationMatrix();
  const Eigen::Vector3d omega_world = R * state.angular_velocity;
  Eigen::Vector3d force_sum(0.0, 0.0, 0.0);
  Eigen::Vector3d torque_world(0.0, 0.0, 0.0);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Eigen::Vector3d leg_q = next.joint_positions.segment<3>(3 * leg);
    const Eigen::Vector3d leg_qd = next.joint_velocities.segment<3>(3 * leg);
    const Eigen::Vector3d local =
        model.hip_offsets[static_cast<size_t>(leg)] + leg_forward_kinematics(model, leg_q);
    const Eigen::Vector3d foot = state.position + R * local;
    const double ground = field.height_at(foot.x(), foot.y());
    const double penetration = ground - foot.z();
    if (penetration <= 0.0) {
      next.foot_contacts[static_cast<size_t>(leg)] = false;
      continue;
    }
    next.foot_contacts[static_cast<size_t>(leg)] = true;

    const Eigen::Vector3d foot_vel = state.linear_velocity + omega_world.cross(R * local) +
                                     R * (leg_jacobian(model, leg_q) * leg_qd);

    const double pen_eff = std::min(penetration, contact.max_penetration);
    double normal = contact.normal_stiffness * pen_eff - contact.normal_damping * foot_vel.z();
    normal = std::min(std::max(normal, 0.0),
                      contact.normal_stiffness * contact.max_penetration);

    Eigen::Vector3d tangential(-contact.tangential_damping * foot_vel.x(),
                               -contact.tangential_damping * foot_vel.y(), 0.0);
    const double cap = contact.friction * normal;
    const double t_norm = tangential.norm();
    if (t_norm > cap && t_norm > 0.0) tangential *= cap / t_norm;

    const Eigen::Vector3d force(tangential.x(), tangential.y(), normal);
    force_sum += force;
    torque_world += (foot - state.position).cross(force);
  }

  // Torso dynamics, semi-implicit Euler.
  const Eigen::Vector3d accel =
      force_sum / model.torso_mass + Eigen::Vector3d(0.0, 0.0, -model.gravity);
  next.linear_velocity = state.linear_velocity + dt * accel;
  next.position = state.position + dt * next.linear_velocity;

  const Eigen::Vector3d torque_body = R.transpose() * torque_world;
  const Eigen::Vector3d gyro =
      state.angular_velocity.cross(model.torso_inertia * state.angular_velocity);
  const Eigen::Vector3d omega_dot = model.torso_inertia.ldlt().solve(torque_body - gyro);
  next.angular_velocity = state.angular_velocity + dt * omega_dot;
  next.orientation = integrate_orientation(state.orientation, next.angular_velocity, dt);

  next.time = state.time + dt;
  return next;
}

bool is_fallen(const RobotModel& model, const RobotState& state, const Heightfield& field) {
  (void)model;
  const Eigen::Vector3d rpy = quaternion_to_rpy(state.orientation);
  if (std::abs(rpy.x()) > 0.8 || std::abs(rpy.y()) > 0.8) return true;
  const double ground = field.height_at(state.position.x(), state.position.y());
  return state.position.z() - ground < 0.12;
}

double torso_mechanical_energy(const RobotModel& model, const RobotState& state) {
  const double kinetic =
      0.5 * model.torso_mass * state.linear_velocity.squaredNorm() +
      0.5 * state.angular_velocity.dot(model.torso_inertia * state.angular_velocity);
  return kinetic + model.torso_mass * model.gravity * state.position.z();
}

}  // namespace terragym
