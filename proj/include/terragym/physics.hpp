#pragma once

#include "terragym/heightfield.hpp"
#include "terragym/kinematics.hpp"
#include "terragym/robot.hpp"

namespace terragym {

// Penalty contact between point feet and pillar tops.
struct ContactParams {
  double normal_stiffness = 1e4;    // N/m
  double normal_damping = 300.0;    // N*s/m
  double friction = 0.6;            // Coulomb cap on tangential force
  double tangential_damping = 800.0;  // N*s/m, viscous below the cap
  double max_penetration = 0.05;    // m, force saturates beyond this
};

// One 1 kHz low-level step: PD torques on the joints, penalty contact on the
// feet, semi-implicit Euler on joints and torso. Throws on invalid input;
// a step that produces non-finite state is reported through state_is_finite()
// on the result (caller terminates the episode).
RobotState step_lowlevel(const RobotModel& model, const RobotState& state,
                         const Vector12& target_q, const Heightfield& field,
                         const ContactParams& contact, double dt = 1e-3);

// Episode-termination test: excessive roll/pitch or torso too close to the
// local terrain surface.
bool is_fallen(const RobotModel& model, const RobotState& state, const Heightfield& field);

// Torso kinetic + potential energy (used by integrator sanity checks).
double torso_mechanical_energy(const RobotModel& model, const RobotState& state);

}  // namespace terragym
