#include "terragym/pmtg.hpp"

#include <cmath>

namespace terragym {

namespace {
constexpr double kTwoPi = 6.28318530717958647692528676656;

inline double clampd(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }
}  // namespace

TGParams TGParams::clamped() const {
  TGParams p = *this;
  p.frequency = clampd(p.frequency, 0.0, kMaxFrequency);
  p.swing_height = clampd(p.swing_height, 0.0, kMaxSwingHeight);
  p.stride = clampd(p.stride, -kMaxStride, kMaxStride);
  return p;
}

TGState advance(const TGState& state, const TGParams& params, double dt) {
  const TGParams p = params.clamped();
  TGState next = state;
  next.phase = std::fmod(state.phase + kTwoPi * p.frequency * dt, kTwoPi);
  if (next.phase < 0.0) next.phase += kTwoPi;
  return next;
}

std::array<Eigen::Vector3d, kNumLegs> foot_targets(const TGState& state, const TGParams& params,
                                                   const RobotModel& model) {
  const TGParams p = params.clamped();
  const double depth = model.nominal_stance_depth;
  const double half_stride = 0.5 * p.stride;

  std::array<Eigen::Vector3d, kNumLegs> targets;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    double phase = std::fmod(state.phase + state.leg_offsets[static_cast<size_t>(leg)], kTwoPi);
    if (phase < 0.0) phase += kTwoPi;

    double x, z;
    if (std::sin(phase) > 0.0) {
      // Swing: cycloid in x and z, touching down where stance begins.
      const double s = phase / 3.14159265358979323846;
      x = -half_stride + p.stride * (s - std::sin(kTwoPi * s) / kTwoPi);
      z = -depth + p.swing_height * 0.5 * (1.0 - std::cos(kTwoPi * s));
    } else {
      // Stance: linear backward sweep at the nominal depth. Phase 0 is the
      // cycle end, i.e. the rearmost stance point.
      const double stance_phase = phase < 3.14159265358979323846 ? phase + kTwoPi : phase;
      const double s = (stance_phase - 3.14159265358979323846) / 3.14159265358979323846;
      x = half_stride - p.stride * s;
      z = -depth;
    }
    targets[static_cast<size_t>(leg)] = Eigen::Vector3d(x, model.lateral_offset(leg), z);
  }
  return targets;
}

Vector12 tg_joint_targets(const std::array<Eigen::Vector3d, kNumLegs>& tg_targets,
                          const RobotModel& model) {
  Vector12 q;
  for (int leg = 0; leg < kNumLegs; ++leg) {
    q.segment<3>(3 * leg) = leg_inverse_kinematics(model, tg_targets[static_cast<size_t>(leg)]).angles;
  }
  return q;
}

Vector12 compose_action(const std::array<Eigen::Vector3d, kNumLegs>& tg_targets,
                        const Vector12& residual, const RobotModel& model) {
  const Vector12 sum = tg_joint_targets(tg_targets, model) + residual;
  return sum.cwiseMax(model.joint_lower).cwiseMin(model.joint_upper);
}

}  // namespace terragym
