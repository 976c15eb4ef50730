#include "terragym/observation.hpp"

#include "terragym/pmtg.hpp"

namespace terragym {

Eigen::VectorXd ActionScaling::to_physical(const Eigen::VectorXd& normalized) const {
  return center + half_range.cwiseProduct(normalized);
}

Eigen::VectorXd ActionScaling::to_normalized(const Eigen::VectorXd& physical) const {
  return (physical - center).cwiseQuotient(half_range);
}

ActionScaling ActionScaling::pmtg(double residual_bound) {
  ActionScaling s;
  const int dim = 3 + kNumJoints;
  s.center = Eigen::VectorXd::Zero(dim);
  s.half_range = Eigen::VectorXd::Constant(dim, residual_bound);
  s.center[0] = 0.5 * TGParams::kMaxFrequency;
  s.half_range[0] = 0.5 * TGParams::kMaxFrequency;
  s.center[1] = 0.5 * TGParams::kMaxSwingHeight;
  s.half_range[1] = 0.5 * TGParams::kMaxSwingHeight;
  s.center[2] = 0.0;
  s.half_range[2] = TGParams::kMaxStride;
  return s;
}

ActionScaling ActionScaling::reactive(const RobotModel& model, double target_bound) {
  ActionScaling s;
  s.center = model.nominal_joint_angles();
  s.half_range = Eigen::VectorXd::Constant(kNumJoints, target_bound);
  return s;
}

}  // namespace terragym
