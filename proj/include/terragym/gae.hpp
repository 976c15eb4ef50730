#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace terragym {

struct GaeResult {
  Eigen::VectorXd advantages;
  Eigen::VectorXd returns;  // advantages + values
};

// Generalized advantage estimation over one trajectory segment.
//   delta_t = r_t + gamma * V(s_{t+1}) * (1 - done_t) - V(s_t)
//   A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// The value after the last step is `bootstrap_value` (ignored if that step
// terminated).
inline GaeResult compute_gae(const Eigen::VectorXd& rewards, const Eigen::VectorXd& values,
                             const std::vector<uint8_t>& dones, double bootstrap_value,
                             double gamma, double lam) {
  const Eigen::Index n = rewards.size();
  GaeResult out;
  out.advantages.resize(n);
  out.returns.resize(n);
  double next_advantage = 0.0;
  double next_value = bootstrap_value;
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const double not_done = dones[static_cast<size_t>(t)] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * next_value * not_done - values[t];
    next_advantage = delta + gamma * lam * not_done * next_advantage;
    out.advantages[t] = next_advantage;
    next_value = values[t];
  }
  out.returns = out.advantages + values;
  return out;
}

}  // namespace terragym
