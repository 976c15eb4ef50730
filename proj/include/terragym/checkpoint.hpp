#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "terragym/policy.hpp"
#include "terragym/ppo.hpp"

namespace terragym {

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Binary format, little-endian:
//   magic "TGCKPT1\0", mode flags, lidar grid, action/observation dims,
//   layer-dimension table, f64 parameters, optimizer first/second moments
//   and step count, 64-bit trainer RNG state, then iteration / env-step
//   counters for resumption.
void save_checkpoint(const std::string& path, const PolicyNet& policy, const AdamState& adam,
                     uint64_t rng_state, uint64_t iteration, uint64_t env_steps);

struct LoadedCheckpoint {
  std::unique_ptr<PolicyNet> policy;
  AdamState adam;
  uint64_t rng_state = 0;
  uint64_t iteration = 0;
  uint64_t env_steps = 0;
};

// The robot model supplies the model-dependent action scaling; every stored
// dimension is validated. Throws CheckpointError on any mismatch.
LoadedCheckpoint load_checkpoint(const std::string& path, const RobotModel& model);

}  // namespace terragym
